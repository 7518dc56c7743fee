#pragma once

#include <functional>
#include <vector>

#include "sle/modes.hpp"

namespace sle {

// Window-averaged quadratic Hamiltonian data of a solution S:
//   c1 = 1/2 int f^2 (|dS|^2 + w_p^2 |S|^2),  c2 = 1/2 int f^2 ((dS)^2 + w_p^2 S^2).
struct EnergyPair {
  double c1 = 0.0;
  cplx c2{};
};

struct BogoliubovCoeffs {
  cplx lambda{};
  cplx mu{};
};

struct JKData {
  double J = 0.0;
  double K = 0.0;
  double Jdot = 0.0;
  double tau0 = 0.0;
};

enum class Route { fiducial, commutator };

struct SLEResult {
  double p = 0.0;
  ModeSolution mode;
  double energy = 0.0;
  std::function<double(double)> J_of_tau;
  Route route = Route::fiducial;
};

// Quadrature options sized for the oscillation budget of the integrals at
// momentum p (interval limits grow with p).
QuadOptions sle_quad_options(const Background& bg, const WindowFunction& f, double p,
                             double rel_tol = 1e-12);

EnergyPair energy_functionals(const ModeSolution& S, const WindowFunction& f,
                              const Background& bg, const QuadOptions& opt);
EnergyPair energy_functionals(const ModeSolution& S, const WindowFunction& f,
                              const Background& bg);

// Minimizing Bogoliubov parameters for given (c1, c2); requires c1 > |c2|.
// Convention: arg c2 := 0 when |c2| < 1e-12 c1, giving lambda = -1, mu = 0.
BogoliubovCoeffs minimize_bogoliubov(const EnergyPair& pair);

// a S + b S* (|a|^2 - |b|^2 = 1 for a normalized result)
ModeSolution bogoliubov_rotate(const ModeSolution& S, cplx a, cplx b);

SLEResult sle_from_fiducial(const ModeSolution& S, const WindowFunction& f, const Background& bg,
                            const QuadOptions& opt);
SLEResult sle_from_fiducial(const ModeSolution& S, const WindowFunction& f, const Background& bg);

// Convenience: instantaneous-vacuum fiducial at the window midpoint.
SLEResult sle_solve_fiducial(const Background& bg, const WindowFunction& f, double p,
                             const Grid& grid, double ode_tol = 1e-12, double quad_tol = 1e-12);

JKData jk_functionals(const CommutatorTable& table, const WindowFunction& f, const Background& bg,
                      double tau0, const QuadOptions& opt);
JKData jk_functionals(const CommutatorTable& table, const WindowFunction& f, const Background& bg,
                      double tau0);

SLEResult sle_from_commutator(const CommutatorTable& table, const WindowFunction& f,
                              const Background& bg, double tau0, const QuadOptions& opt);
SLEResult sle_from_commutator(const CommutatorTable& table, const WindowFunction& f,
                              const Background& bg, double tau0);

// E^2 = 1/4 int f(tau0)^2 [K(tau0) + w_p(tau0)^2 J(tau0)] dtau0
double sle_energy(const CommutatorTable& table, const WindowFunction& f, const Background& bg,
                  const QuadOptions& opt);
double sle_energy(const CommutatorTable& table, const WindowFunction& f, const Background& bg);

cplx two_point(const SLEResult& res, double tau, double tau1);

// Bogoliubov-invariant functionals I, J(tau), K(tau) of an arbitrary solution.
struct InvariantsIJK {
  double I = 0.0;
  std::function<double(double)> J;
  std::function<double(double)> K;
};
InvariantsIJK invariants_IJK(const ModeSolution& S, const WindowFunction& f, const Background& bg,
                             const QuadOptions& opt);
InvariantsIJK invariants_IJK(const ModeSolution& S, const WindowFunction& f, const Background& bg);

// Shrinking-window study of the instantaneous limit at tau0.
struct InstantaneousLimitRecord {
  std::vector<double> widths;       // gauge-time widths
  std::vector<double> mod2_errors;  // | |T(tau0)|^2 - 1/(2 w_p) |
  std::vector<double> orders;       // log2(e_i / e_{i+1})
  std::vector<double> energy_ratio; // E / (int f^2) vs w_p/2
  double target_mod2 = 0.0;         // 1/(2 w_p(tau0))
};
InstantaneousLimitRecord instantaneous_limit_probe(const Background& bg, double p, double tau0,
                                                   const std::vector<double>& widths,
                                                   double w_shape = 0.5);

}  // namespace sle
