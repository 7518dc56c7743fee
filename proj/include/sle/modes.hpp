#pragma once

#include <complex>
#include <utility>
#include <vector>

#include "sle/background.hpp"
#include "sle/ode.hpp"
#include "sle/window.hpp"

namespace sle {

// Wronskian-normalized complex mode solution in invariant time.
struct ModeSolution {
  double p = 0.0;
  ComplexTrajectory traj;
  double wronskian_residual = 0.0;  // max |dT T* - T dT* + i| over the grid
};

// Wronskian of (value, derivative) data: w z* - w* z (should equal -i).
inline cplx wronskian(cplx z, cplx w) { return w * std::conj(z) - std::conj(w) * z; }

// Solve the mode equation at momentum p with normalized data (z, w) at tau0.
ModeSolution solve_mode(const Background& bg, double p, cplx z, cplx w, double tau0,
                        const Grid& grid, double tol = 1e-12);

// Instantaneous positive-frequency data 1/sqrt(2 w_p), -i sqrt(w_p/2) at tau0.
std::pair<cplx, cplx> instantaneous_data(const Background& bg, double p, double tau0);

// Commutator function Delta_p(tau, tau') realized through the fundamental
// pair u, v with u(tau_r) = 1, u' = 0 and v(tau_r) = 0, v' = 1.  Analytic
// derivative accessors; antisymmetric by construction.
class CommutatorTable {
 public:
  CommutatorTable(const Background& bg, double p, const Grid& grid, double tau_r,
                  double tol = 1e-12);

  double p() const { return p_; }
  double tau_ref() const { return tau_ref_; }
  const Grid& grid() const { return grid_; }

  double u(double tau) const { return u_.eval(tau).real(); }
  double v(double tau) const { return v_.eval(tau).real(); }
  double du(double tau) const { return u_.eval_deriv(tau).real(); }
  double dv(double tau) const { return v_.eval_deriv(tau).real(); }

  double delta(double tau, double tau1) const;
  double dtau_delta(double tau, double tau1) const;   // d/d(first)
  double dtau1_delta(double tau, double tau1) const;  // d/d(second)
  double dtau_dtau1_delta(double tau, double tau1) const;

 private:
  double p_;
  double tau_ref_;
  Grid grid_;
  ComplexTrajectory u_, v_;
};

CommutatorTable commutator(const Background& bg, double p, const Grid& grid, double tau_r,
                           double tol = 1e-12);

// |dtau0 D(tau,tau0) D(tau1,tau0) - D(tau,tau0) dtau0 D(tau1,tau0) - D(tau,tau1)|
double delta_identity_residual(const CommutatorTable& table, double tau, double tau1, double tau0);

// Pointwise residual of the modulus equation xi'' + w_p^2 xi = 1/(4 xi^3),
// xi = |T|, with the second derivative taken by finite differences on the
// grid; scaled by the local magnitude of the terms.
std::vector<double> ermakov_residual(const Background& bg, const ModeSolution& sol);

// Schroedinger-picture Gaussian covariance: dT*/T*; checks the equivalent
// form (i + d|T|^2)/(2|T|^2) and requires a positive imaginary part.
cplx gaussian_covariance(const ModeSolution& sol, double tau);

// lhs: modulus-phase form of the averaged energy density, rhs: |dT|^2 form.
std::pair<double, double> energy_density_identity(const Background& bg, const ModeSolution& sol,
                                                  const WindowFunction& f,
                                                  const QuadOptions& opt = {});

}  // namespace sle
