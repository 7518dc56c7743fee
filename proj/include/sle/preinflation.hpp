#pragma once

#include <string>
#include <vector>

#include "sle/sle.hpp"

namespace sle {

// Kinetic-domination -> de Sitter background in conformal time,
//   a(eta) = sqrt(1+2H eta) on (-1/(2H), 0),  1/(1-H eta) on [0, 1/H),
// with the transition at eta = 0 and seed time eta* = 1/H.
struct PreInflationModel {
  double H = 1.0;
  Background bg;

  static PreInflationModel create(double H);
  double eta_star() const { return 1.0 / H; }
};

struct FiducialModeValue {
  cplx S;
  cplx dS_deta;
};

// Piecewise Hankel / Bunch-Davies fiducial solution, C^1 at the transition.
FiducialModeValue fiducial_mode(const PreInflationModel& model, double p, double eta);

struct MatchingCoeffs {
  cplx alpha;
  cplx beta;
};

MatchingCoeffs matching_coeffs(const PreInflationModel& model, double p);

// c1, c2 integrals of the piecewise fiducial over the window (conformal form).
EnergyPair sle_parameters(const PreInflationModel& model, const WindowFunction& f, double p,
                          double quad_tol = 1e-12);

// P = H^2/(2 pi)^2 (c1 + Re c2)/sqrt(c1^2 - |c2|^2)
double power_spectrum(const PreInflationModel& model, const WindowFunction& f, double p,
                      double quad_tol = 1e-12);

// Independent route: fundamental pair integrated in eta up to the seed time,
// spectrum read off J(eta*)/(2E).
double power_spectrum_commutator_route(const PreInflationModel& model, const WindowFunction& f,
                                       double p, double quad_tol = 1e-12);

struct SpectrumTable {
  std::vector<double> p_over_H;
  std::vector<double> P;
  std::vector<double> P_normalized;  // P (2 pi)^2 / H^2
  std::string window_descriptor;
  bool kinetic_only = false;
};

SpectrumTable spectrum_scan(const PreInflationModel& model, const WindowFunction& f,
                            const std::vector<double>& p_grid, double quad_tol = 1e-12,
                            int threads = 0);

// Small-p series with the endpoint-regular S_0 of the slow route, evaluated
// at the seed time, against the direct quadrature spectrum.
struct SmallPExtensionRecord {
  cplx S0_end;                    // S_0(1/H), should be i/sqrt(2)
  cplx dS0_end;                   // dS_0/deta at 1/H, should be 0
  double kinetic_ode_residual;    // p = 0 equation residual on the kinetic branch
  double wronskian_residual;      // | dS0 S0* - S0 dS0* + i a^-2 | max
  double P_series;                // series route spectrum at p
  double P_direct;                // Hankel-fiducial quadrature route
  double rel_diff;
};

SmallPExtensionRecord smallp_extension_check(const PreInflationModel& model,
                                             const WindowFunction& f, double p, int order = 3);

}  // namespace sle
