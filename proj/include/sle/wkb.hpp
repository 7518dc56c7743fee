#pragma once

#include <vector>

#include "sle/background.hpp"
#include "sle/grid.hpp"
#include "sle/ode.hpp"

namespace sle {

// Coefficients s_n of the large-momentum ansatz
//   S_p = exp(-ip int omega2) / sqrt(2 p omega2) * (1 + sum_n (ip)^{-n} s_n),
// built by integrating the one-step recursion with Wronskian-fixing initial
// values (s_n(tau_i) = 0 for odd n, even ones solved sequentially).
struct WkbCoeffs {
  int N = 0;
  Grid grid;
  std::vector<std::vector<double>> s;  // s[n][i], n = 1..N (s[0] unused)
  std::vector<std::vector<double>> r;  // r[n][i] = d/dtau s_n
  std::vector<double> s_init;          // s_n(tau_i)
  std::vector<double> omega2_cum;      // int_{tau_i}^{tau_k} omega2
  std::vector<double> omega2_vals;     // omega2 at the grid points
  std::vector<double> omega2_derivs;   // d/dtau omega2

  double s_of(int n, double tau) const;  // Hermite interpolation
  double omega2_at(double tau) const;
  double omega2_integral(double a, double b) const;
  // V_n(tau, tau') = sum_j (-)^{n-j} s_j(tau) s_{n-j}(tau'), s_0 = 1
  double V(int n, double tau, double tau1) const;
};

WkbCoeffs wkb_s_coeffs(const Background& bg, int N, const Grid& grid);

// Generalized heat-kernel coefficients G_n from the Gelfand-Dickey recursion;
// local differential polynomials in omega0^2, omega2^2 evaluated through jets.
class HeatKernelCoeffs {
 public:
  HeatKernelCoeffs(Background bg, int N);
  int order() const { return N_; }
  const Background& background() const { return bg_; }
  double eval(int n, double tau) const;
  Jet eval_jet(int n, double tau, int ord) const;

 private:
  Background bg_;
  int N_;
};

HeatKernelCoeffs gd_coeffs(const Background& bg, int N);

// Closed forms of G_1, G_2 in terms of v = omega0^2, w = omega2^2.
double gd_closed_form_g1(const Background& bg, double tau);
double gd_closed_form_g2(const Background& bg, double tau);
// G_2 = (3/2) G_1^2 + (1/(4 w2)) d/dtau (d/dtau G_1 / w2)
double gd_conformal_identity_g2(const HeatKernelCoeffs& coeffs, double tau);

// (1/(2 p omega2)) { 1 + sum_{n<=N} (-)^n G_n p^{-2n} }
double wkb_modulus_asymptote(const HeatKernelCoeffs& coeffs, double p, double tau);

// -p int_{tau0}^{tau} omega2(s) [sum_{n<=N} (-)^n G_n(s) p^{-2n}]^{-1}_trunc ds
double wkb_phase_asymptote(const HeatKernelCoeffs& coeffs, double p, double tau, double tau0);

// truncated Fourier-kernel asymptote of S_p(tau) S_p(tau')*
cplx two_point_wkb(const WkbCoeffs& coeffs, double p, double tau, double tau1);

// max scaled residual of 2 Y Y'' - (Y')^2 + 4 w_p^2 Y^2 - 1 over the grid
// interior, derivatives of the |T|^2 samples taken by finite differences
double gelfand_dickey_residual(const Background& bg, double p, const Grid& grid,
                               const std::vector<double>& mod2_samples);

}  // namespace sle
