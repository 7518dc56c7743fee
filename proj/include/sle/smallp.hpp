#pragma once

#include <memory>
#include <vector>

#include "sle/sle.hpp"

namespace sle {

// Convergent series solution S_p = sum_n S_n p^{2n} built from the retarded
// recursion with p-independent data (z0, w0) at the grid start.
struct SeriesSolution {
  int N = 0;
  Grid grid;
  std::vector<std::vector<cplx>> S;   // [n][i] coefficient values
  std::vector<std::vector<cplx>> dS;  // [n][i] coefficient derivatives
  cplx z0{}, w0{};
  double p_star = 0.0;        // contraction-bound radius estimate (conservative)
  double kernel_bound = 0.0;  // R in p_star^2 = 1/((tau_f - tau_i) R)
  double p_star_ratio = 0.0;  // empirical ratio estimate sqrt(|S_{N-1}|/|S_N|)

  // decade [p, 10 p] over which the order-N truncation defect is measurable
  // above the double-precision construction floor
  double defect_decade_start(int order, double target = 1e-9) const;

  cplx value(int n, double tau) const;
  cplx deriv(int n, double tau) const;
  // partial sum through order `order` (default: all available)
  cplx sum_value(double p, double tau, int order = -1) const;
  cplx sum_deriv(double p, double tau, int order = -1) const;
  // growing tail of |S_n| p^{2n} signals evaluation beyond the radius
  bool diverging_at(double p) const;
};

SeriesSolution series_fiducial(const Background& bg, int N, cplx z0, cplx w0, const Grid& grid,
                               double tol = 1e-12);

// sup-norm distance between the order-`order` partial sum and the exact
// solution with the same initial data (independent oracle for the p^{2N+2}
// truncation order)
double series_defect(const Background& bg, const SeriesSolution& s, double p, int order,
                     double tol = 1e-13);

// Momentum-expansion coefficients of the commutator function.
class CommutatorSeries {
 public:
  CommutatorSeries(std::shared_ptr<const SeriesSolution> fid, int N);
  int order() const { return N_; }
  const SeriesSolution& fiducial() const { return *fid_; }

  double delta(int n, double tau, double tau1) const;
  double dtau_delta(int n, double tau, double tau1) const;
  double dtau1_delta(int n, double tau, double tau1) const;
  double dtau_dtau1_delta(int n, double tau, double tau1) const;

 private:
  std::shared_ptr<const SeriesSolution> fid_;
  int N_;
};

CommutatorSeries commutator_series(const Background& bg, int N, const Grid& grid,
                                   double tol = 1e-12);

// Small-p expansion of the SLE energy and modulus.
struct SleSeries {
  enum class Regime { massive, massless };
  Regime regime = Regime::massive;
  int N = 0;
  double tau0 = 0.0;
  std::vector<double> c1n;   // expansion of c1[S_p]
  std::vector<cplx> c2n;     // expansion of c2[S_p]
  std::vector<double> eps2;  // expansion of (E^SLE)^2
  std::vector<double> Jn_tau0;
  std::vector<double> Kn_tau0;
  double p_star = 0.0;
  std::shared_ptr<const SeriesSolution> fid;

  std::vector<double> J_coeffs(double tau) const;  // J_n(tau), n = 0..N
  double energy(double p, int order = -1) const;
  double mod2(double p, double tau, int order = -1) const;
};

SleSeries sle_series(const Background& bg, const WindowFunction& f, int N, const Grid& grid,
                     double tol = 1e-12);

// IR extrapolation study: 2p |T^SLE|^2 -> abar etc.
struct IrRecord {
  std::vector<double> p_values;
  std::vector<double> two_p_mod2;  // at the window midpoint
  double abar_target = 0.0;
  double extrapolated = 0.0;  // p^2-model Richardson extrapolation
  double imW_error = 0.0;     // |Im W(tau,tau') + (tau-tau')/2| at smallest p
  double energy_rel_error = 0.0;
};
IrRecord ir_limit(const Background& bg, const WindowFunction& f,
                  const std::vector<double>& p_values, const Grid& grid);

// Divergent-coefficient fiducial vs commutator route at small p.
struct CrosscheckRecord {
  double mu_sqrtp = 0.0;           // mu_p sqrt(p)
  double mu_limit = 0.0;           // |w0| sqrt(abar/2)
  double twopoint_route_error = 0.0;
  double twopoint_data_error = 0.0;
  double mu_data_spread = 0.0;
};
CrosscheckRecord fiducial_free_crosscheck(const Background& bg, const WindowFunction& f, double p,
                                          const Grid& grid);

// coefficient arrays in x = p^2, truncated to the shorter length
std::vector<double> series_mul(const std::vector<double>& a, const std::vector<double>& b);
std::vector<double> series_sqrt(const std::vector<double>& a);
std::vector<double> series_div(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace sle
