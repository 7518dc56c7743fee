#include "sle/wkb.hpp"

#include <algorithm>
#include <cmath>

#include "sle/errors.hpp"
#include "sle/quadrature.hpp"

namespace sle {

namespace {

// d/dtau s_1 = omega0^2/(2 omega2) - (1/(4 omega2)) (omega2''/omega2 - (3/2)(omega2'/omega2)^2)
Jet r1_jet(const Background& bg, double tau, int ord) {
  Jet w2 = sqrt(bg.omega2_sq_jet(tau, ord + 2));
  Jet w0sq = bg.omega0_sq_jet(tau, ord + 2);
  Jet dw2 = w2.derivative();
  Jet ddw2 = dw2.derivative();
  Jet w2t = w2.truncated(ord);
  Jet t1 = w0sq.truncated(ord) / (2.0 * w2t);
  Jet ra = ddw2.truncated(ord) / w2t;
  Jet rb = dw2.truncated(ord) / w2t;
  Jet t2 = (ra - 1.5 * (rb * rb)) / (4.0 * w2t);
  return t1 - t2;
}

// jets of r_m = d/dtau s_m for m = 1..n at one point; r[m] has order
// base_ord + (n - m).  s_values holds s_1 .. s_{n-1} at the same point.
std::vector<Jet> r_jets_at(const Background& bg, double tau, int n, int base_ord,
                           const std::vector<double>& s_values) {
  std::vector<Jet> r(n + 1);
  if (n < 1) return r;
  r[1] = r1_jet(bg, tau, base_ord + n - 1);
  if (n == 1) return r;
  Jet w2 = sqrt(bg.omega2_sq_jet(tau, base_ord + n + 1));
  for (int m = 2; m <= n; ++m) {
    const int om = base_ord + n - m;
    Jet sj = r[m - 1].antiderivative(s_values[m - 1]);
    Jet term1 = r[1].truncated(om) * sj.truncated(om);
    Jet term2 = (r[m - 1].truncated(om + 1) / (2.0 * w2.truncated(om + 1))).derivative();
    r[m] = term1 + term2.truncated(om);
  }
  return r;
}

std::vector<double> cumulative_real(const Grid& g, const std::vector<double>& f,
                                    const std::vector<double>& df) {
  std::vector<double> out(g.size(), 0.0);
  for (std::size_t i = 1; i < g.size(); ++i) {
    const double h = g[i] - g[i - 1];
    out[i] = out[i - 1] + 0.5 * h * (f[i - 1] + f[i]) + h * h / 12.0 * (df[i - 1] - df[i]);
  }
  return out;
}

double hermite_real(const Grid& g, const std::vector<double>& y, const std::vector<double>& dy,
                    double tau) {
  const std::size_t i = g.locate(tau);
  const double h = g[i + 1] - g[i];
  const double x = (tau - g[i]) / h;
  const double x2 = x * x, x3 = x2 * x;
  return y[i] * (2 * x3 - 3 * x2 + 1) + dy[i] * (h * (x3 - 2 * x2 + x)) +
         y[i + 1] * (-2 * x3 + 3 * x2) + dy[i + 1] * (h * (x3 - x2));
}

}  // namespace

double WkbCoeffs::s_of(int n, double tau) const {
  if (n == 0) return 1.0;
  return hermite_real(grid, s[n], r[n], tau);
}

double WkbCoeffs::omega2_at(double tau) const {
  return hermite_real(grid, omega2_vals, omega2_derivs, tau);
}

double WkbCoeffs::omega2_integral(double a, double b) const {
  // cumulative table interpolated with its exact derivative omega2
  auto at = [&](double tau) { return hermite_real(grid, omega2_cum, omega2_vals, tau); };
  return at(b) - at(a);
}

double WkbCoeffs::V(int n, double tau, double tau1) const {
  double acc = 0.0;
  for (int j = 0; j <= n; ++j) {
    const double sj = j == 0 ? 1.0 : s_of(j, tau);
    const double sk = (n - j) == 0 ? 1.0 : s_of(n - j, tau1);
    acc += ((n - j) % 2 == 0 ? 1.0 : -1.0) * sj * sk;
  }
  return acc;
}

WkbCoeffs wkb_s_coeffs(const Background& bg, int N, const Grid& grid) {
  if (N < 1) throw DomainError("wkb_s_coeffs: order must be >= 1");
  if (N + 2 > bg.max_deriv_order())
    throw CapabilityError("wkb_s_coeffs: background derivatives insufficient for order N");
  grid.validate();

  WkbCoeffs out;
  out.N = N;
  out.grid = grid;
  const std::size_t n_pts = grid.size();
  out.s.assign(N + 1, std::vector<double>(n_pts, 0.0));
  out.r.assign(N + 1, std::vector<double>(n_pts, 0.0));
  out.s_init.assign(N + 1, 0.0);

  // cumulative integral of omega2 (for the oscillatory prefactors)
  {
    std::vector<double> w2(n_pts), dw2(n_pts);
    for (std::size_t i = 0; i < n_pts; ++i) {
      Jet j = sqrt(bg.omega2_sq_jet(grid[i], 1));
      w2[i] = j.value();
      dw2[i] = j.deriv(1);
    }
    out.omega2_cum = cumulative_real(grid, w2, dw2);
    out.omega2_vals = w2;
    out.omega2_derivs = dw2;
  }

  // s_1
  {
    std::vector<double> rv(n_pts), drv(n_pts);
    for (std::size_t i = 0; i < n_pts; ++i) {
      Jet rj = r1_jet(bg, grid[i], 1);
      rv[i] = rj.value();
      drv[i] = rj.deriv(1);
    }
    out.r[1] = rv;
    out.s[1] = cumulative_real(grid, rv, drv);
  }

  const double tau_i = grid.lo();
  for (int n = 2; n <= N; ++n) {
    // initial value from the Wronskian-fixing triangular system
    if (n % 2 == 0) {
      const int M = n / 2;
      const std::vector<double> s_init_head(out.s_init.begin(), out.s_init.begin() + n);
      std::vector<Jet> r_at_i = r_jets_at(bg, tau_i, n - 1, 2, s_init_head);
      const double w2_i = std::sqrt(bg.omega2_sq(tau_i));
      double acc = 0.0;
      for (int m = 0; 2 * m <= 2 * M - 2; ++m) {
        const int k = 2 * M - 1 - 2 * m;  // odd, 1..2M-1
        if (k < 1) continue;
        const double s2m = m == 0 ? 1.0 : out.s_init[2 * m];
        acc += r_at_i[k].value() / w2_i * s2m;
      }
      for (int m = 1; m <= M - 1; ++m) acc -= out.s_init[2 * m] * out.s_init[2 * (M - m)];
      out.s_init[n] = 0.5 * acc;
    } else {
      out.s_init[n] = 0.0;
    }

    // r_n on the grid and cumulative integration
    std::vector<double> rv(n_pts), drv(n_pts);
    for (std::size_t i = 0; i < n_pts; ++i) {
      std::vector<double> s_at(n);
      for (int m = 1; m < n; ++m) s_at[m] = out.s[m][i];
      std::vector<Jet> rj = r_jets_at(bg, grid[i], n, 2, s_at);
      rv[i] = rj[n].value();
      drv[i] = rj[n].deriv(1);
    }
    out.r[n] = rv;
    std::vector<double> integral = cumulative_real(grid, rv, drv);
    for (std::size_t i = 0; i < n_pts; ++i) out.s[n][i] = out.s_init[n] + integral[i];
  }
  // s_1 initial value is zero by parity; nothing to add
  return out;
}

HeatKernelCoeffs::HeatKernelCoeffs(Background bg, int N) : bg_(std::move(bg)), N_(N) {
  if (N_ < 0) throw DomainError("gd_coeffs: order must be >= 0");
  if (2 * N_ + 2 > bg_.max_deriv_order())
    throw CapabilityError("gd_coeffs: background derivatives insufficient for order N");
}

Jet HeatKernelCoeffs::eval_jet(int n, double tau, int ord) const {
  if (n > N_) throw DomainError("gd: coefficient index exceeds the order");
  const int topord = ord + 2 * n;
  if (topord + 2 > Jet::kMaxOrder + 2) {
    // jets clamp internally; background order guards the real capability
  }
  Jet w2sq = bg_.omega2_sq_jet(tau, topord + 2);
  Jet w0sq = bg_.omega0_sq_jet(tau, topord + 2);
  Jet w2 = sqrt(w2sq);
  std::vector<Jet> G(n + 1);
  G[0] = Jet::constant(1.0, topord);
  for (int m = 1; m <= n; ++m) {
    const int om = topord - 2 * m;
    Jet acc = Jet::constant(0.0, om);
    for (int k = 0; k <= m - 1; ++k) {
      const int l = m - 1 - k;
      Jet gk_w = G[k] / w2.truncated(G[k].order());
      Jet gl_w = G[l] / w2.truncated(G[l].order());
      Jet t1 = 0.25 * (gk_w.truncated(om) * gl_w.derivative().derivative().truncated(om));
      Jet t2 = -0.125 * (gk_w.derivative().truncated(om) * gl_w.derivative().truncated(om));
      Jet t3 = 0.5 * ((w0sq.truncated(om) / w2sq.truncated(om)) * G[k].truncated(om) *
                      G[l].truncated(om));
      acc = acc + t1 + t2 + t3;
    }
    for (int k = 1; k <= m - 1; ++k)
      acc = acc - 0.5 * (G[k].truncated(om) * G[m - k].truncated(om));
    G[m] = acc;
  }
  return G[n];
}

double HeatKernelCoeffs::eval(int n, double tau) const { return eval_jet(n, tau, 0).value(); }

HeatKernelCoeffs gd_coeffs(const Background& bg, int N) { return HeatKernelCoeffs(bg, N); }

double gd_closed_form_g1(const Background& bg, double tau) {
  Jet w = bg.omega2_sq_jet(tau, 2);
  Jet v = bg.omega0_sq_jet(tau, 0);
  const double w0 = w.value(), wp = w.deriv(1), wpp = w.deriv(2);
  return v.value() / (2.0 * w0) + 5.0 / 32.0 * wp * wp / (w0 * w0 * w0) -
         wpp / (8.0 * w0 * w0);
}

double gd_closed_form_g2(const Background& bg, double tau) {
  Jet w = bg.omega2_sq_jet(tau, 4);
  Jet v = bg.omega0_sq_jet(tau, 2);
  const double w0 = w.value(), w1 = w.deriv(1), w2d = w.deriv(2), w3 = w.deriv(3),
               w4 = w.deriv(4);
  const double v0 = v.value(), v1 = v.deriv(1), v2 = v.deriv(2);
  const double w0_2 = w0 * w0, w0_3 = w0_2 * w0;
  double g2 = 3.0 / (8.0 * w0_2) * (v0 * v0 + v2 / 3.0);
  g2 -= 5.0 / (16.0 * w0_3) * (v0 * w2d + v1 * w1 - v0 * 7.0 * w1 * w1 / (4.0 * w0));
  g2 += 1.0 / (32.0 * w0_3) *
        (-w4 + 21.0 * w2d * w2d / (4.0 * w0) + 7.0 * w3 * w1 / w0 -
         231.0 * w1 * w1 * w2d / (8.0 * w0_2) + 1155.0 * std::pow(w1, 4) / (64.0 * w0_3));
  return g2;
}

double gd_conformal_identity_g2(const HeatKernelCoeffs& coeffs, double tau) {
  Jet g1 = coeffs.eval_jet(1, tau, 2);
  Jet w2 = sqrt(coeffs.background().omega2_sq_jet(tau, 3));
  Jet inner = g1.derivative() / w2.truncated(g1.order() - 1);
  Jet outer = inner.derivative();
  return 1.5 * g1.value() * g1.value() + outer.value() / (4.0 * w2.value());
}

double wkb_modulus_asymptote(const HeatKernelCoeffs& coeffs, double p, double tau) {
  if (!(p > 0.0)) throw DomainError("wkb_modulus_asymptote: p must be positive");
  const double w2 = std::sqrt(coeffs.background().omega2_sq(tau));
  double sum = 1.0, sgn = 1.0, pw = 1.0;
  for (int n = 1; n <= coeffs.order(); ++n) {
    sgn = -sgn;
    pw *= p * p;
    sum += sgn * coeffs.eval(n, tau) / pw;
  }
  return sum / (2.0 * p * w2);
}

double wkb_phase_asymptote(const HeatKernelCoeffs& coeffs, double p, double tau, double tau0) {
  if (!(p > 0.0)) throw DomainError("wkb_phase_asymptote: p must be positive");
  const int N = coeffs.order();
  const Background& bg = coeffs.background();
  auto integrand = [&](double s) {
    // reciprocal of sum (-)^n G_n x^n, x = 1/p^2, truncated at order N
    std::vector<double> a(N + 1, 0.0);
    a[0] = 1.0;
    double sgn = 1.0;
    for (int n = 1; n <= N; ++n) {
      sgn = -sgn;
      a[n] = sgn * coeffs.eval(n, s);
    }
    std::vector<double> rinv(N + 1, 0.0);
    rinv[0] = 1.0;
    for (int k = 1; k <= N; ++k) {
      double acc = 0.0;
      for (int j = 1; j <= k; ++j) acc -= a[j] * rinv[k - j];
      rinv[k] = acc;
    }
    const double x = 1.0 / (p * p);
    double val = 0.0, pw = 1.0;
    for (int k = 0; k <= N; ++k, pw *= x) val += rinv[k] * pw;
    return std::sqrt(bg.omega2_sq(s)) * val;
  };
  const double lo = std::min(tau0, tau), hi = std::max(tau0, tau);
  if (lo == hi) return 0.0;
  QuadOptions opt;
  opt.rel_tol = 1e-11;
  opt.breakpoints = bg.tau_breakpoints(lo, hi);
  const double integral = quad(integrand, lo, hi, opt);
  return -p * (tau >= tau0 ? integral : -integral);
}

cplx two_point_wkb(const WkbCoeffs& coeffs, double p, double tau, double tau1) {
  if (!(p > 0.0)) throw DomainError("two_point_wkb: p must be positive");
  const double phase = -p * coeffs.omega2_integral(tau1, tau);
  cplx sum = 0.0;
  const cplx ip(0.0, p);
  cplx ipw = 1.0;
  for (int n = 0; n <= coeffs.N; ++n) {
    if (n > 0) ipw *= ip;
    sum += coeffs.V(n, tau, tau1) / ipw;
  }
  return std::exp(cplx(0.0, phase)) /
         (2.0 * p * std::sqrt(coeffs.omega2_at(tau) * coeffs.omega2_at(tau1))) * sum;
}

double gelfand_dickey_residual(const Background& bg, double p, const Grid& grid,
                               const std::vector<double>& mod2_samples) {
  if (mod2_samples.size() != grid.size())
    throw DomainError("gelfand_dickey_residual: sample count mismatch");
  double worst = 0.0;
  const auto& y = mod2_samples;
  for (std::size_t i = 2; i + 2 < grid.size(); ++i) {
    const double h = grid[i + 1] - grid[i];
    const double d1 = (y[i - 2] - 8 * y[i - 1] + 8 * y[i + 1] - y[i + 2]) / (12 * h);
    const double d2 = (-y[i - 2] + 16 * y[i - 1] - 30 * y[i] + 16 * y[i + 1] - y[i + 2]) /
                      (12 * h * h);
    const double w2 = bg.omega_p_sq(p, grid[i]);
    const double lhs = 2 * y[i] * d2 - d1 * d1 + 4 * w2 * y[i] * y[i] - 1.0;
    const double scale =
        std::abs(2 * y[i] * d2) + d1 * d1 + std::abs(4 * w2 * y[i] * y[i]) + 1.0;
    worst = std::max(worst, std::abs(lhs) / scale);
  }
  return worst;
}

}  // namespace sle
