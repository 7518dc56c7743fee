#include "sle/smallp.hpp"

#include <algorithm>
#include <cmath>

#include "sle/errors.hpp"

namespace sle {

namespace {

cplx hermite_eval(const Grid& g, const std::vector<cplx>& y, const std::vector<cplx>& dy,
                  double tau) {
  const std::size_t i = g.locate(tau);
  const double h = g[i + 1] - g[i];
  const double x = (tau - g[i]) / h;
  const double x2 = x * x, x3 = x2 * x;
  return y[i] * (2 * x3 - 3 * x2 + 1) + dy[i] * (h * (x3 - 2 * x2 + x)) +
         y[i + 1] * (-2 * x3 + 3 * x2) + dy[i + 1] * (h * (x3 - x2));
}

cplx hermite_eval_deriv(const Grid& g, const std::vector<cplx>& y, const std::vector<cplx>& dy,
                        double tau) {
  const std::size_t i = g.locate(tau);
  const double h = g[i + 1] - g[i];
  const double x = (tau - g[i]) / h;
  const double x2 = x * x;
  return y[i] * ((6 * x2 - 6 * x) / h) + dy[i] * (3 * x2 - 4 * x + 1) +
         y[i + 1] * ((-6 * x2 + 6 * x) / h) + dy[i + 1] * (3 * x2 - 2 * x);
}

// cumulative integral on the grid by derivative-corrected trapezoid
std::vector<cplx> cumulative(const Grid& g, const std::vector<cplx>& f,
                             const std::vector<cplx>& df) {
  std::vector<cplx> out(g.size());
  out[0] = 0.0;
  for (std::size_t i = 1; i < g.size(); ++i) {
    const double h = g[i] - g[i - 1];
    out[i] = out[i - 1] + 0.5 * h * (f[i - 1] + f[i]) + h * h / 12.0 * (df[i - 1] - df[i]);
  }
  return out;
}

}  // namespace

std::vector<double> series_mul(const std::vector<double>& a, const std::vector<double>& b) {
  const std::size_t n = std::min(a.size(), b.size());
  std::vector<double> r(n, 0.0);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t j = 0; j <= k; ++j) r[k] += a[j] * b[k - j];
  return r;
}

std::vector<double> series_sqrt(const std::vector<double>& a) {
  if (a.empty() || !(a[0] > 0.0)) throw DomainError("series_sqrt: leading coefficient <= 0");
  std::vector<double> r(a.size(), 0.0);
  r[0] = std::sqrt(a[0]);
  for (std::size_t k = 1; k < a.size(); ++k) {
    double s = a[k];
    for (std::size_t j = 1; j < k; ++j) s -= r[j] * r[k - j];
    r[k] = s / (2.0 * r[0]);
  }
  return r;
}

std::vector<double> series_div(const std::vector<double>& a, const std::vector<double>& b) {
  if (b.empty() || b[0] == 0.0) throw DomainError("series_div: leading coefficient is zero");
  const std::size_t n = std::min(a.size(), b.size());
  std::vector<double> r(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    double s = a[k];
    for (std::size_t j = 1; j <= k; ++j) s -= b[j] * r[k - j];
    r[k] = s / b[0];
  }
  return r;
}

cplx SeriesSolution::value(int n, double tau) const { return hermite_eval(grid, S[n], dS[n], tau); }
cplx SeriesSolution::deriv(int n, double tau) const {
  return hermite_eval_deriv(grid, S[n], dS[n], tau);
}

cplx SeriesSolution::sum_value(double p, double tau, int order) const {
  if (order < 0 || order > N) order = N;
  cplx acc = 0.0;
  double pw = 1.0;
  for (int n = 0; n <= order; ++n, pw *= p * p) acc += pw * value(n, tau);
  return acc;
}

cplx SeriesSolution::sum_deriv(double p, double tau, int order) const {
  if (order < 0 || order > N) order = N;
  cplx acc = 0.0;
  double pw = 1.0;
  for (int n = 0; n <= order; ++n, pw *= p * p) acc += pw * deriv(n, tau);
  return acc;
}

bool SeriesSolution::diverging_at(double p) const {
  if (N < 2) return false;
  auto term = [&](int n) {
    double m = 0.0;
    for (const cplx& v : S[n]) m = std::max(m, std::abs(v));
    return m * std::pow(p, 2.0 * n);
  };
  return term(N) > term(N - 1);
}

double SeriesSolution::defect_decade_start(int order, double target) const {
  auto sup = [&](int n) {
    double m = 0.0;
    for (const cplx& v : S[n]) m = std::max(m, std::abs(v));
    return m;
  };
  const double s0 = std::max(sup(0), 1e-300);
  const double snext = std::max(sup(std::min(order + 1, N)), 1e-300);
  return std::pow(target * s0 / snext, 1.0 / (2.0 * order + 2.0));
}

SeriesSolution series_fiducial(const Background& bg, int N, cplx z0, cplx w0, const Grid& grid,
                               double tol) {
  if (std::abs(wronskian(z0, w0) + cplx(0, 1)) > 1e-10)
    throw ContractError("series_fiducial: (z0, w0) not Wronskian-normalized");
  if (N < 0 || N > 12) throw DomainError("series_fiducial: order out of range");
  grid.validate();

  SeriesSolution out;
  out.N = N;
  out.grid = grid;
  out.z0 = z0;
  out.w0 = w0;
  out.S.assign(N + 1, {});
  out.dS.assign(N + 1, {});

  const std::size_t n_pts = grid.size();
  const double tau_i = grid.lo();
  const auto breaks = bg.tau_breakpoints(grid.lo(), grid.hi());

  // fundamental pair of the p = 0 equation
  LinearOde2 ode0;
  ode0.w = [bg](double tau) { return bg.omega0_sq(tau); };
  ComplexTrajectory u0 = integrate_ode(ode0, 1.0, 0.0, grid, tol, tau_i, breaks);
  ComplexTrajectory v0 = integrate_ode(ode0, 0.0, 1.0, grid, tol, tau_i, breaks);

  std::vector<double> w2(n_pts), dw2(n_pts);
  for (std::size_t i = 0; i < n_pts; ++i) {
    Jet j = bg.omega2_sq_jet(grid[i], 1);
    w2[i] = j.value();
    dw2[i] = j.deriv(1);
  }

  // S_0 = z0 u0 + w0 v0
  out.S[0].resize(n_pts);
  out.dS[0].resize(n_pts);
  for (std::size_t i = 0; i < n_pts; ++i) {
    out.S[0][i] = z0 * u0.value[i] + w0 * v0.value[i];
    out.dS[0][i] = z0 * u0.deriv[i] + w0 * v0.deriv[i];
  }

  // S_n = -v0 Iu + u0 Iv with Iu = int u0 w2 S_{n-1}, Iv = int v0 w2 S_{n-1}
  for (int n = 1; n <= N; ++n) {
    std::vector<cplx> gu(n_pts), dgu(n_pts), gv(n_pts), dgv(n_pts);
    for (std::size_t i = 0; i < n_pts; ++i) {
      const cplx s = out.S[n - 1][i];
      const cplx ds = out.dS[n - 1][i];
      gu[i] = u0.value[i] * w2[i] * s;
      dgu[i] = u0.deriv[i] * w2[i] * s + u0.value[i] * (dw2[i] * s + w2[i] * ds);
      gv[i] = v0.value[i] * w2[i] * s;
      dgv[i] = v0.deriv[i] * w2[i] * s + v0.value[i] * (dw2[i] * s + w2[i] * ds);
    }
    const std::vector<cplx> Iu = cumulative(grid, gu, dgu);
    const std::vector<cplx> Iv = cumulative(grid, gv, dgv);
    out.S[n].resize(n_pts);
    out.dS[n].resize(n_pts);
    for (std::size_t i = 0; i < n_pts; ++i) {
      out.S[n][i] = -v0.value[i] * Iu[i] + u0.value[i] * Iv[i];
      out.dS[n][i] = -v0.deriv[i] * Iu[i] + u0.deriv[i] * Iv[i];
    }
  }

  // contraction bound: R >= sup |K|, |dK| entries of the kernel matrix
  double s0_max = 0.0, ds0_max = 0.0, w2_max = 0.0;
  for (std::size_t i = 0; i < n_pts; ++i) {
    s0_max = std::max(s0_max, std::abs(out.S[0][i]));
    ds0_max = std::max(ds0_max, std::abs(out.dS[0][i]));
    w2_max = std::max(w2_max, w2[i]);
  }
  out.kernel_bound = w2_max * s0_max * std::max(s0_max, ds0_max);
  out.p_star = 1.0 / std::sqrt((grid.hi() - grid.lo()) * out.kernel_bound);
  if (N >= 1) {
    double sn = 0.0, sm = 0.0;
    for (const cplx& v : out.S[N]) sn = std::max(sn, std::abs(v));
    for (const cplx& v : out.S[N - 1]) sm = std::max(sm, std::abs(v));
    out.p_star_ratio = sn > 0.0 ? std::sqrt(sm / sn) : out.p_star;
  }
  return out;
}

double series_defect(const Background& bg, const SeriesSolution& s, double p, int order,
                     double tol) {
  LinearOde2 ode;
  ode.w = [bg, p](double tau) { return bg.omega_p_sq(p, tau); };
  ComplexTrajectory exact = integrate_ode(ode, s.z0, s.w0, s.grid, tol, s.grid.lo(),
                                          bg.tau_breakpoints(s.grid.lo(), s.grid.hi()));
  double worst = 0.0;
  for (std::size_t i = 0; i < s.grid.size(); ++i) {
    cplx ps = 0.0, dps = 0.0;
    double pw = 1.0;
    for (int n = 0; n <= order; ++n, pw *= p * p) {
      ps += pw * s.S[n][i];
      dps += pw * s.dS[n][i];
    }
    worst = std::max(worst, std::abs(ps - exact.value[i]) + std::abs(dps - exact.deriv[i]));
  }
  return worst;
}

CommutatorSeries::CommutatorSeries(std::shared_ptr<const SeriesSolution> fid, int N)
    : fid_(std::move(fid)), N_(N) {
  if (N_ > fid_->N) throw DomainError("commutator_series: order exceeds the fiducial series");
}

// Delta_n = i sum_j (S_j(tau) S*_{n-j}(tau1) - c.c.) = -2 Im sum_j S_j(tau) S*_{n-j}(tau1)
double CommutatorSeries::delta(int n, double tau, double tau1) const {
  cplx acc = 0.0;
  for (int j = 0; j <= n; ++j)
    acc += fid_->value(j, tau) * std::conj(fid_->value(n - j, tau1));
  return -2.0 * acc.imag();
}

double CommutatorSeries::dtau_delta(int n, double tau, double tau1) const {
  cplx acc = 0.0;
  for (int j = 0; j <= n; ++j)
    acc += fid_->deriv(j, tau) * std::conj(fid_->value(n - j, tau1));
  return -2.0 * acc.imag();
}

double CommutatorSeries::dtau1_delta(int n, double tau, double tau1) const {
  cplx acc = 0.0;
  for (int j = 0; j <= n; ++j)
    acc += fid_->value(j, tau) * std::conj(fid_->deriv(n - j, tau1));
  return -2.0 * acc.imag();
}

double CommutatorSeries::dtau_dtau1_delta(int n, double tau, double tau1) const {
  cplx acc = 0.0;
  for (int j = 0; j <= n; ++j)
    acc += fid_->deriv(j, tau) * std::conj(fid_->deriv(n - j, tau1));
  return -2.0 * acc.imag();
}

CommutatorSeries commutator_series(const Background& bg, int N, const Grid& grid, double tol) {
  auto fid = std::make_shared<SeriesSolution>(
      series_fiducial(bg, N, cplx(1.0, 0.0), cplx(0.0, -0.5), grid, tol));
  return CommutatorSeries(fid, N);
}

std::vector<double> SleSeries::J_coeffs(double tau) const {
  // J_n = sum_j [2 c1_j (S S*)_{n-j} - 2 Re(c2_j ((S S)_{n-j})*)]
  std::vector<cplx> ss(N + 1), s2(N + 1);
  for (int n = 0; n <= N; ++n) {
    cplx a = 0.0, b = 0.0;
    for (int j = 0; j <= n; ++j) {
      a += fid->value(j, tau) * std::conj(fid->value(n - j, tau));
      b += fid->value(j, tau) * fid->value(n - j, tau);
    }
    ss[n] = a;
    s2[n] = b;
  }
  std::vector<double> J(N + 1, 0.0);
  for (int n = 0; n <= N; ++n)
    for (int j = 0; j <= n; ++j)
      J[n] += 2.0 * c1n[j] * ss[n - j].real() -
              2.0 * std::real(c2n[j] * std::conj(s2[n - j]));
  return J;
}

double SleSeries::energy(double p, int order) const {
  if (order < 0 || order > N) order = N;
  const double x = p * p;
  if (regime == Regime::massive) {
    std::vector<double> e(eps2.begin(), eps2.begin() + order + 1);
    std::vector<double> E = series_sqrt(e);
    double acc = 0.0, pw = 1.0;
    for (int n = 0; n <= order; ++n, pw *= x) acc += E[n] * pw;
    return acc;
  }
  // massless: E^2 = x (eps2[1] + eps2[2] x + ...)
  std::vector<double> shifted(eps2.begin() + 1, eps2.begin() + order + 1);
  if (shifted.empty()) throw DomainError("sle_series: massless energy needs order >= 1");
  std::vector<double> E = series_sqrt(shifted);
  double acc = 0.0, pw = 1.0;
  for (std::size_t n = 0; n < E.size(); ++n, pw *= x) acc += E[n] * pw;
  return p * acc;
}

double SleSeries::mod2(double p, double tau, int order) const {
  if (order < 0 || order > N) order = N;
  const double x = p * p;
  std::vector<double> J = J_coeffs(tau);
  J.resize(order + 1);
  if (regime == Regime::massive) {
    std::vector<double> e(eps2.begin(), eps2.begin() + order + 1);
    std::vector<double> denom = series_sqrt(e);
    for (double& c : denom) c *= 2.0;
    std::vector<double> m = series_div(J, denom);
    double acc = 0.0, pw = 1.0;
    for (int n = 0; n <= order; ++n, pw *= x) acc += m[n] * pw;
    return acc;
  }
  std::vector<double> shifted(eps2.begin() + 1, eps2.begin() + order + 1);
  if (shifted.empty()) throw DomainError("sle_series: massless mod2 needs order >= 1");
  std::vector<double> denom = series_sqrt(shifted);
  for (double& c : denom) c *= 2.0;
  std::vector<double> m = series_div(J, denom);
  double acc = 0.0, pw = 1.0;
  for (std::size_t n = 0; n < m.size(); ++n, pw *= x) acc += m[n] * pw;
  return acc / p;
}

SleSeries sle_series(const Background& bg, const WindowFunction& f, int N, const Grid& grid,
                     double tol) {
  if (N < 1) throw DomainError("sle_series: order must be >= 1");
  auto fid = std::make_shared<SeriesSolution>(
      series_fiducial(bg, N, cplx(1.0, 0.0), cplx(0.0, -0.5), grid, tol));

  SleSeries out;
  out.N = N;
  out.fid = fid;
  out.p_star = fid->p_star;
  out.tau0 = 0.5 * (f.tau_lo() + f.tau_hi());

  // c1_n, c2_n by adaptive quadrature over Hermite-interpolated coefficients
  out.c1n.assign(N + 1, 0.0);
  out.c2n.assign(N + 1, cplx(0.0));
  double scale_floor = 0.0;
  for (int n = 0; n <= N; ++n) {
    auto integ = [&](int which) {
      auto val = [&](double tau) {
        cplx h = 0.0, g = 0.0;
        for (int j = 0; j <= n; ++j) {
          const cplx sj = fid->value(j, tau), dj = fid->deriv(j, tau);
          const cplx sk = fid->value(n - j, tau), dk = fid->deriv(n - j, tau);
          if (which == 0)
            h += dj * std::conj(dk) + bg.omega0_sq(tau) * sj * std::conj(sk);
          else
            h += dj * dk + bg.omega0_sq(tau) * sj * sk;
        }
        if (n >= 1)
          for (int j = 0; j <= n - 1; ++j) {
            const cplx sj = fid->value(j, tau);
            const cplx sk = fid->value(n - 1 - j, tau);
            if (which == 0)
              g += bg.omega2_sq(tau) * sj * std::conj(sk);
            else
              g += bg.omega2_sq(tau) * sj * sk;
          }
        return 0.5 * (h + g);
      };
      QuadOptions opt;
      opt.rel_tol = std::max(tol, 1e-12);
      opt.max_intervals = 4000;
      auto extra = bg.tau_breakpoints(f.tau_lo(), f.tau_hi());
      opt.breakpoints.insert(opt.breakpoints.end(), extra.begin(), extra.end());
      if (which == 1) opt.abs_floor = std::max(opt.abs_floor, opt.rel_tol * scale_floor);
      return quad([&](double tau) { return f.f2_tau(tau) * val(tau); }, f.tau_lo(), f.tau_hi(),
                  opt);
    };
    scale_floor = 0.0;
    out.c1n[n] = integ(0).real();
    scale_floor = std::abs(out.c1n[n]) + (n > 0 ? std::abs(out.c1n[0]) : 0.0);
    out.c2n[n] = integ(1);
  }

  // (E^2)_n = (c1^2 - |c2|^2)_n
  out.eps2.assign(N + 1, 0.0);
  for (int n = 0; n <= N; ++n)
    for (int j = 0; j <= n; ++j)
      out.eps2[n] += out.c1n[j] * out.c1n[n - j] -
                     std::real(out.c2n[j] * std::conj(out.c2n[n - j]));

  // J_n, K_n at tau0 via the ssle14 form
  std::vector<double> Jn = out.J_coeffs(out.tau0);
  out.Jn_tau0 = Jn;
  out.Kn_tau0.assign(N + 1, 0.0);
  {
    std::vector<cplx> dd(N + 1), d2(N + 1);
    for (int n = 0; n <= N; ++n) {
      cplx a = 0.0, b = 0.0;
      for (int j = 0; j <= n; ++j) {
        a += fid->deriv(j, out.tau0) * std::conj(fid->deriv(n - j, out.tau0));
        b += fid->deriv(j, out.tau0) * fid->deriv(n - j, out.tau0);
      }
      dd[n] = a;
      d2[n] = b;
    }
    for (int n = 0; n <= N; ++n)
      for (int j = 0; j <= n; ++j)
        out.Kn_tau0[n] += 2.0 * out.c1n[j] * dd[n - j].real() -
                          2.0 * std::real(out.c2n[j] * std::conj(d2[n - j]));
  }

  // regime detection
  const double e_ref = std::abs(out.eps2[1]) + 1e-300;
  const double k_ref = std::abs(out.Kn_tau0[std::min(1, N)]) + 1e-300;
  const bool e0_zero = std::abs(out.eps2[0]) < 1e-10 * e_ref;
  const bool k0_zero = std::abs(out.Kn_tau0[0]) < 1e-10 * k_ref;
  if (e0_zero && k0_zero) {
    out.regime = SleSeries::Regime::massless;
    if (!(out.eps2[1] > 0.0)) throw ConsistencyError("sle_series: massless regime needs eps1 > 0");
  } else if (!e0_zero && out.Kn_tau0[0] > 0.0) {
    out.regime = SleSeries::Regime::massive;
  } else {
    throw ConsistencyError("sle_series: ambiguous regime (eps0 ~ 0 but K0 not, or vice versa)");
  }
  return out;
}

IrRecord ir_limit(const Background& bg, const WindowFunction& f,
                  const std::vector<double>& p_values, const Grid& grid) {
  IrRecord rec;
  rec.abar_target = abar(bg, f);
  const double tau_c = 0.5 * (f.tau_lo() + f.tau_hi());
  const double tau_a = tau_c - 0.2 * (f.tau_hi() - f.tau_lo());
  const double tau_b = tau_c + 0.25 * (f.tau_hi() - f.tau_lo());
  const double f2n = window_norm(f);

  for (double p : p_values) {
    CommutatorTable table(bg, p, grid, tau_c);
    SLEResult res = sle_from_commutator(table, f, bg, tau_c);
    rec.p_values.push_back(p);
    rec.two_p_mod2.push_back(2.0 * p * std::norm(res.mode.traj.eval(tau_c)));
    if (p == p_values.back()) {
      const cplx W = two_point(res, tau_a, tau_b);
      rec.imW_error = std::abs(W.imag() + 0.5 * (tau_a - tau_b));
      rec.energy_rel_error =
          std::abs(res.energy / (p / (2.0 * rec.abar_target) * f2n) - 1.0);
    }
  }
  // p^2-model extrapolation from the two smallest p
  if (rec.p_values.size() >= 2) {
    const std::size_t n = rec.p_values.size();
    const double p1 = rec.p_values[n - 2], p2 = rec.p_values[n - 1];
    const double f1 = rec.two_p_mod2[n - 2], f2 = rec.two_p_mod2[n - 1];
    rec.extrapolated = (f2 * p1 * p1 - f1 * p2 * p2) / (p1 * p1 - p2 * p2);
  } else if (!rec.p_values.empty()) {
    rec.extrapolated = rec.two_p_mod2.back();
  }
  return rec;
}

CrosscheckRecord fiducial_free_crosscheck(const Background& bg, const WindowFunction& f, double p,
                                          const Grid& grid) {
  CrosscheckRecord rec;
  const double ab = abar(bg, f);
  const double tau_c = 0.5 * (f.tau_lo() + f.tau_hi());

  auto fiducial_route = [&](cplx z0, cplx w0) {
    LinearOde2 ode;
    ode.w = [bg, p](double tau) { return bg.omega_p_sq(p, tau); };
    ModeSolution S;
    S.p = p;
    S.traj = integrate_ode(ode, z0, w0, grid, 1e-12, grid.lo(),
                           bg.tau_breakpoints(grid.lo(), grid.hi()));
    S.wronskian_residual = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i)
      S.wronskian_residual =
          std::max(S.wronskian_residual,
                   std::abs(wronskian(S.traj.value[i], S.traj.deriv[i]) + cplx(0, 1)));
    EnergyPair pair = energy_functionals(S, f, bg);
    BogoliubovCoeffs bc = minimize_bogoliubov(pair);
    SLEResult res = sle_from_fiducial(S, f, bg);
    return std::make_pair(bc, res);
  };

  const cplx z0(1.0, 0.0), w0(0.0, -0.5);
  auto [bc1, res1] = fiducial_route(z0, w0);
  // second data set; with z real the Wronskian constraint fixes Im(w) = -1/(2z)
  const cplx z0c(2.0, 0.0), w0c(0.3, -0.25);
  auto [bc2, res2] = fiducial_route(z0c, w0c);

  CommutatorTable table(bg, p, grid, tau_c);
  SLEResult resc = sle_from_commutator(table, f, bg, tau_c);

  rec.mu_sqrtp = std::abs(bc1.mu) * std::sqrt(p);
  rec.mu_limit = std::abs(w0) * std::sqrt(ab / 2.0);
  rec.mu_data_spread = std::abs(std::abs(bc1.mu) - std::abs(bc2.mu));

  const double span = f.tau_hi() - f.tau_lo();
  double err_route = 0.0, err_data = 0.0;
  for (int i = 0; i < 5; ++i) {
    const double ta = f.tau_lo() + span * (0.15 + 0.12 * i);
    const double tb = f.tau_lo() + span * (0.8 - 0.1 * i);
    const cplx w_fid = two_point(res1, ta, tb);
    const cplx w_fid2 = two_point(res2, ta, tb);
    const cplx w_com = two_point(resc, ta, tb);
    err_route = std::max(err_route, std::abs(w_fid - w_com));
    err_data = std::max(err_data, std::abs(w_fid - w_fid2));
  }
  rec.twopoint_route_error = err_route;
  rec.twopoint_data_error = err_data;
  return rec;
}

}  // namespace sle
