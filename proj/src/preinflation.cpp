#include "sle/preinflation.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "sle/errors.hpp"
#include "sle/special.hpp"

namespace sle {

namespace {
constexpr double kTwoPiSq = 4.0 * M_PI * M_PI;  // (2 pi)^2
}

PreInflationModel PreInflationModel::create(double H) {
  PreInflationModel m{H, Background::preinflation(H)};
  return m;
}

namespace {

FiducialModeValue fiducial_eval(const PreInflationModel& model, const MatchingCoeffs& mc,
                                double p, double eta) {
  const double H = model.H;
  if (eta >= 0.0) {
    const cplx E = std::exp(cplx(0.0, -p * (eta - 1.0 / H)));
    const double x = 1.0 - H * eta;
    FiducialModeValue v;
    v.S = E / std::sqrt(2.0 * p) * cplx(x, H / p);
    v.dS_deta = cplx(0.0, -p) * x * E / std::sqrt(2.0 * p);
    return v;
  }
  const double x = p * (eta + 0.5 / H);
  const double pref = std::sqrt(M_PI / (8.0 * H));
  const cplx skin = pref * hankel(2, 0, x);
  const cplx dskin = -pref * p * hankel(2, 1, x);  // d/dx H0 = -H1
  FiducialModeValue v;
  v.S = mc.alpha * skin + mc.beta * std::conj(skin);
  v.dS_deta = mc.alpha * dskin + mc.beta * std::conj(dskin);
  return v;
}

}  // namespace

FiducialModeValue fiducial_mode(const PreInflationModel& model, double p, double eta) {
  const double H = model.H;
  if (!(p > 0.0)) throw DomainError("fiducial_mode: p must be positive");
  if (!(eta > -0.5 / H && eta < 1.0 / H))
    throw DomainError("fiducial_mode: eta outside (-1/(2H), 1/H)");
  return fiducial_eval(model, eta < 0.0 ? matching_coeffs(model, p) : MatchingCoeffs{}, p, eta);
}

MatchingCoeffs matching_coeffs(const PreInflationModel& model, double p) {
  const double H = model.H;
  if (!(p > 0.0)) throw DomainError("matching_coeffs: p must be positive");
  const double x = p / (2.0 * H);
  const cplx pref = std::exp(cplx(0.0, p / H)) * std::sqrt(M_PI * p / (16.0 * H));
  const cplx h0_1 = hankel(1, 0, x), h1_1 = hankel(1, 1, x);
  const cplx h0_2 = hankel(2, 0, x), h1_2 = hankel(2, 1, x);
  const cplx hp(H / p, -1.0);
  MatchingCoeffs mc;
  mc.alpha = pref * (h0_1 - hp * h1_1);
  mc.beta = pref * (-h0_2 + hp * h1_2);
  return mc;
}

namespace {

QuadOptions eta_quad_options(const PreInflationModel& model, const WindowFunction& f, double p,
                             double tol) {
  QuadOptions opt;
  opt.rel_tol = tol;
  const double span = f.t2() - f.t1();
  opt.max_intervals = static_cast<int>(std::min(80000.0, 2000.0 + 40.0 * p * span));
  if (f.t1() < 0.0 && f.t2() > 0.0) opt.breakpoints.push_back(0.0);
  (void)model;
  return opt;
}

}  // namespace

EnergyPair sle_parameters(const PreInflationModel& model, const WindowFunction& f, double p,
                          double quad_tol) {
  const double H = model.H;
  if (!(f.t1() > -0.5 / H && f.t2() < 1.0 / H))
    throw DomainError("sle_parameters: window support must lie inside (-1/(2H), 1/H)");
  const Background& bg = model.bg;
  QuadOptions opt = eta_quad_options(model, f, p, quad_tol);
  const MatchingCoeffs mc = f.t1() < 0.0 ? matching_coeffs(model, p) : MatchingCoeffs{};

  auto c1_integrand = [&](double eta) {
    const FiducialModeValue v = fiducial_eval(model, mc, p, eta);
    const double a = bg.a_of_t(eta);
    return f.f2_gauge(eta) * a * a * (std::norm(v.dS_deta) + p * p * std::norm(v.S));
  };
  auto c2_integrand = [&](double eta) {
    const FiducialModeValue v = fiducial_eval(model, mc, p, eta);
    const double a = bg.a_of_t(eta);
    return f.f2_gauge(eta) * a * a * (v.dS_deta * v.dS_deta + p * p * v.S * v.S);
  };
  EnergyPair pair;
  pair.c1 = 0.5 * quad(c1_integrand, f.t1(), f.t2(), opt);
  QuadOptions copt = opt;  // c2 decays fast at large p; target accuracy at the c1 scale
  copt.abs_floor = std::max(copt.abs_floor, opt.rel_tol * pair.c1);
  pair.c2 = 0.5 * quad(c2_integrand, f.t1(), f.t2(), copt);
  return pair;
}

double power_spectrum(const PreInflationModel& model, const WindowFunction& f, double p,
                      double quad_tol) {
  const EnergyPair pair = sle_parameters(model, f, p, quad_tol);
  const double disc = pair.c1 * pair.c1 - std::norm(pair.c2);
  if (!(disc > 0.0)) throw ConsistencyError("power_spectrum: c1 <= |c2|");
  const double P =
      model.H * model.H / kTwoPiSq * (pair.c1 + pair.c2.real()) / std::sqrt(disc);
  if (!(P > 0.0) || !std::isfinite(P))
    throw ConsistencyError("power_spectrum: non-positive or non-finite result");
  return P;
}

double power_spectrum_commutator_route(const PreInflationModel& model, const WindowFunction& f,
                                       double p, double quad_tol) {
  const double H = model.H;
  const Background& bg = model.bg;
  const double eta_end = (1.0 - 1e-5) / H;
  const double eta_lo = f.t1() - 0.02 * (f.t2() - f.t1());
  const double eta_r = 0.5 * (f.t1() + f.t2());

  // S-form mode equation in conformal time: S'' + 2 (a'/a) S' + p^2 S = 0
  LinearOde2 ode;
  ode.w = [p](double) { return p * p; };
  ode.q = [H](double eta) {
    if (eta < 0.0) return 2.0 * H / (1.0 + 2.0 * H * eta);
    return 2.0 * H / (1.0 - H * eta);
  };

  const double ar2 = std::pow(bg.a_of_t(eta_r), 2);
  Grid grid = Grid::uniform(eta_lo, eta_end, 1024);
  std::vector<double> breaks;
  if (eta_lo < 0.0) breaks.push_back(0.0);
  ComplexTrajectory u = integrate_ode(ode, 1.0, 0.0, grid, 1e-12, eta_r, breaks);
  ComplexTrajectory v = integrate_ode(ode, 0.0, 1.0 / ar2, grid, 1e-12, eta_r, breaks);

  // quadratic-form base integrals J_ab = 1/2 int f^2 a^2 (a' b' + p^2 a b)
  QuadOptions opt = eta_quad_options(model, f, p, quad_tol);
  auto base = [&](const ComplexTrajectory& x, const ComplexTrajectory& y) {
    return 0.5 * quad(
                     [&](double eta) {
                       const double a = bg.a_of_t(eta);
                       return f.f2_gauge(eta) * a * a *
                              (x.eval_deriv(eta).real() * y.eval_deriv(eta).real() +
                               p * p * x.eval(eta).real() * y.eval(eta).real());
                     },
                     f.t1(), f.t2(), opt);
  };
  const double Juu = base(u, u), Juv = base(u, v), Jvv = base(v, v);
  auto J_at = [&](double uu, double vv) {
    return Jvv * uu * uu - 2.0 * Juv * uu * vv + Juu * vv * vv;
  };

  // nested energy integral E^2 = 1/4 int f^2 [K + w_p^2 J] dtau, in eta form
  auto e2_integrand = [&](double eta) {
    const double a = bg.a_of_t(eta);
    const double a2 = a * a;
    const double uu = u.eval(eta).real(), vv = v.eval(eta).real();
    const double du = u.eval_deriv(eta).real(), dv = v.eval_deriv(eta).real();
    const double J = J_at(uu, vv);
    const double K = Jvv * (a2 * du) * (a2 * du) - 2.0 * Juv * (a2 * du) * (a2 * dv) +
                     Juu * (a2 * dv) * (a2 * dv);
    // dtau = a^-2 deta, w_p^2 = p^2 a^4
    return f.f2_gauge(eta) / a2 * (K + p * p * a2 * a2 * J);
  };
  const double E = std::sqrt(0.25 * quad(e2_integrand, f.t1(), f.t2(), opt));

  // endpoint extrapolation: u' ~ C (1-H eta)^2 near the seed time
  const double xe = 1.0 - H * eta_end;
  const double u_star = u.eval(eta_end).real() + u.eval_deriv(eta_end).real() * xe / (3.0 * H);
  const double v_star = v.eval(eta_end).real() + v.eval_deriv(eta_end).real() * xe / (3.0 * H);
  const double J_star = J_at(u_star, v_star);

  return p * p * p / (2.0 * M_PI * M_PI) * J_star / (2.0 * E);
}

SpectrumTable spectrum_scan(const PreInflationModel& model, const WindowFunction& f,
                            const std::vector<double>& p_grid, double quad_tol, int threads) {
  for (std::size_t i = 0; i < p_grid.size(); ++i) {
    if (!(p_grid[i] > 0.0)) throw DomainError("spectrum_scan: p grid must be positive");
    if (i > 0 && !(p_grid[i] > p_grid[i - 1]))
      throw DomainError("spectrum_scan: p grid must be ascending");
  }
  SpectrumTable table;
  table.window_descriptor = f.name();
  table.kinetic_only = f.t2() <= 0.0;
  table.p_over_H.resize(p_grid.size());
  table.P.resize(p_grid.size());
  table.P_normalized.resize(p_grid.size());

  const int n_threads = threads > 0
                            ? threads
                            : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::thread> pool;
  std::atomic<std::size_t> next{0};
  std::vector<std::string> errors(p_grid.size());
  auto worker = [&]() {
    for (;;) {
      const std::size_t i = next.fetch_add(1);
      if (i >= p_grid.size()) return;
      try {
        const double P = power_spectrum(model, f, p_grid[i], quad_tol);
        table.p_over_H[i] = p_grid[i] / model.H;
        table.P[i] = P;
        table.P_normalized[i] = P * kTwoPiSq / (model.H * model.H);
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  for (const auto& e : errors)
    if (!e.empty()) throw ConsistencyError("spectrum_scan: " + e);
  return table;
}

SmallPExtensionRecord smallp_extension_check(const PreInflationModel& model,
                                             const WindowFunction& f, double p, int order) {
  const double H = model.H;
  const double eta_star = 1.0 / H;
  const double eta_lo = std::max(f.t1() - 0.05 * (f.t2() - f.t1()), -0.499 / H);
  const int n_pts = 800;
  Grid grid = Grid::uniform(eta_lo, eta_star, n_pts);

  auto a2 = [H](double eta) {
    return eta < 0.0 ? 1.0 + 2.0 * H * eta : 1.0 / ((1.0 - H * eta) * (1.0 - H * eta));
  };
  auto da2 = [H](double eta) {  // d(a^2)/deta
    return eta < 0.0 ? 2.0 * H : 2.0 * H / std::pow(1.0 - H * eta, 3);
  };
  // tau with base eta = 0 (any base cancels in differences)
  auto tau_of = [H](double eta) {
    return eta < 0.0 ? std::log(1.0 + 2.0 * H * eta) / (2.0 * H)
                     : (1.0 - std::pow(1.0 - H * eta, 3)) / (3.0 * H);
  };

  // endpoint-regular S_0 and its eta derivative
  auto S0 = [&](double eta) {
    return cplx(tau_of(eta) - 1.0 / (3.0 * H), 1.0) / std::sqrt(2.0);
  };
  auto dS0 = [&](double eta) { return cplx(1.0 / (a2(eta) * std::sqrt(2.0)), 0.0); };

  SmallPExtensionRecord rec;
  rec.S0_end = S0(eta_star);
  rec.dS0_end = dS0(eta_star);  // a^2 diverges at eta*, IEEE gives the limit 0

  // p = 0 equation residual on the kinetic branch: S0'' + 2(a'/a) S0'
  double kin_res = 0.0;
  for (int i = 1; i <= 8; ++i) {
    const double eta = -0.45 / H + i * 0.05 / H;
    if (eta >= 0.0) break;
    const double x = 1.0 + 2.0 * H * eta;
    const double ddS0 = -2.0 * H / (std::sqrt(2.0) * x * x);
    const double aprime_over_a = H / x;
    const double res = ddS0 + 2.0 * aprime_over_a * (1.0 / (std::sqrt(2.0) * x));
    kin_res = std::max(kin_res, std::abs(res) * std::sqrt(2.0) * x * x / (2.0 * H));
  }
  rec.kinetic_ode_residual = kin_res;

  // conformal-form Wronskian residual of S_0
  double wr = 0.0;
  for (int i = 0; i < n_pts - 1; i += 37) {
    const double eta = grid[i];
    const cplx w = dS0(eta) * std::conj(S0(eta)) - S0(eta) * std::conj(dS0(eta));
    wr = std::max(wr, std::abs(w + cplx(0.0, 1.0) / a2(eta)));
  }
  rec.wronskian_residual = wr;

  // series coefficients on the grid: S_n(eta) = -int (tau(eta)-tau(eta'))a^2 S_{n-1}
  std::vector<std::vector<cplx>> S(order + 1, std::vector<cplx>(n_pts));
  std::vector<std::vector<cplx>> dS(order + 1, std::vector<cplx>(n_pts));
  std::vector<double> tau_v(n_pts);
  for (int i = 0; i < n_pts; ++i) {
    tau_v[i] = tau_of(grid[i]);
    S[0][i] = S0(grid[i]);
    dS[0][i] = i + 1 == n_pts ? cplx(0.0) : dS0(grid[i]);
  }

  for (int n = 1; n <= order; ++n) {
    // dS_n = -a^-2 int a^2 S_{n-1}; regular below eta*, limit 0 at eta*
    std::vector<cplx> G(n_pts, 0.0);
    for (int i = 1; i + 1 < n_pts; ++i) {
      const double h = grid[i] - grid[i - 1];
      const cplx f0 = a2(grid[i - 1]) * S[n - 1][i - 1];
      const cplx f1 = a2(grid[i]) * S[n - 1][i];
      const cplx df0 = da2(grid[i - 1]) * S[n - 1][i - 1] + a2(grid[i - 1]) * dS[n - 1][i - 1];
      const cplx df1 = da2(grid[i]) * S[n - 1][i] + a2(grid[i]) * dS[n - 1][i];
      G[i] = G[i - 1] + 0.5 * h * (f0 + f1) + h * h / 12.0 * (df0 - df1);
    }
    for (int i = 0; i + 1 < n_pts; ++i) dS[n][i] = -G[i] / a2(grid[i]);
    dS[n][n_pts - 1] = 0.0;

    // S_n by the unsplit nested integral (stable at the seed time)
    for (int k = 0; k < n_pts; ++k) {
      cplx acc = 0.0;
      for (int i = 1; i <= k; ++i) {
        const double h = grid[i] - grid[i - 1];
        auto F = [&](int idx) -> cplx {
          if (idx == k) return 0.0;  // tau_k - tau(eta_k) = 0
          return (tau_v[k] - tau_v[idx]) * a2(grid[idx]) * S[n - 1][idx];
        };
        auto dF = [&](int idx) -> cplx {
          if (idx + 1 == n_pts) return -S[n - 1][idx] / 3.0;  // analytic limit at eta*
          const cplx t1 = -S[n - 1][idx];
          const cplx t2 = (tau_v[k] - tau_v[idx]) *
                          (da2(grid[idx]) * S[n - 1][idx] + a2(grid[idx]) * dS[n - 1][idx]);
          return t1 + t2;
        };
        acc += 0.5 * h * (F(i - 1) + F(i)) + h * h / 12.0 * (dF(i - 1) - dF(i));
      }
      S[n][k] = -acc;
    }
  }

  // sum the series and its derivative
  auto sum_at = [&](int i) {
    cplx s = 0.0, d = 0.0;
    double pw = 1.0;
    for (int n = 0; n <= order; ++n, pw *= p * p) {
      s += pw * S[n][i];
      d += pw * dS[n][i];
    }
    return std::make_pair(s, d);
  };

  // c1, c2 quadratures over the window via Hermite interpolation
  auto interp = [&](double eta) {
    const std::size_t i = grid.locate(eta);
    const double h = grid[i + 1] - grid[i];
    const double x = (eta - grid[i]) / h;
    const double x2 = x * x, x3 = x2 * x;
    auto [s0v, d0v] = sum_at(static_cast<int>(i));
    auto [s1v, d1v] = sum_at(static_cast<int>(i) + 1);
    const cplx sv = s0v * (2 * x3 - 3 * x2 + 1) + d0v * (h * (x3 - 2 * x2 + x)) +
                    s1v * (-2 * x3 + 3 * x2) + d1v * (h * (x3 - x2));
    const cplx dv = s0v * ((6 * x2 - 6 * x) / h) + d0v * (3 * x2 - 4 * x + 1) +
                    s1v * ((-6 * x2 + 6 * x) / h) + d1v * (3 * x2 - 2 * x);
    return std::make_pair(sv, dv);
  };

  QuadOptions opt = eta_quad_options(model, f, p, 1e-11);
  const double c1 = 0.5 * quad(
                              [&](double eta) {
                                auto [sv, dv] = interp(eta);
                                const double aa = a2(eta);
                                return f.f2_gauge(eta) * aa *
                                       (std::norm(dv) + p * p * std::norm(sv));
                              },
                              f.t1(), f.t2(), opt);
  QuadOptions copt = opt;
  copt.abs_floor = std::max(copt.abs_floor, opt.rel_tol * c1);
  const cplx c2 = 0.5 * quad(
                            [&](double eta) {
                              auto [sv, dv] = interp(eta);
                              const double aa = a2(eta);
                              return cplx(f.f2_gauge(eta) * aa) * (dv * dv + p * p * sv * sv);
                            },
                            f.t1(), f.t2(), copt);

  cplx S_star = 0.0;
  double pw = 1.0;
  for (int n = 0; n <= order; ++n, pw *= p * p) S_star += pw * S[n][n_pts - 1];

  const double E = std::sqrt(c1 * c1 - std::norm(c2));
  const double J_star = 2.0 * c1 * std::norm(S_star) -
                        2.0 * std::real(c2 * std::conj(S_star * S_star));
  rec.P_series = p * p * p / (2.0 * M_PI * M_PI) * J_star / (2.0 * E);
  rec.P_direct = power_spectrum(model, f, p);
  rec.rel_diff = std::abs(rec.P_series / rec.P_direct - 1.0);
  return rec;
}

}  // namespace sle
