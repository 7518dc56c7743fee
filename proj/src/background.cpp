#include "sle/background.hpp"

#include <algorithm>
#include <cmath>

#include "sle/errors.hpp"

namespace sle {

std::string to_string(Gauge g) {
  switch (g) {
    case Gauge::cosmological: return "cosmological";
    case Gauge::conformal: return "conformal";
    case Gauge::proper: return "proper";
  }
  return "?";
}

namespace {
// exponent of a in nbar = Nbar / a^d
int nbar_exponent(Gauge g, int d) {
  switch (g) {
    case Gauge::cosmological: return -d;
    case Gauge::conformal: return 1 - d;
    case Gauge::proper: return 0;
  }
  return 0;
}
}  // namespace

struct Background::Core {
  std::string kind;
  int d = 3;
  Gauge gauge = Gauge::proper;
  double t_lo = 0, t_hi = 1;
  int max_ord = 8;

  std::function<Jet(double, int)> a_t;  // jets in gauge time
  std::function<Jet(double, int)> m_t;

  // closed-form tau maps with arbitrary base point (raw); empty -> numeric
  std::function<double(double)> tau_raw;
  std::function<double(double)> t_from_tau_raw;
  // closed-form jets in raw tau; empty -> composed through the gauge map
  std::function<Jet(double, int)> a_tau_raw;

  std::vector<double> t_breaks;
  double win_lo = 0, win_hi = 0;
  double tau_off = 0;

  // numeric tau map table (monotone); nodes in t with tau values and nbar
  std::vector<double> map_t, map_tau, map_nbar;

  Jet nbar_jet(double t, int ord) const {
    return pow_int(a_t(t, ord), nbar_exponent(gauge, d));
  }
  double nbar(double t) const { return nbar_jet(t, 0).value(); }

  void build_numeric_map() {
    const int n = 4096;
    map_t.resize(n + 1);
    map_tau.resize(n + 1);
    map_nbar.resize(n + 1);
    const double h = (t_hi - t_lo) / n;
    double acc = 0.0;
    double g_prev = 0, gp_prev = 0;
    for (int i = 0; i <= n; ++i) {
      const double t = t_lo + i * h;
      Jet nb = nbar_jet(t, 1);
      const double g = nb.value();
      const double gp = nb.deriv(1);
      map_t[i] = t;
      map_nbar[i] = g;
      if (i > 0) acc += 0.5 * h * (g_prev + g) + h * h / 12.0 * (gp_prev - gp);
      map_tau[i] = acc;
      g_prev = g;
      gp_prev = gp;
    }
  }

  double tau_of_t_num(double t) const {
    const double h = (t_hi - t_lo) / (map_t.size() - 1);
    std::size_t i = std::min<std::size_t>(
        map_t.size() - 2, static_cast<std::size_t>(std::max(0.0, (t - t_lo) / h)));
    // Hermite between nodes: tau' = nbar
    const double x = (t - map_t[i]) / h;
    const double y0 = map_tau[i], y1 = map_tau[i + 1];
    const double d0 = map_nbar[i] * h, d1 = map_nbar[i + 1] * h;
    const double x2 = x * x, x3 = x2 * x;
    return y0 * (2 * x3 - 3 * x2 + 1) + d0 * (x3 - 2 * x2 + x) + y1 * (-2 * x3 + 3 * x2) +
           d1 * (x3 - x2);
  }

  double t_from_tau_num(double tau) const {
    auto it = std::upper_bound(map_tau.begin(), map_tau.end(), tau);
    std::size_t i = it == map_tau.begin() ? 0 : (it - map_tau.begin()) - 1;
    i = std::min(i, map_tau.size() - 2);
    double t = map_t[i] + (tau - map_tau[i]) / std::max(map_nbar[i], 1e-300);
    t = std::clamp(t, t_lo, t_hi);
    for (int k = 0; k < 40; ++k) {
      const double f = tau_of_t_num(t) - tau;
      const double df = std::max(nbar(t), 1e-300);
      const double step = f / df;
      t = std::clamp(t - step, t_lo, t_hi);
      if (std::abs(step) < 1e-15 * (1.0 + std::abs(t))) break;
    }
    return t;
  }
};

Background::Background(std::shared_ptr<const Core> core) : core_(std::move(core)) {}

int Background::dim() const { return core_->d; }
Gauge Background::gauge() const { return core_->gauge; }
const std::string& Background::kind() const { return core_->kind; }
double Background::t_lo() const { return core_->t_lo; }
double Background::t_hi() const { return core_->t_hi; }
int Background::max_deriv_order() const { return core_->max_ord; }

double Background::a_of_t(double t) const { return core_->a_t(t, 0).value(); }
double Background::m_of_t(double t) const { return core_->m_t(t, 0).value(); }
Jet Background::a_t_jet(double t, int ord) const { return core_->a_t(t, ord); }
Jet Background::m_t_jet(double t, int ord) const { return core_->m_t(t, ord); }
double Background::lapse_density(double t) const { return core_->nbar(t); }

double Background::tau_of_t(double t) const {
  if (t < core_->t_lo - 1e-12 * (core_->t_hi - core_->t_lo) ||
      t > core_->t_hi + 1e-12 * (core_->t_hi - core_->t_lo))
    throw DomainError("tau_of_t: t outside working interval");
  if (core_->tau_raw) return core_->tau_raw(t) - core_->tau_off;
  return core_->tau_of_t_num(t);
}

double Background::t_of_tau(double tau) const {
  if (core_->t_from_tau_raw) return core_->t_from_tau_raw(tau + core_->tau_off);
  return core_->t_from_tau_num(tau);
}

double Background::tau_hi() const { return tau_of_t(core_->t_hi); }

Jet Background::a_tau_jet(double tau, int ord) const {
  ord = std::min(ord, core_->max_ord);
  if (core_->a_tau_raw) return core_->a_tau_raw(tau + core_->tau_off, ord);
  // compose a(t) with the jet of t(tau) obtained from t'(tau) = 1/nbar(t)
  const double t0 = t_of_tau(tau);
  Jet g = core_->nbar_jet(t0, ord).reciprocal();
  Jet T = Jet::constant(t0, ord);
  for (int k = 0; k < ord; ++k) {
    Jet G = compose(g, T);
    T.set_coeff(k + 1, G.coeff(k) / (k + 1));
  }
  return compose(core_->a_t(t0, ord), T);
}

Jet Background::m_tau_jet(double tau, int ord) const {
  ord = std::min(ord, core_->max_ord);
  const double t0 = t_of_tau(tau);
  Jet mj = core_->m_t(t0, ord);
  bool constant = true;
  for (int k = 1; k <= mj.order(); ++k) constant = constant && mj.coeff(k) == 0.0;
  if (constant) return mj;
  Jet g = core_->nbar_jet(t0, ord).reciprocal();
  Jet T = Jet::constant(t0, ord);
  for (int k = 0; k < ord; ++k) {
    Jet G = compose(g, T);
    T.set_coeff(k + 1, G.coeff(k) / (k + 1));
  }
  return compose(mj, T);
}

double Background::a_of_tau(double tau) const { return a_tau_jet(tau, 0).value(); }

double Background::omega0_sq(double tau) const {
  const double m = m_tau_jet(tau, 0).value();
  if (m == 0.0) return 0.0;
  const double a = a_of_tau(tau);
  return std::pow(a, 2 * core_->d) * m * m;
}

double Background::omega2_sq(double tau) const {
  const double a = a_of_tau(tau);
  return std::pow(a, 2 * core_->d - 2);
}

double Background::omega_p_sq(double p, double tau) const {
  return omega0_sq(tau) + p * p * omega2_sq(tau);
}

Jet Background::omega0_sq_jet(double tau, int ord) const {
  Jet m = m_tau_jet(tau, ord);
  Jet a = a_tau_jet(tau, ord);
  return pow_int(a, 2 * core_->d) * m * m;
}

Jet Background::omega2_sq_jet(double tau, int ord) const {
  return pow_int(a_tau_jet(tau, ord), 2 * core_->d - 2);
}

std::vector<double> Background::tau_breakpoints(double lo, double hi) const {
  std::vector<double> out;
  for (double tb : core_->t_breaks) {
    const double tau = tau_of_t(tb);
    if (tau > lo && tau < hi) out.push_back(tau);
  }
  return out;
}

double Background::min_window_t() const { return core_->win_lo; }
double Background::max_window_t() const { return core_->win_hi; }

// ---------------------------------------------------------------------------
// factories

Background Background::minkowski(double m0, double t_lo, double t_hi, int d) {
  if (!(m0 >= 0.0)) throw DomainError("minkowski: m0 must be >= 0");
  auto core = std::make_shared<Core>();
  core->kind = "minkowski";
  core->d = d;
  core->gauge = Gauge::proper;
  core->t_lo = t_lo;
  core->t_hi = t_hi;
  core->max_ord = 12;
  core->a_t = [](double, int ord) { return Jet::constant(1.0, ord); };
  core->m_t = [m0](double, int ord) { return Jet::constant(m0, ord); };
  core->tau_raw = [](double t) { return t; };
  core->t_from_tau_raw = [](double tau) { return tau; };
  core->a_tau_raw = [](double, int ord) { return Jet::constant(1.0, ord); };
  core->tau_off = t_lo;
  core->win_lo = t_lo;
  core->win_hi = t_hi;
  return Background(core);
}

Background Background::power_law(double nu, double rate, double t_lo, double t_hi, int d) {
  auto core = std::make_shared<Core>();
  core->d = d;
  core->gauge = Gauge::proper;
  core->t_lo = t_lo;
  core->t_hi = t_hi;
  core->max_ord = 12;
  core->m_t = [](double, int ord) { return Jet::constant(0.0, ord); };
  core->tau_raw = [](double t) { return t; };
  core->t_from_tau_raw = [](double tau) { return tau; };
  core->tau_off = t_lo;
  if (nu == 0.0) {
    core->kind = "power_law0";
    core->a_t = [rate](double t, int ord) { return exp(rate * Jet::variable(t, ord)); };
  } else {
    if (!(t_lo > 0.0)) throw DomainError("power_law: working interval must have t_lo > 0");
    const double k = (1.0 - 2.0 * nu) / (2.0 * (d - 1) * nu);
    core->kind = "power_law";
    core->a_t = [rate, k](double t, int ord) { return pow(rate * Jet::variable(t, ord), k); };
  }
  core->a_tau_raw = core->a_t;
  core->win_lo = t_lo;
  core->win_hi = t_hi;
  return Background(core);
}

Background Background::desitter(double H, double t_lo, double t_hi, int d) {
  if (!(H > 0.0)) throw DomainError("desitter: H must be positive");
  if (!(t_hi < 1.0 / H)) throw DomainError("desitter: working interval must end before 1/H");
  auto core = std::make_shared<Core>();
  core->kind = "desitter";
  core->d = d;
  core->gauge = Gauge::conformal;
  core->t_lo = t_lo;
  core->t_hi = t_hi;
  core->max_ord = 12;
  const double dd = d;
  core->a_t = [H](double eta, int ord) { return pow(1.0 - H * Jet::variable(eta, ord), -1.0); };
  core->m_t = [](double, int ord) { return Jet::constant(0.0, ord); };
  core->tau_raw = [H, dd](double eta) {
    return (1.0 - std::pow(1.0 - H * eta, dd)) / (dd * H);
  };
  core->t_from_tau_raw = [H, dd](double tau) {
    return (1.0 - std::pow(1.0 - dd * H * tau, 1.0 / dd)) / H;
  };
  core->a_tau_raw = [H, dd](double tau, int ord) {
    return pow(1.0 - dd * H * Jet::variable(tau, ord), -1.0 / dd);
  };
  core->tau_off = core->tau_raw(t_lo);
  core->win_lo = t_lo;
  core->win_hi = t_hi;
  return Background(core);
}

Background Background::preinflation(double H) {
  if (!(H > 0.0)) throw DomainError("preinflation: H must be positive");
  auto core = std::make_shared<Core>();
  core->kind = "preinflation";
  core->d = 3;
  core->gauge = Gauge::conformal;
  core->t_lo = -(1.0 - 2e-3) / (2.0 * H);
  core->t_hi = (1.0 - 1e-6) / H;
  core->max_ord = 12;
  core->a_t = [H](double eta, int ord) {
    Jet e = Jet::variable(eta, ord);
    if (eta < 0.0) return sqrt(1.0 + 2.0 * H * e);
    return pow(1.0 - H * e, -1.0);
  };
  core->m_t = [](double, int ord) { return Jet::constant(0.0, ord); };
  core->tau_raw = [H](double eta) {
    if (eta < 0.0) return std::log(1.0 + 2.0 * H * eta) / (2.0 * H);
    return (1.0 - std::pow(1.0 - H * eta, 3)) / (3.0 * H);
  };
  core->t_from_tau_raw = [H](double tau) {
    if (tau < 0.0) return (std::exp(2.0 * H * tau) - 1.0) / (2.0 * H);
    return (1.0 - std::cbrt(1.0 - 3.0 * H * tau)) / H;
  };
  core->a_tau_raw = [H](double tau, int ord) {
    if (tau < 0.0) return exp(H * Jet::variable(tau, ord));
    return pow(1.0 - 3.0 * H * Jet::variable(tau, ord), -1.0 / 3.0);
  };
  core->tau_off = core->tau_raw(core->t_lo);
  core->t_breaks = {0.0};
  core->win_lo = -0.5 / H + 1e-3 / H;
  core->win_hi = (1.0 - 2e-6) / H;
  return Background(core);
}

Background Background::tabulated(Gauge g, int d, std::vector<double> t_samples,
                                 std::vector<double> a_samples, double m0) {
  if (t_samples.size() != a_samples.size() || t_samples.size() < 8)
    throw DomainError("tabulated: need matching sample arrays with at least 8 points");
  for (std::size_t i = 1; i < t_samples.size(); ++i)
    if (!(t_samples[i] > t_samples[i - 1]))
      throw DomainError("tabulated: sample times must be strictly increasing");
  for (double a : a_samples)
    if (!(a > 0.0)) throw DomainError("tabulated: scale factor samples must be positive");

  auto ts = std::make_shared<std::vector<double>>(std::move(t_samples));
  auto as = std::make_shared<std::vector<double>>(std::move(a_samples));

  // local quintic interpolation through the six nearest samples
  auto a_jet = [ts, as](double t, int ord) {
    const auto& tv = *ts;
    const auto& av = *as;
    std::size_t i = std::upper_bound(tv.begin(), tv.end(), t) - tv.begin();
    std::size_t lo = i > 3 ? i - 3 : 0;
    lo = std::min(lo, tv.size() - 6);
    // Newton divided differences on six points
    double xs[6], fs[6];
    for (int k = 0; k < 6; ++k) {
      xs[k] = tv[lo + k];
      fs[k] = av[lo + k];
    }
    double dd[6];
    for (int k = 0; k < 6; ++k) dd[k] = fs[k];
    for (int lvl = 1; lvl < 6; ++lvl)
      for (int k = 5; k >= lvl; --k) dd[k] = (dd[k] - dd[k - 1]) / (xs[k] - xs[k - lvl]);
    // Horner in jet arithmetic about t
    int o = std::min(ord, 4);
    Jet x = Jet::variable(t, o);
    Jet r = Jet::constant(dd[5], o);
    for (int k = 4; k >= 0; --k) r = r * (x - xs[k]) + dd[k];
    return r;
  };

  auto core = std::make_shared<Core>();
  core->kind = "tabulated";
  core->d = d;
  core->gauge = g;
  core->t_lo = ts->front();
  core->t_hi = ts->back();
  core->max_ord = 4;
  core->a_t = a_jet;
  core->m_t = [m0](double, int ord) { return Jet::constant(m0, ord); };
  core->win_lo = core->t_lo;
  core->win_hi = core->t_hi;
  if (g == Gauge::proper) {
    const double t0 = core->t_lo;
    core->tau_raw = [](double t) { return t; };
    core->t_from_tau_raw = [](double tau) { return tau; };
    core->tau_off = t0;
  } else {
    core->build_numeric_map();
  }
  return Background(core);
}

Background Background::custom(Gauge g, int d, std::function<Jet(double, int)> a_jet,
                              std::function<Jet(double, int)> m_jet, double t_lo, double t_hi,
                              int max_ord) {
  auto core = std::make_shared<Core>();
  core->kind = "custom";
  core->d = d;
  core->gauge = g;
  core->t_lo = t_lo;
  core->t_hi = t_hi;
  core->max_ord = max_ord;
  core->a_t = std::move(a_jet);
  core->m_t = m_jet ? std::move(m_jet)
                    : [](double, int ord) { return Jet::constant(0.0, ord); };
  core->win_lo = t_lo;
  core->win_hi = t_hi;
  if (g == Gauge::proper) {
    const double t0 = t_lo;
    core->tau_raw = [](double t) { return t; };
    core->t_from_tau_raw = [](double tau) { return tau; };
    core->tau_off = t0;
  } else {
    core->build_numeric_map();
  }
  return Background(core);
}

FrequencyPair frequencies(const Background& bg) {
  FrequencyPair fp;
  fp.omega0_sq = [bg](double tau) { return bg.omega0_sq(tau); };
  fp.omega2_sq = [bg](double tau) { return bg.omega2_sq(tau); };
  return fp;
}

}  // namespace sle
