#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sle/background.hpp"
#include "sle/errors.hpp"
#include "sle/quadrature.hpp"
#include "sle/window.hpp"

using namespace sle;

TEST_CASE("tau map: proper gauge is the identity up to the offset") {
  Background bg = Background::power_law(0.0, 1.3, -2.0, 2.0);
  CHECK(bg.tau_of_t(-2.0) == doctest::Approx(0.0));
  CHECK(bg.tau_of_t(1.0) == doctest::Approx(3.0));
  CHECK(bg.t_of_tau(3.0) == doctest::Approx(1.0));
  CHECK_THROWS_AS(bg.tau_of_t(5.0), DomainError);
}

TEST_CASE("tau map: a = 1 makes all gauges coincide") {
  auto unit = [](double, int ord) { return Jet::constant(1.0, ord); };
  for (Gauge g : {Gauge::cosmological, Gauge::conformal, Gauge::proper}) {
    Background bg = Background::custom(g, 3, unit, nullptr, -1.0, 4.0, 8);
    CHECK(bg.tau_of_t(2.5) == doctest::Approx(3.5).epsilon(1e-12));
  }
}

TEST_CASE("tau map: pre-inflation kinetic era against the analytic integral") {
  const double H = 1.0;
  Background bg = Background::preinflation(H);
  // tau(eta) - tau(0) = ln(1+2H eta)/(2H); cross-check with direct quadrature of nbar
  for (double eta : {-0.4, -0.25, -0.1}) {
    const double expect = std::log(1.0 + 2.0 * H * eta) / (2.0 * H);
    CHECK(std::abs((bg.tau_of_t(eta) - bg.tau_of_t(0.0)) - expect) < 1e-12);
    const double numeric = -quad([&](double s) { return 1.0 / (1.0 + 2.0 * H * s); }, eta, 0.0);
    CHECK(std::abs(expect - numeric) < 1e-10);
  }
  // round trip
  for (double eta : {-0.3, 0.2, 0.7}) CHECK(std::abs(bg.t_of_tau(bg.tau_of_t(eta)) - eta) < 1e-12);
}

TEST_CASE("frequencies") {
  Background mk = Background::minkowski(1.5);
  FrequencyPair fp = frequencies(mk);
  CHECK(fp.omega0_sq(3.0) == doctest::Approx(2.25));
  CHECK(fp.omega2_sq(3.0) == doctest::Approx(1.0));
  CHECK(mk.omega_p_sq(2.0, 3.0) == doctest::Approx(2.25 + 4.0));

  Background pl = Background::power_law(0.0, 1.0, -1.0, 1.0);
  CHECK(frequencies(pl).omega0_sq(0.5) == 0.0);  // massless

  // d = 3 conformal de Sitter branch: omega2 = a^2 (coefficient of p^2 is a^4)
  Background pi = Background::preinflation(1.0);
  const double tau = pi.tau_of_t(0.4);
  const double a = pi.a_of_t(0.4);
  CHECK(pi.omega2_sq(tau) == doctest::Approx(std::pow(a, 4)).epsilon(1e-10));
}

TEST_CASE("gauge consistency: int dt Nbar a^q equals int dtau a^{q+d}") {
  Background ds = Background::desitter(1.0, -2.0, 0.6);
  for (int q : {0, 1, 2}) {
    // Nbar = a (conformal); integrand in t: a^{q+1}
    const double in_t =
        quad([&](double eta) { return std::pow(ds.a_of_t(eta), q + 1); }, -1.5, 0.4);
    const double in_tau = quad([&](double tau) { return std::pow(ds.a_of_tau(tau), q + 4); },
                               ds.tau_of_t(-1.5), ds.tau_of_t(0.4));
    CHECK(std::abs(in_t / in_tau - 1.0) < 1e-10);
  }
}

TEST_CASE("jets through the gauge map match the closed tau form") {
  // e^{Ht} in cosmological time is de Sitter: a(tau) = (1 - dH tau)^{-1/d}
  const double H = 0.7;
  Background numeric = Background::custom(
      Gauge::cosmological, 3,
      [H](double t, int ord) { return exp(H * Jet::variable(t, ord)); }, nullptr, -1.0, 2.0,
      10);
  for (double tau : {0.1, 0.5, 1.1}) {
    Jet a_num = numeric.a_tau_jet(tau, 4);
    // closed form with the same base point tau(t_lo) = 0
    const double tau_off = (1.0 - std::exp(3.0 * H * (-1.0))) / (3.0 * H) * -1.0;
    (void)tau_off;
    // direct check against (1 - 3 H (tau + off))^{-1/3} with off = tau_raw(t_lo)
    const double off = (1.0 - std::exp(-3.0 * H * (-1.0))) / (3.0 * H);
    Jet closed = pow(1.0 - 3.0 * H * (Jet::variable(tau, 4) + off), -1.0 / 3.0);
    for (int k = 0; k <= 4; ++k)
      CHECK(std::abs(a_num.deriv(k) / closed.deriv(k) - 1.0) < 1e-8);
  }
}

TEST_CASE("abar") {
  Background mk = Background::minkowski(0.0, -3.0, 3.0);
  WindowFunction f = window_family(mk, -1.0, 1.5, 0.7);
  CHECK(std::abs(abar(mk, f) - 1.0) < 1e-12);

  // constant a = c, d = 3: abar = c^{-2}
  const double c = 1.7;
  Background cc = Background::custom(
      Gauge::proper, 3, [c](double, int ord) { return Jet::constant(c, ord); }, nullptr, -3.0,
      3.0, 8);
  WindowFunction fc = window_family(cc, -1.0, 1.0, 0.5);
  CHECK(std::abs(abar(cc, fc) - 1.0 / (c * c)) < 1e-12);

  // scale invariance under f -> s f
  Background pi = Background::preinflation(1.0);
  WindowFunction fp = window_family(pi, -0.3, 0.5, 0.5);
  CHECK(std::abs(abar(pi, fp) / abar(pi, fp.scaled(3.7)) - 1.0) < 1e-12);

  // refinement oracle: trapezoid at 4x resolution
  const double ab = abar(pi, fp);
  auto trap = [&](int n) {
    double num = 0.0, den = 0.0;
    const double lo = fp.tau_lo(), hi = fp.tau_hi();
    for (int i = 0; i < n; ++i) {
      const double tau = lo + (hi - lo) * (i + 0.5) / n;
      num += fp.f2_tau(tau);
      den += fp.f2_tau(tau) * pi.omega2_sq(tau);
    }
    return std::sqrt(num / den);
  };
  CHECK(std::abs(trap(16384) - ab) < 1e-8);
}

TEST_CASE("window family") {
  Background mk = Background::minkowski(1.0, -5.0, 5.0);
  WindowFunction f = window_family(mk, -1.0, 2.0, 0.5);
  CHECK(f.f2_gauge(0.5) == doctest::Approx(1.0));  // center of the plateau
  CHECK(f.f2_gauge(-1.0) == 0.0);
  CHECK(f.f2_gauge(2.0) == 0.0);
  // large w: plateau covers the middle 90%
  WindowFunction fw = window_family(mk, -1.0, 1.0, 50.0);
  for (double t : {-0.9, -0.45, 0.0, 0.45, 0.9}) CHECK(fw.f2_gauge(t) == doctest::Approx(1.0));
  // symmetric about the center, positive integral
  for (double dt : {0.2, 0.55, 0.8})
    CHECK(f.f2_gauge(0.5 + 1.5 * dt) == doctest::Approx(f.f2_gauge(0.5 - 1.5 * dt)));
  CHECK(window_norm(f) > 0.0);
}

TEST_CASE("window validation names the admissible range") {
  Background pi = Background::preinflation(1.0);
  try {
    window_family(pi, -0.3, 1.2, 0.5);  // past the 1/H pole
    CHECK(false);
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("admissible") != std::string::npos);
  }
  CHECK_THROWS_AS(window_family(pi, -0.6, 0.0, 0.5), DomainError);  // wall margin
}

TEST_CASE("tabulated background reproduces the sampled scale factor") {
  std::vector<double> ts, as;
  const double H = 0.5;
  for (int i = 0; i <= 400; ++i) {
    const double eta = -2.0 + 2.4 * i / 400.0;
    ts.push_back(eta);
    as.push_back(1.0 / (1.0 - H * eta));
  }
  Background tab = Background::tabulated(Gauge::conformal, 3, ts, as);
  Background ref = Background::desitter(H, -2.0, 0.4);
  for (double eta : {-1.5, -0.7, 0.1}) {
    CHECK(std::abs(tab.a_of_t(eta) / ref.a_of_t(eta) - 1.0) < 1e-10);
    CHECK(std::abs(tab.tau_of_t(eta) - ref.tau_of_t(eta)) < 1e-9);
  }
  CHECK(tab.max_deriv_order() == 4);
}

TEST_CASE("omega2 positivity") {
  for (const Background& bg :
       {Background::preinflation(1.0), Background::power_law(0.25, 1.0, 0.5, 3.0)}) {
    for (int i = 0; i <= 20; ++i) {
      const double tau = bg.tau_lo() + (bg.tau_hi() - bg.tau_lo()) * i / 20.0;
      CHECK(bg.omega2_sq(tau) > 0.0);
    }
  }
}
