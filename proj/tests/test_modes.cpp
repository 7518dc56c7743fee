#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "sle/errors.hpp"
#include "sle/modes.hpp"
#include "sle/preinflation.hpp"

using namespace sle;

namespace {
Grid window_grid(const WindowFunction& f, int n = 256) {
  const double span = f.tau_hi() - f.tau_lo();
  return Grid::uniform(f.tau_lo() - 0.02 * span, f.tau_hi() + 0.02 * span, n);
}
}  // namespace

TEST_CASE("solve_mode: Minkowski closed form") {
  Background mk = Background::minkowski(1.0);
  Grid g = Grid::uniform(0.0, 6.0, 128);
  for (double p : {0.0, 1.3}) {
    const double w = std::sqrt(1.0 + p * p);
    ModeSolution sol = solve_mode(mk, p, 1.0 / std::sqrt(2.0 * w),
                                  cplx(0.0, -std::sqrt(0.5 * w)), 2.0, g);
    for (std::size_t i = 0; i < g.size(); i += 13) {
      const cplx expect = std::exp(cplx(0.0, -w * (g[i] - 2.0))) / std::sqrt(2.0 * w);
      CHECK(std::abs(sol.traj.value[i] - expect) < 1e-10);
    }
    CHECK(sol.wronskian_residual < 1e-11);
  }
  // massless a = 1: e^{-ip tau}/sqrt(2p)
  Background ml = Background::minkowski(0.0);
  const double p = 2.0;
  ModeSolution sol = solve_mode(ml, p, 1.0 / std::sqrt(2.0 * p),
                                cplx(0.0, -std::sqrt(0.5 * p)), 0.0, g);
  CHECK(std::abs(sol.traj.eval(4.4) -
                 std::exp(cplx(0.0, -p * 4.4)) / std::sqrt(2.0 * p)) < 1e-10);
}

TEST_CASE("solve_mode: rejects non-normalized data") {
  Background mk = Background::minkowski(1.0);
  Grid g = Grid::uniform(0.0, 6.0, 64);
  CHECK_THROWS_AS(solve_mode(mk, 1.0, cplx(1.0, 0.0), cplx(0.0, -1.0), 0.0, g),
                  ContractError);
}

TEST_CASE("solve_mode: Bunch-Davies branch of the pre-inflation model") {
  const double H = 1.0, p = 1.7;
  PreInflationModel model = PreInflationModel::create(H);
  const Background& bg = model.bg;
  const double tau0 = bg.tau_of_t(0.0);
  // conformal-time data transcribe with d tau = a^-2 d eta and a(0) = 1
  FiducialModeValue v0 = fiducial_mode(model, p, 0.0);
  Grid g = Grid::uniform(tau0, bg.tau_of_t(0.7 / H), 128);
  ModeSolution sol = solve_mode(bg, p, v0.S, v0.dS_deta, tau0, g);
  double worst = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double eta = bg.t_of_tau(g[i]);
    const FiducialModeValue ref = fiducial_mode(model, p, eta);
    worst = std::max(worst, std::abs(sol.traj.value[i] - ref.S) / std::abs(ref.S));
  }
  CHECK(worst < 1e-8);
}

TEST_CASE("commutator: harmonic oscillator closed form") {
  Background mk = Background::minkowski(1.0);
  Grid g = Grid::uniform(0.0, 6.0, 128);
  const double p = 0.9, w = std::sqrt(1.0 + p * p);
  CommutatorTable table(mk, p, g, 3.0);
  for (double a : {0.4, 2.2, 5.1}) {
    for (double b : {1.0, 3.3}) {
      CHECK(std::abs(table.delta(a, b) - std::sin(w * (a - b)) / w) < 1e-10);
      CHECK(std::abs(table.dtau_delta(a, b) - std::cos(w * (a - b))) < 1e-10);
      CHECK(std::abs(table.dtau_dtau1_delta(a, b) - w * std::sin(w * (a - b))) < 1e-9);
    }
  }
  // antisymmetry is exact by construction
  CHECK(table.delta(1.0, 4.0) == -table.delta(4.0, 1.0));
  CHECK(std::abs(table.dtau_delta(2.5, 2.5) - 1.0) < 1e-11);
}

TEST_CASE("commutator: massless leading order is tau - tau'") {
  Background pl = Background::power_law(0.0, 1.0, -3.0, 3.0);
  Grid g = Grid::uniform(2.0, 4.0, 64);
  CommutatorTable table(pl, 0.0, g, 3.0);
  CHECK(std::abs(table.delta(3.7, 2.4) - (3.7 - 2.4)) < 1e-10);
}

TEST_CASE("commutator: independent of the realization") {
  Background pi = Background::preinflation(1.0);
  WindowFunction f = window_family(pi, -0.3, 0.5, 0.5);
  Grid g = window_grid(f);
  const double p = 1.4, tau_r = 0.5 * (f.tau_lo() + f.tau_hi());
  CommutatorTable table(pi, p, g, tau_r);
  // two different normalized complex solutions realize the same Delta
  auto realize = [&](cplx z, cplx w) {
    ModeSolution s = solve_mode(pi, p, z, w, tau_r, g);
    return s;
  };
  ModeSolution s1 = realize(instantaneous_data(pi, p, tau_r).first,
                            instantaneous_data(pi, p, tau_r).second);
  ModeSolution s2 = realize(cplx(2.0, 0.0), cplx(0.17, -0.25));
  for (double a : {g.lo() + 0.3, tau_r + 0.21}) {
    for (double b : {tau_r - 0.15, g.hi() - 0.2}) {
      const cplx w1 = s1.traj.eval(a) * std::conj(s1.traj.eval(b));
      const cplx w2 = s2.traj.eval(a) * std::conj(s2.traj.eval(b));
      CHECK(std::abs(-2.0 * w1.imag() - table.delta(a, b)) < 1e-8);
      CHECK(std::abs(-2.0 * w2.imag() - table.delta(a, b)) < 1e-8);
    }
  }
}

TEST_CASE("delta identity residual") {
  Background mk = Background::minkowski(1.0);
  Grid g = Grid::uniform(0.0, 6.0, 64);
  CommutatorTable table(mk, 1.2, g, 3.0);
  CHECK(delta_identity_residual(table, 2.0, 2.0, 4.4) < 1e-12);
  CHECK(delta_identity_residual(table, 1.1, 4.2, 2.9) < 1e-10);

  Background pi = Background::preinflation(1.0);
  WindowFunction f = window_family(pi, -0.3, 0.5, 0.5);
  Grid gp = window_grid(f);
  CommutatorTable tp(pi, 2.3, gp, 0.5 * (f.tau_lo() + f.tau_hi()));
  for (double a : {gp.lo() + 0.1, gp.lo() + 0.41}) {
    CHECK(delta_identity_residual(tp, a, gp.hi() - 0.2, gp.lo() + 0.3) < 1e-7);
  }
}

TEST_CASE("ermakov residual") {
  Background mk = Background::minkowski(1.0);
  Grid g = Grid::uniform(0.0, 6.0, 512);
  const double w = std::sqrt(2.0);
  ModeSolution sol = solve_mode(mk, 1.0, 1.0 / std::sqrt(2.0 * w),
                                cplx(0.0, -std::sqrt(0.5 * w)), 0.0, g);
  std::vector<double> res = ermakov_residual(mk, sol);
  for (std::size_t i = 2; i + 2 < res.size(); ++i) CHECK(res[i] < 1e-8);

  // pre-inflation solution
  Background pi = Background::preinflation(1.0);
  WindowFunction f = window_family(pi, -0.3, 0.5, 0.5);
  Grid gp = window_grid(f, 512);
  const double tau_r = 0.5 * (f.tau_lo() + f.tau_hi());
  auto [z, w2] = instantaneous_data(pi, 1.0, tau_r);
  ModeSolution sp = solve_mode(pi, 1.0, z, w2, tau_r, gp);
  std::vector<double> rp = ermakov_residual(pi, sp);
  for (std::size_t i = 2; i + 2 < rp.size(); ++i) CHECK(rp[i] < 1e-6);

  // negative control: Wronskian -2i violates the equation detectably
  ModeSolution bad = bogoliubov_rotate(sp, std::sqrt(2.0), 0.0);
  std::vector<double> rb = ermakov_residual(pi, bad);
  double worst = 0.0;
  for (std::size_t i = 2; i + 2 < rb.size(); ++i) worst = std::max(worst, rb[i]);
  CHECK(worst > 1e-3);
}

TEST_CASE("gaussian covariance") {
  Background mk = Background::minkowski(1.0);
  Grid g = Grid::uniform(0.0, 6.0, 128);
  const double p = 1.1, w = std::sqrt(1.0 + p * p);
  ModeSolution sol = solve_mode(mk, p, 1.0 / std::sqrt(2.0 * w),
                                cplx(0.0, -std::sqrt(0.5 * w)), 0.0, g);
  const cplx xi = gaussian_covariance(sol, 2.7);
  CHECK(std::abs(xi - cplx(0.0, w)) < 1e-10);

  // generic solution: the two formulas agree internally and Im > 0 holds
  Background pl = Background::power_law(0.25, 1.0, 0.5, 3.0);
  Grid g2 = Grid::uniform(pl.tau_of_t(0.8), pl.tau_of_t(2.6), 128);
  ModeSolution s2 = solve_mode(pl, 1.5, cplx(0.6, 0.0), cplx(0.31, -1.0 / 1.2), g2.lo(), g2);
  for (double tau : {g2.lo() + 0.2, g2.lo() + 0.9}) {
    const cplx x2 = gaussian_covariance(s2, tau);
    CHECK(x2.imag() > 0.0);
    CHECK(std::abs(x2.imag() - 1.0 / (2.0 * std::norm(s2.traj.eval(tau)))) < 1e-9);
  }
}

TEST_CASE("energy density identity") {
  Background mk = Background::minkowski(1.0, -3.0, 3.0);
  WindowFunction f = window_family(mk, -1.0, 1.0, 0.5);
  Grid g = window_grid(f);
  const double p = 0.8, w = std::sqrt(1.0 + p * p);
  ModeSolution sol = solve_mode(mk, p, 1.0 / std::sqrt(2.0 * w),
                                cplx(0.0, -std::sqrt(0.5 * w)), 0.0, g);
  auto [lhs, rhs] = energy_density_identity(mk, sol, f);
  const double expect = 0.5 * w * window_norm(f);
  CHECK(std::abs(lhs - expect) < 1e-10);
  CHECK(std::abs(rhs - expect) < 1e-10);

  // random normalized solution on a power-law background
  Background pl = Background::power_law(0.25, 1.0, 0.5, 3.0);
  WindowFunction f2 = window_family(pl, 1.0, 2.4, 0.5);
  Grid g2 = window_grid(f2);
  ModeSolution s2 =
      solve_mode(pl, 1.5, cplx(0.6, 0.0), cplx(0.31, -1.0 / 1.2), g2.lo(), g2);
  auto [l2, r2] = energy_density_identity(pl, s2, f2);
  CHECK(std::abs(l2 - r2) / r2 < 1e-7);
}

TEST_CASE("wronskian conservation along the trajectory") {
  Background pi = Background::preinflation(1.0);
  Grid g = Grid::uniform(pi.tau_of_t(-0.45), pi.tau_of_t(0.8), 256);
  auto [z, w] = instantaneous_data(pi, 10.0, g.lo() + 0.3);
  ModeSolution sol = solve_mode(pi, 10.0, z, w, g.lo() + 0.3, g);
  const double r0 = std::abs(wronskian(sol.traj.value.front(), sol.traj.deriv.front()) +
                             cplx(0, 1));
  const double r1 =
      std::abs(wronskian(sol.traj.value.back(), sol.traj.deriv.back()) + cplx(0, 1));
  CHECK(r1 <= 10.0 * r0 + 1e-13);
}
