#include "sle/modes.hpp"

#include <cmath>

#include "sle/errors.hpp"

namespace sle {

namespace {
LinearOde2 mode_ode(const Background& bg, double p) {
  LinearOde2 ode;
  ode.w = [bg, p](double tau) { return bg.omega_p_sq(p, tau); };
  return ode;
}
}  // namespace

ModeSolution solve_mode(const Background& bg, double p, cplx z, cplx w, double tau0,
                        const Grid& grid, double tol) {
  if (!(p >= 0.0)) throw DomainError("solve_mode: p must be >= 0");
  const cplx wr = wronskian(z, w);
  if (std::abs(wr + cplx(0.0, 1.0)) > 1e-10)
    throw ContractError("solve_mode: initial data not Wronskian-normalized");
  ModeSolution sol;
  sol.p = p;
  sol.traj = integrate_ode(mode_ode(bg, p), z, w, grid, tol, tau0,
                           bg.tau_breakpoints(grid.lo(), grid.hi()));
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const cplx r = wronskian(sol.traj.value[i], sol.traj.deriv[i]) + cplx(0.0, 1.0);
    worst = std::max(worst, std::abs(r));
  }
  sol.wronskian_residual = worst;
  return sol;
}

std::pair<cplx, cplx> instantaneous_data(const Background& bg, double p, double tau0) {
  const double w2 = bg.omega_p_sq(p, tau0);
  if (!(w2 > 0.0)) throw DomainError("instantaneous_data: omega_p(tau0)^2 must be positive");
  const double w = std::sqrt(w2);
  return {cplx(1.0 / std::sqrt(2.0 * w), 0.0), cplx(0.0, -std::sqrt(0.5 * w))};
}

CommutatorTable::CommutatorTable(const Background& bg, double p, const Grid& grid, double tau_r,
                                 double tol)
    : p_(p), tau_ref_(tau_r), grid_(grid) {
  if (!(tau_r >= grid.lo() && tau_r <= grid.hi()))
    throw DomainError("commutator: tau_r must lie inside the grid interval");
  const auto breaks = bg.tau_breakpoints(grid.lo(), grid.hi());
  u_ = integrate_ode(mode_ode(bg, p), 1.0, 0.0, grid, tol, tau_r, breaks);
  v_ = integrate_ode(mode_ode(bg, p), 0.0, 1.0, grid, tol, tau_r, breaks);
}

double CommutatorTable::delta(double tau, double tau1) const {
  return v(tau) * u(tau1) - u(tau) * v(tau1);
}
double CommutatorTable::dtau_delta(double tau, double tau1) const {
  return dv(tau) * u(tau1) - du(tau) * v(tau1);
}
double CommutatorTable::dtau1_delta(double tau, double tau1) const {
  return v(tau) * du(tau1) - u(tau) * dv(tau1);
}
double CommutatorTable::dtau_dtau1_delta(double tau, double tau1) const {
  return dv(tau) * du(tau1) - du(tau) * dv(tau1);
}

CommutatorTable commutator(const Background& bg, double p, const Grid& grid, double tau_r,
                           double tol) {
  return CommutatorTable(bg, p, grid, tau_r, tol);
}

double delta_identity_residual(const CommutatorTable& table, double tau, double tau1,
                               double tau0) {
  const double lhs = table.dtau1_delta(tau, tau0) * table.delta(tau1, tau0) -
                     table.delta(tau, tau0) * table.dtau1_delta(tau1, tau0);
  return std::abs(lhs - table.delta(tau, tau1));
}

std::vector<double> ermakov_residual(const Background& bg, const ModeSolution& sol) {
  const Grid& g = sol.traj.grid;
  const std::size_t n = g.size();
  std::vector<double> xi(n), res(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) xi[i] = std::abs(sol.traj.value[i]);

  for (std::size_t i = 0; i < n; ++i) {
    if (xi[i] < 1e-6) {
      res[i] = std::numeric_limits<double>::infinity();  // singularity flag
      continue;
    }
    // FD second derivative; 4th order in the interior, one-sided at the ends
    double ddxi;
    if (i >= 2 && i + 2 < n) {
      const double h = g[i + 1] - g[i];
      ddxi = (-xi[i - 2] + 16 * xi[i - 1] - 30 * xi[i] + 16 * xi[i + 1] - xi[i + 2]) /
             (12 * h * h);
    } else if (i >= 1 && i + 1 < n) {
      const double h = g[i + 1] - g[i];
      ddxi = (xi[i - 1] - 2 * xi[i] + xi[i + 1]) / (h * h);
    } else {
      continue;  // skip endpoints
    }
    const double w2 = bg.omega_p_sq(sol.p, g[i]);
    const double lhs = ddxi + w2 * xi[i] - 1.0 / (4.0 * xi[i] * xi[i] * xi[i]);
    const double scale =
        std::abs(ddxi) + std::abs(w2 * xi[i]) + 1.0 / (4.0 * xi[i] * xi[i] * xi[i]) + 1e-300;
    res[i] = std::abs(lhs) / scale;
  }
  return res;
}

cplx gaussian_covariance(const ModeSolution& sol, double tau) {
  const cplx T = sol.traj.eval(tau);
  const cplx dT = sol.traj.eval_deriv(tau);
  if (std::abs(T) < 1e-10) throw DomainError("gaussian_covariance: |T| vanishes");
  const cplx xi_a = std::conj(dT) / std::conj(T);
  const double mod2 = std::norm(T);
  const double dmod2 = 2.0 * std::real(std::conj(T) * dT);
  const cplx xi_b = (cplx(0.0, 1.0) + dmod2) / (2.0 * mod2);
  if (std::abs(xi_a - xi_b) > 1e-8 * (std::abs(xi_a) + 1.0))
    throw ConsistencyError("gaussian_covariance: the two covariance formulas disagree");
  if (!(xi_a.imag() > 0.0))
    throw ConsistencyError("gaussian_covariance: imaginary part must be positive");
  return xi_a;
}

std::pair<double, double> energy_density_identity(const Background& bg, const ModeSolution& sol,
                                                  const WindowFunction& f,
                                                  const QuadOptions& opt) {
  auto lhs_integrand = [&](double tau) {
    const cplx T = sol.traj.eval(tau);
    const cplx dT = sol.traj.eval_deriv(tau);
    const double xi = std::abs(T);
    const double dxi = std::real(std::conj(T) * dT) / xi;
    const double w2 = bg.omega_p_sq(sol.p, tau);
    return 0.5 * (dxi * dxi + w2 * xi * xi + 1.0 / (4.0 * xi * xi));
  };
  auto rhs_integrand = [&](double tau) {
    const cplx T = sol.traj.eval(tau);
    const cplx dT = sol.traj.eval_deriv(tau);
    const double w2 = bg.omega_p_sq(sol.p, tau);
    return 0.5 * (std::norm(dT) + w2 * std::norm(T));
  };
  const double lhs = window_integral(f, lhs_integrand, opt);
  const double rhs = window_integral(f, rhs_integrand, opt);
  return {lhs, rhs};
}

}  // namespace sle
