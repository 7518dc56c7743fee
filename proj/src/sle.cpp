#include "sle/sle.hpp"

#include <algorithm>
#include <cmath>

#include "sle/errors.hpp"

namespace sle {

QuadOptions sle_quad_options(const Background& bg, const WindowFunction& f, double p,
                             double rel_tol) {
  QuadOptions opt;
  opt.rel_tol = rel_tol;
  // oscillation budget ~ p * max(omega2) * support length
  double w2max = 0.0;
  for (int i = 0; i <= 32; ++i) {
    const double tau = f.tau_lo() + (f.tau_hi() - f.tau_lo()) * i / 32.0;
    w2max = std::max(w2max, std::sqrt(bg.omega2_sq(tau)));
  }
  const double phase = std::abs(p) * w2max * (f.tau_hi() - f.tau_lo());
  const double tol_boost = std::max(1.0, std::sqrt(1e-12 / rel_tol));
  opt.max_intervals =
      static_cast<int>(std::min(240000.0, (2000.0 + 30.0 * phase) * tol_boost));
  return opt;
}

EnergyPair energy_functionals(const ModeSolution& S, const WindowFunction& f,
                              const Background& bg, const QuadOptions& opt) {
  if (S.wronskian_residual > 1e-8)
    throw ContractError("energy_functionals: solution is not Wronskian-normalized");
  EnergyPair pair;
  pair.c1 = 0.5 * window_integral(
                      f,
                      [&](double tau) {
                        const cplx T = S.traj.eval(tau);
                        const cplx dT = S.traj.eval_deriv(tau);
                        return std::norm(dT) + bg.omega_p_sq(S.p, tau) * std::norm(T);
                      },
                      opt);
  QuadOptions copt = opt;
  auto extra = bg.tau_breakpoints(f.tau_lo(), f.tau_hi());
  copt.breakpoints.insert(copt.breakpoints.end(), extra.begin(), extra.end());
  // |c2| <= c1, so accuracy relative to c1 is the meaningful target; a pure
  // relative goal on a cancelling integral would chase roundoff forever
  copt.abs_floor = std::max(copt.abs_floor, opt.rel_tol * pair.c1);
  pair.c2 = 0.5 * quad(
                      [&](double tau) {
                        const cplx T = S.traj.eval(tau);
                        const cplx dT = S.traj.eval_deriv(tau);
                        return f.f2_tau(tau) * (dT * dT + bg.omega_p_sq(S.p, tau) * T * T);
                      },
                      f.tau_lo(), f.tau_hi(), copt);
  if (!(pair.c1 > std::abs(pair.c2)) &&
      pair.c1 - std::abs(pair.c2) < -1e-9 * std::abs(pair.c1))
    throw ConsistencyError("energy_functionals: c1 <= |c2|");
  return pair;
}

EnergyPair energy_functionals(const ModeSolution& S, const WindowFunction& f,
                              const Background& bg) {
  return energy_functionals(S, f, bg, sle_quad_options(bg, f, S.p));
}

BogoliubovCoeffs minimize_bogoliubov(const EnergyPair& pair) {
  const double c1 = pair.c1;
  const double ac2 = std::abs(pair.c2);
  if (!(c1 > ac2)) throw DomainError("minimize_bogoliubov: requires c1 > |c2|");
  const double root = std::sqrt(c1 * c1 - ac2 * ac2);
  const double mu = std::sqrt(std::max(0.0, c1 / (2.0 * root) - 0.5));
  const double lam_mag = std::sqrt(c1 / (2.0 * root) + 0.5);
  const double phase = ac2 < 1e-12 * c1 ? 0.0 : std::arg(pair.c2);
  BogoliubovCoeffs bc;
  bc.mu = mu;
  bc.lambda = -lam_mag * std::exp(cplx(0.0, -phase));
  return bc;
}

ModeSolution bogoliubov_rotate(const ModeSolution& S, cplx a, cplx b) {
  ModeSolution out;
  out.p = S.p;
  out.traj.grid = S.traj.grid;
  const auto val = S.traj.dense_value;
  const auto der = S.traj.dense_deriv;
  out.traj.dense_value = [val, a, b](double tau) {
    const cplx s = val(tau);
    return a * s + b * std::conj(s);
  };
  out.traj.dense_deriv = [der, a, b](double tau) {
    const cplx s = der(tau);
    return a * s + b * std::conj(s);
  };
  const std::size_t n = S.traj.grid.size();
  out.traj.value.resize(n);
  out.traj.deriv.resize(n);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    out.traj.value[i] = a * S.traj.value[i] + b * std::conj(S.traj.value[i]);
    out.traj.deriv[i] = a * S.traj.deriv[i] + b * std::conj(S.traj.deriv[i]);
    worst = std::max(worst,
                     std::abs(wronskian(out.traj.value[i], out.traj.deriv[i]) + cplx(0, 1)));
  }
  out.wronskian_residual = worst;
  return out;
}

namespace {

// J(tau), K(tau0), Jdot and the nested energy integral are all quadratic
// forms in the fundamental pair; three base integrals cover everything.
struct CommutatorQuadratics {
  double Juu = 0, Juv = 0, Jvv = 0;
};

CommutatorQuadratics commutator_quadratics(const CommutatorTable& t, const WindowFunction& f,
                                           const Background& bg, const QuadOptions& opt) {
  CommutatorQuadratics q;
  auto base = [&](auto ga, auto gb, auto dga, auto dgb, double floor) {
    QuadOptions o = opt;
    o.abs_floor = std::max(o.abs_floor, opt.rel_tol * floor);
    return 0.5 * window_integral(
                     f,
                     [&](double tau) {
                       return dga(tau) * dgb(tau) +
                              bg.omega_p_sq(t.p(), tau) * ga(tau) * gb(tau);
                     },
                     o);
  };
  auto u = [&](double tau) { return t.u(tau); };
  auto v = [&](double tau) { return t.v(tau); };
  auto du = [&](double tau) { return t.du(tau); };
  auto dv = [&](double tau) { return t.dv(tau); };
  q.Juu = base(u, u, du, du, 0.0);
  q.Jvv = base(v, v, dv, dv, 0.0);
  // the cross integral can vanish by symmetry; Cauchy-Schwarz sets its scale
  q.Juv = base(u, v, du, dv, std::sqrt(q.Juu * q.Jvv));
  return q;
}

double J_at(const CommutatorQuadratics& q, const CommutatorTable& t, double tau) {
  const double x = t.u(tau), y = t.v(tau);
  return q.Jvv * x * x - 2.0 * q.Juv * x * y + q.Juu * y * y;
}

double K_at(const CommutatorQuadratics& q, const CommutatorTable& t, double tau) {
  const double x = t.du(tau), y = t.dv(tau);
  return q.Jvv * x * x - 2.0 * q.Juv * x * y + q.Juu * y * y;
}

double Jdot_at(const CommutatorQuadratics& q, const CommutatorTable& t, double tau) {
  const double x = t.u(tau), y = t.v(tau);
  const double dx = t.du(tau), dy = t.dv(tau);
  return 2.0 * (q.Jvv * x * dx - q.Juv * (dx * y + x * dy) + q.Juu * y * dy);
}

}  // namespace

JKData jk_functionals(const CommutatorTable& table, const WindowFunction& f, const Background& bg,
                      double tau0, const QuadOptions& opt) {
  if (!(tau0 >= table.grid().lo() && tau0 <= table.grid().hi()))
    throw DomainError("jk_functionals: tau0 outside the table grid");
  const CommutatorQuadratics q = commutator_quadratics(table, f, bg, opt);
  JKData jk;
  jk.tau0 = tau0;
  jk.J = J_at(q, table, tau0);
  jk.K = K_at(q, table, tau0);
  jk.Jdot = Jdot_at(q, table, tau0);
  return jk;
}

JKData jk_functionals(const CommutatorTable& table, const WindowFunction& f, const Background& bg,
                      double tau0) {
  return jk_functionals(table, f, bg, tau0, sle_quad_options(bg, f, table.p()));
}

double sle_energy(const CommutatorTable& table, const WindowFunction& f, const Background& bg,
                  const QuadOptions& opt) {
  const CommutatorQuadratics q = commutator_quadratics(table, f, bg, opt);
  const double e2 =
      0.25 * window_integral(
                 f,
                 [&](double tau0) {
                   return K_at(q, table, tau0) +
                          bg.omega_p_sq(table.p(), tau0) * J_at(q, table, tau0);
                 },
                 opt);
  return std::sqrt(e2);
}

double sle_energy(const CommutatorTable& table, const WindowFunction& f, const Background& bg) {
  return sle_energy(table, f, bg, sle_quad_options(bg, f, table.p()));
}

SLEResult sle_from_commutator(const CommutatorTable& table, const WindowFunction& f,
                              const Background& bg, double tau0, const QuadOptions& opt) {
  if (!(tau0 >= table.grid().lo() && tau0 <= table.grid().hi()))
    throw DomainError("sle_from_commutator: tau0 outside the table grid");
  auto qptr = std::make_shared<CommutatorQuadratics>(commutator_quadratics(table, f, bg, opt));
  auto tptr = std::make_shared<CommutatorTable>(table);

  const double J = J_at(*qptr, table, tau0);
  const double K = K_at(*qptr, table, tau0);
  const double Jd = Jdot_at(*qptr, table, tau0);
  const double disc = 4.0 * K * J - Jd * Jd;
  if (!(disc > 1e-14 * (4.0 * K * J)))
    throw DomainError("sle_from_commutator: degenerate data, 4KJ - Jdot^2 ~ 0");
  const double E = 0.5 * std::sqrt(disc);

  const double z = std::sqrt(J / (2.0 * E));
  const cplx w = cplx(z * Jd / (2.0 * J), -1.0 / (2.0 * z));

  // T(tau) = Delta(tau,tau0) w - dtau0 Delta(tau,tau0) z = cu u(tau) + cv v(tau)
  const double u0 = table.u(tau0), v0 = table.v(tau0);
  const double du0 = table.du(tau0), dv0 = table.dv(tau0);
  const cplx cv = u0 * w - du0 * z;
  const cplx cu = -(v0 * w - dv0 * z);

  SLEResult res;
  res.p = table.p();
  res.route = Route::commutator;
  res.energy = E;
  res.J_of_tau = [qptr, tptr](double tau) { return J_at(*qptr, *tptr, tau); };

  ModeSolution mode;
  mode.p = table.p();
  mode.traj.grid = table.grid();
  mode.traj.dense_value = [tptr, cu, cv](double tau) {
    return cu * tptr->u(tau) + cv * tptr->v(tau);
  };
  mode.traj.dense_deriv = [tptr, cu, cv](double tau) {
    return cu * tptr->du(tau) + cv * tptr->dv(tau);
  };
  const std::size_t n = table.grid().size();
  mode.traj.value.resize(n);
  mode.traj.deriv.resize(n);
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double tau = table.grid()[i];
    mode.traj.value[i] = mode.traj.dense_value(tau);
    mode.traj.deriv[i] = mode.traj.dense_deriv(tau);
    worst = std::max(worst,
                     std::abs(wronskian(mode.traj.value[i], mode.traj.deriv[i]) + cplx(0, 1)));
  }
  mode.wronskian_residual = worst;
  res.mode = std::move(mode);
  return res;
}

SLEResult sle_from_commutator(const CommutatorTable& table, const WindowFunction& f,
                              const Background& bg, double tau0) {
  return sle_from_commutator(table, f, bg, tau0, sle_quad_options(bg, f, table.p()));
}

SLEResult sle_from_fiducial(const ModeSolution& S, const WindowFunction& f, const Background& bg,
                            const QuadOptions& opt) {
  const EnergyPair pair = energy_functionals(S, f, bg, opt);
  const BogoliubovCoeffs bc = minimize_bogoliubov(pair);
  SLEResult res;
  res.p = S.p;
  res.route = Route::fiducial;
  res.energy = std::sqrt(pair.c1 * pair.c1 - std::norm(pair.c2));
  res.mode = bogoliubov_rotate(S, bc.lambda, bc.mu);
  const double c1 = pair.c1;
  const cplx c2 = pair.c2;
  auto val = S.traj.dense_value;
  res.J_of_tau = [val, c1, c2](double tau) {
    const cplx s = val(tau);
    return 2.0 * c1 * std::norm(s) - 2.0 * std::real(std::conj(c2) * s * s);
  };
  return res;
}

SLEResult sle_from_fiducial(const ModeSolution& S, const WindowFunction& f,
                            const Background& bg) {
  return sle_from_fiducial(S, f, bg, sle_quad_options(bg, f, S.p));
}

SLEResult sle_solve_fiducial(const Background& bg, const WindowFunction& f, double p,
                             const Grid& grid, double ode_tol, double quad_tol) {
  const double tau0 = 0.5 * (f.tau_lo() + f.tau_hi());
  auto [z, w] = instantaneous_data(bg, p, tau0);
  ModeSolution S = solve_mode(bg, p, z, w, tau0, grid, ode_tol);
  return sle_from_fiducial(S, f, bg, sle_quad_options(bg, f, p, quad_tol));
}

cplx two_point(const SLEResult& res, double tau, double tau1) {
  return res.mode.traj.eval(tau) * std::conj(res.mode.traj.eval(tau1));
}

InvariantsIJK invariants_IJK(const ModeSolution& S, const WindowFunction& f, const Background& bg,
                             const QuadOptions& opt) {
  // direct integrals; no normalization requirement (scaling law holds for any S)
  const double c1 = 0.5 * window_integral(
                              f,
                              [&](double tau) {
                                const cplx T = S.traj.eval(tau);
                                const cplx dT = S.traj.eval_deriv(tau);
                                return std::norm(dT) + bg.omega_p_sq(S.p, tau) * std::norm(T);
                              },
                              opt);
  QuadOptions copt = opt;
  auto extra = bg.tau_breakpoints(f.tau_lo(), f.tau_hi());
  copt.breakpoints.insert(copt.breakpoints.end(), extra.begin(), extra.end());
  copt.abs_floor = std::max(copt.abs_floor, opt.rel_tol * c1);
  const cplx c2 = 0.5 * quad(
                            [&](double tau) {
                              const cplx T = S.traj.eval(tau);
                              const cplx dT = S.traj.eval_deriv(tau);
                              return f.f2_tau(tau) *
                                     (dT * dT + bg.omega_p_sq(S.p, tau) * T * T);
                            },
                            f.tau_lo(), f.tau_hi(), copt);
  InvariantsIJK inv;
  inv.I = c1 * c1 - std::norm(c2);
  auto val = S.traj.dense_value;
  auto der = S.traj.dense_deriv;
  inv.J = [val, c1, c2](double tau) {
    const cplx s = val(tau);
    return 2.0 * c1 * std::norm(s) - 2.0 * std::real(std::conj(c2) * s * s);
  };
  inv.K = [der, c1, c2](double tau) {
    const cplx ds = der(tau);
    return 2.0 * c1 * std::norm(ds) - 2.0 * std::real(std::conj(c2) * ds * ds);
  };
  return inv;
}

InvariantsIJK invariants_IJK(const ModeSolution& S, const WindowFunction& f,
                             const Background& bg) {
  return invariants_IJK(S, f, bg, sle_quad_options(bg, f, S.p));
}

InstantaneousLimitRecord instantaneous_limit_probe(const Background& bg, double p, double tau0,
                                                   const std::vector<double>& widths,
                                                   double w_shape) {
  InstantaneousLimitRecord rec;
  const double wp = std::sqrt(bg.omega_p_sq(p, tau0));
  rec.target_mod2 = 1.0 / (2.0 * wp);
  const double t0 = bg.t_of_tau(tau0);
  for (double width : widths) {
    WindowFunction f = window_family(bg, t0 - 0.5 * width, t0 + 0.5 * width, w_shape);
    const double span = f.tau_hi() - f.tau_lo();
    Grid grid = Grid::uniform(f.tau_lo() - 0.02 * span, f.tau_hi() + 0.02 * span, 512);
    SLEResult res = sle_solve_fiducial(bg, f, p, grid);
    const double mod2 = std::norm(res.mode.traj.eval(tau0));
    rec.widths.push_back(width);
    rec.mod2_errors.push_back(std::abs(mod2 - rec.target_mod2));
    rec.energy_ratio.push_back(res.energy / window_norm(f) / (0.5 * wp));
  }
  for (std::size_t i = 0; i + 1 < rec.mod2_errors.size(); ++i)
    rec.orders.push_back(std::log2(rec.mod2_errors[i] / rec.mod2_errors[i + 1]));
  return rec;
}

}  // namespace sle
