#include "sle/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "sle/errors.hpp"
#include "sle/preinflation.hpp"
#include "sle/smallp.hpp"
#include "sle/wkb.hpp"

namespace sle {

void write_file(const std::string& path, const std::string& content) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw DomainError("cannot write " + path);
  out << content;
}

namespace {

Grid solve_grid(const Background& bg, const WindowFunction& f, int n) {
  const double span = f.tau_hi() - f.tau_lo();
  const double lo = std::max(bg.tau_lo(), f.tau_lo() - 0.02 * span);
  const double hi = std::min(bg.tau_hi(), f.tau_hi() + 0.02 * span);
  return Grid::uniform(lo, hi, n);
}

double momentum_unit(const RunConfig& cfg) {
  return (cfg.bg_kind == "preinflation" || cfg.bg_kind == "desitter") ? cfg.H : 1.0;
}

}  // namespace

void cmd_solve(const RunConfig& cfg, const std::string& out_dir) {
  Background bg = cfg.make_background();
  WindowFunction f = cfg.make_window(bg);
  Grid grid = solve_grid(bg, f, cfg.grid_n);
  const double p = cfg.solve_p * momentum_unit(cfg);
  const double tau0 = std::isnan(cfg.solve_t0) ? 0.5 * (f.tau_lo() + f.tau_hi())
                                               : bg.tau_of_t(cfg.solve_t0);

  SLEResult primary;
  double route_discrepancy = std::numeric_limits<double>::quiet_NaN();
  EnergyPair pair{};
  if (cfg.route == "fiducial" || cfg.route == "both") {
    auto [z, w] = instantaneous_data(bg, p, tau0);
    ModeSolution S = solve_mode(bg, p, z, w, tau0, grid, cfg.ode_tol);
    pair = energy_functionals(S, f, bg, sle_quad_options(bg, f, p, cfg.quad_tol));
    primary = sle_from_fiducial(S, f, bg, sle_quad_options(bg, f, p, cfg.quad_tol));
  }
  if (cfg.route == "commutator" || cfg.route == "both") {
    CommutatorTable table(bg, p, grid, tau0, cfg.ode_tol);
    SLEResult rc =
        sle_from_commutator(table, f, bg, tau0, sle_quad_options(bg, f, p, cfg.quad_tol));
    if (cfg.route == "both") {
      double worst = 0.0;
      for (std::size_t i = 0; i < grid.size(); ++i) {
        const double m1 = std::abs(primary.mode.traj.value[i]);
        const double m2 = std::abs(rc.mode.traj.value[i]);
        worst = std::max(worst, std::abs(m1 - m2) / std::max(m2, 1e-300));
      }
      route_discrepancy = worst;
    } else {
      auto [z, w] = instantaneous_data(bg, p, tau0);
      ModeSolution S = solve_mode(bg, p, z, w, tau0, grid, cfg.ode_tol);
      pair = energy_functionals(S, f, bg, sle_quad_options(bg, f, p, cfg.quad_tol));
    }
    primary = std::move(rc);
  }

  std::ostringstream csv;
  csv << "tau,re_T,im_T,mod2,arg,J\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const cplx T = primary.mode.traj.value[i];
    csv << format_double(grid[i]) << ',' << format_double(T.real()) << ','
        << format_double(T.imag()) << ',' << format_double(std::norm(T)) << ','
        << format_double(std::arg(T)) << ',' << format_double(primary.J_of_tau(grid[i]))
        << "\n";
  }
  write_file(out_dir + "/solve.csv", csv.str());

  nlohmann::json j;
  j["E_sle"] = primary.energy;
  j["c1"] = pair.c1;
  j["c2_re"] = pair.c2.real();
  j["c2_im"] = pair.c2.imag();
  j["p"] = p;
  j["route"] = cfg.route;
  j["tau0"] = tau0;
  if (!std::isnan(route_discrepancy)) j["route_mod_discrepancy"] = route_discrepancy;
  write_file(out_dir + "/solve.json", j.dump(2) + "\n");
}

void cmd_spectrum(const RunConfig& cfg, const std::string& out_dir) {
  if (cfg.bg_kind != "preinflation")
    throw DomainError("spectrum: requires background.kind = preinflation");
  PreInflationModel model = PreInflationModel::create(cfg.H);
  WindowFunction f = cfg.make_window(model.bg);
  SpectrumTable table = spectrum_scan(model, f, cfg.make_p_grid(), cfg.quad_tol);

  std::ostringstream csv;
  csv << "p_over_H,P,P_normalized\n";
  for (std::size_t i = 0; i < table.p_over_H.size(); ++i)
    csv << format_double(table.p_over_H[i]) << ',' << format_double(table.P[i]) << ','
        << format_double(table.P_normalized[i]) << "\n";
  write_file(out_dir + "/spectrum.csv", csv.str());

  nlohmann::json j;
  j["H"] = cfg.H;
  j["count"] = table.p_over_H.size();
  j["kinetic_only_window"] = table.kinetic_only;
  j["window"] = table.window_descriptor;
  j["window_t1"] = f.t1();
  j["window_t2"] = f.t2();
  write_file(out_dir + "/spectrum_meta.json", j.dump(2) + "\n");
}

void cmd_smallp(const RunConfig& cfg, const std::string& out_dir) {
  Background bg = cfg.make_background();
  WindowFunction f = cfg.make_window(bg);
  Grid grid = solve_grid(bg, f, std::max(cfg.grid_n, 1024));
  SleSeries series = sle_series(bg, f, cfg.smallp_order, grid, cfg.quad_tol);

  std::ostringstream csv;
  csv << "tau";
  for (int n = 0; n <= series.N; ++n) csv << ",re_S" << n << ",im_S" << n;
  csv << "\n";
  for (std::size_t i = 0; i < grid.size(); i += 4) {
    csv << format_double(grid[i]);
    for (int n = 0; n <= series.N; ++n) {
      const cplx v = series.fid->S[n][i];
      csv << ',' << format_double(v.real()) << ',' << format_double(v.imag());
    }
    csv << "\n";
  }
  write_file(out_dir + "/smallp_series.csv", csv.str());

  std::ostringstream jcsv;
  jcsv << "tau";
  for (int n = 0; n <= series.N; ++n) jcsv << ",J" << n;
  jcsv << "\n";
  for (std::size_t i = 0; i < grid.size(); i += 4) {
    jcsv << format_double(grid[i]);
    const std::vector<double> J = series.J_coeffs(grid[i]);
    for (int n = 0; n <= series.N; ++n) jcsv << ',' << format_double(J[n]);
    jcsv << "\n";
  }
  write_file(out_dir + "/smallp_sle.csv", jcsv.str());

  nlohmann::json j;
  j["regime"] = series.regime == SleSeries::Regime::massless ? "massless" : "massive";
  j["order"] = series.N;
  j["p_star"] = series.p_star;
  j["p_star_ratio"] = series.fid->p_star_ratio;
  j["eps2"] = series.eps2;
  j["c1"] = series.c1n;
  nlohmann::json c2 = nlohmann::json::array();
  for (const cplx& c : series.c2n) c2.push_back({{"re", c.real()}, {"im", c.imag()}});
  j["c2"] = c2;
  j["K_tau0"] = series.Kn_tau0;
  j["J_tau0"] = series.Jn_tau0;
  j["tau0"] = series.tau0;
  write_file(out_dir + "/smallp.json", j.dump(2) + "\n");
}

void cmd_gd(const RunConfig& cfg, const std::string& out_dir) {
  Background bg = cfg.make_background();
  WindowFunction f = cfg.make_window(bg);
  Grid grid = solve_grid(bg, f, cfg.grid_n);
  HeatKernelCoeffs coeffs = gd_coeffs(bg, cfg.gd_order);

  // keep clear of interior kinks where the coefficients may jump
  const auto breaks = bg.tau_breakpoints(grid.lo(), grid.hi());
  auto near_break = [&](double tau) {
    for (double b : breaks)
      if (std::abs(tau - b) < 1e-3 * (grid.hi() - grid.lo())) return true;
    return false;
  };

  std::ostringstream csv;
  csv << "tau";
  for (int n = 1; n <= coeffs.order(); ++n) csv << ",G" << n;
  csv << "\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (near_break(grid[i])) continue;
    csv << format_double(grid[i]);
    for (int n = 1; n <= coeffs.order(); ++n)
      csv << ',' << format_double(coeffs.eval(n, grid[i]));
    csv << "\n";
  }
  write_file(out_dir + "/gd.csv", csv.str());
}

}  // namespace sle
