#pragma once

#include <cstdint>
#include <string>

#include "sle/background.hpp"
#include "sle/window.hpp"

namespace sle {

// Flat key = value configuration with '#' comments and dotted keys.
// Unknown keys are rejected; parse errors carry the line number.
struct RunConfig {
  // background
  std::string bg_kind = "minkowski";
  double m0 = 1.0;
  double nu = 0.0;
  double rate = 1.0;
  double H = 1.0;
  int d = 3;
  double t_lo = std::numeric_limits<double>::quiet_NaN();
  double t_hi = std::numeric_limits<double>::quiet_NaN();
  std::string samples_file;
  std::string gauge = "proper";

  // window
  double win_t1 = std::numeric_limits<double>::quiet_NaN();
  double win_t2 = std::numeric_limits<double>::quiet_NaN();
  double win_w = 0.5;

  // numerics
  int grid_n = 512;
  double quad_tol = 1e-12;
  double ode_tol = 1e-12;

  // momentum grid
  double p_min = 1e-2;
  double p_max = 2e2;
  int p_count = 200;
  std::string p_spacing = "log";

  // command options
  double solve_p = 1.0;
  std::string route = "both";
  double solve_t0 = std::numeric_limits<double>::quiet_NaN();
  int smallp_order = 4;
  int gd_order = 2;
  std::uint64_t seed = 42;
  double perturb_wronskian = 0.0;  // verification hook: breaks normalization on purpose

  static RunConfig parse(const std::string& text);
  static RunConfig parse_file(const std::string& path);
  std::string canonical() const;

  Background make_background() const;
  WindowFunction make_window(const Background& bg) const;
  std::vector<double> make_p_grid() const;  // in units of H for preinflation

  bool operator==(const RunConfig& o) const;  // NaN-tolerant structural equality
};

// shortest round-trip decimal representation
std::string format_double(double v);

}  // namespace sle
