#include "sle/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "sle/errors.hpp"

namespace sle {

std::string format_double(double v) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  (void)ec;
  return std::string(buf, ptr);
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_num(const std::string& key, const std::string& v, int line) {
  try {
    std::size_t used = 0;
    double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing characters");
    if (!std::isfinite(x))
      throw DomainError("config line " + std::to_string(line) + ": " + key + " must be finite");
    return x;
  } catch (const DomainError&) {
    throw;
  } catch (const std::exception&) {
    throw DomainError("config line " + std::to_string(line) + ": invalid number for " + key);
  }
}

long parse_int(const std::string& key, const std::string& v, int line) {
  try {
    std::size_t used = 0;
    long x = std::stol(v, &used);
    if (used != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw DomainError("config line " + std::to_string(line) + ": invalid integer for " + key);
  }
}

}  // namespace

RunConfig RunConfig::parse(const std::string& text) {
  RunConfig cfg;
  std::map<std::string, std::function<void(const std::string&, int)>> setters;
  auto reg_num = [&](const std::string& key, double& field) {
    setters[key] = [key, &field](const std::string& v, int line) {
      field = parse_num(key, v, line);
    };
  };
  auto reg_int = [&](const std::string& key, int& field) {
    setters[key] = [key, &field](const std::string& v, int line) {
      field = (int)parse_int(key, v, line);
    };
  };
  auto reg_str = [&](const std::string& key, std::string& field) {
    setters[key] = [&field](const std::string& v, int) { field = v; };
  };
  reg_str("background.kind", cfg.bg_kind);
  reg_num("background.m0", cfg.m0);
  reg_num("background.nu", cfg.nu);
  reg_num("background.rate", cfg.rate);
  reg_num("background.H", cfg.H);
  reg_int("background.d", cfg.d);
  reg_num("background.t_lo", cfg.t_lo);
  reg_num("background.t_hi", cfg.t_hi);
  reg_str("background.samples_file", cfg.samples_file);
  reg_str("background.gauge", cfg.gauge);
  reg_num("window.t1", cfg.win_t1);
  reg_num("window.t2", cfg.win_t2);
  reg_num("window.w", cfg.win_w);
  reg_int("grid.n", cfg.grid_n);
  reg_num("quad.tol", cfg.quad_tol);
  reg_num("ode.tol", cfg.ode_tol);
  reg_num("p.min", cfg.p_min);
  reg_num("p.max", cfg.p_max);
  reg_int("p.count", cfg.p_count);
  reg_str("p.spacing", cfg.p_spacing);
  reg_num("solve.p", cfg.solve_p);
  reg_str("solve.route", cfg.route);
  reg_num("solve.t0", cfg.solve_t0);
  reg_int("smallp.order", cfg.smallp_order);
  reg_int("gd.order", cfg.gd_order);
  setters["seed"] = [&cfg](const std::string& v, int line) {
    cfg.seed = (std::uint64_t)parse_int("seed", v, line);
  };
  reg_num("verify.perturb_wronskian", cfg.perturb_wronskian);

  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw DomainError("config line " + std::to_string(line_no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    auto it = setters.find(key);
    if (it == setters.end())
      throw DomainError("config line " + std::to_string(line_no) + ": unknown key '" + key +
                        "'");
    it->second(value, line_no);
  }

  // validation: field-level first, then cross-field via construction
  if (cfg.p_count < 1) throw DomainError("config: p.count must be >= 1");
  if (!(cfg.p_min > 0.0) || !(cfg.p_max >= cfg.p_min))
    throw DomainError("config: p grid must be positive with p.min <= p.max");
  if (cfg.p_spacing != "log" && cfg.p_spacing != "linear")
    throw DomainError("config: p.spacing must be 'log' or 'linear'");
  if (cfg.route != "fiducial" && cfg.route != "commutator" && cfg.route != "both")
    throw DomainError("config: solve.route must be fiducial|commutator|both");
  if (cfg.grid_n < 16) throw DomainError("config: grid.n must be >= 16");
  if (!(cfg.quad_tol > 0 && cfg.quad_tol < 1e-3))
    throw DomainError("config: quad.tol out of range");
  if (!(cfg.ode_tol > 1e-14 && cfg.ode_tol < 1e-3))
    throw DomainError("config: ode.tol out of range");
  if (cfg.smallp_order < 1 || cfg.smallp_order > 6)
    throw DomainError("config: smallp.order must lie in [1, 6]");
  if (cfg.gd_order < 1 || cfg.gd_order > 4)
    throw DomainError("config: gd.order must lie in [1, 4]");
  Background bg = cfg.make_background();
  (void)cfg.make_window(bg);
  return cfg;
}

RunConfig RunConfig::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DomainError("config: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str());
}

std::string RunConfig::canonical() const {
  std::ostringstream out;
  out << "background.H = " << format_double(H) << "\n";
  out << "background.d = " << d << "\n";
  if (!samples_file.empty()) out << "background.samples_file = " << samples_file << "\n";
  out << "background.gauge = " << gauge << "\n";
  out << "background.kind = " << bg_kind << "\n";
  out << "background.m0 = " << format_double(m0) << "\n";
  out << "background.nu = " << format_double(nu) << "\n";
  out << "background.rate = " << format_double(rate) << "\n";
  if (!std::isnan(t_lo)) out << "background.t_lo = " << format_double(t_lo) << "\n";
  if (!std::isnan(t_hi)) out << "background.t_hi = " << format_double(t_hi) << "\n";
  out << "gd.order = " << gd_order << "\n";
  out << "grid.n = " << grid_n << "\n";
  out << "ode.tol = " << format_double(ode_tol) << "\n";
  out << "p.count = " << p_count << "\n";
  out << "p.max = " << format_double(p_max) << "\n";
  out << "p.min = " << format_double(p_min) << "\n";
  out << "p.spacing = " << p_spacing << "\n";
  out << "quad.tol = " << format_double(quad_tol) << "\n";
  out << "seed = " << seed << "\n";
  out << "smallp.order = " << smallp_order << "\n";
  out << "solve.p = " << format_double(solve_p) << "\n";
  out << "solve.route = " << route << "\n";
  if (!std::isnan(solve_t0)) out << "solve.t0 = " << format_double(solve_t0) << "\n";
  if (perturb_wronskian != 0.0)
    out << "verify.perturb_wronskian = " << format_double(perturb_wronskian) << "\n";
  if (!std::isnan(win_t1)) out << "window.t1 = " << format_double(win_t1) << "\n";
  if (!std::isnan(win_t2)) out << "window.t2 = " << format_double(win_t2) << "\n";
  out << "window.w = " << format_double(win_w) << "\n";
  return out.str();
}

Background RunConfig::make_background() const {
  auto pick = [&](double dflt_lo, double dflt_hi) {
    const double lo = std::isnan(t_lo) ? dflt_lo : t_lo;
    const double hi = std::isnan(t_hi) ? dflt_hi : t_hi;
    return std::make_pair(lo, hi);
  };
  if (bg_kind == "minkowski") {
    auto [lo, hi] = pick(-5.0, 5.0);
    return Background::minkowski(m0, lo, hi, d);
  }
  if (bg_kind == "power_law") {
    auto [lo, hi] = pick(nu == 0.0 ? -3.0 : 0.25, nu == 0.0 ? 3.0 : 4.0);
    return Background::power_law(nu, rate, lo, hi, d);
  }
  if (bg_kind == "desitter") {
    auto [lo, hi] = pick(-3.0 / H, 0.9 / H);
    return Background::desitter(H, lo, hi, d);
  }
  if (bg_kind == "preinflation") {
    if (d != 3) throw DomainError("config: preinflation requires background.d = 3");
    return Background::preinflation(H);
  }
  if (bg_kind == "tabulated") {
    std::ifstream in(samples_file);
    if (!in) throw DomainError("config: cannot open background.samples_file " + samples_file);
    std::vector<double> ts, as;
    std::string line;
    while (std::getline(in, line)) {
      line = trim(line);
      if (line.empty() || line[0] == '#') continue;
      std::replace(line.begin(), line.end(), ',', ' ');
      std::istringstream ls(line);
      double t, a;
      if (!(ls >> t >> a)) throw DomainError("config: malformed sample row '" + line + "'");
      ts.push_back(t);
      as.push_back(a);
    }
    Gauge g = gauge == "conformal"      ? Gauge::conformal
              : gauge == "cosmological" ? Gauge::cosmological
                                        : Gauge::proper;
    return Background::tabulated(g, d, std::move(ts), std::move(as), m0);
  }
  throw DomainError("config: unknown background.kind '" + bg_kind + "'");
}

WindowFunction RunConfig::make_window(const Background& bg) const {
  double t1 = win_t1, t2 = win_t2;
  if (std::isnan(t1) || std::isnan(t2)) {
    if (bg.kind() == "preinflation") {
      t1 = -0.3 / H;
      t2 = 0.5 / H;
    } else {
      const double span = bg.t_hi() - bg.t_lo();
      t1 = bg.t_lo() + 0.3 * span;
      t2 = bg.t_hi() - 0.3 * span;
    }
  }
  return window_family(bg, t1, t2, win_w);
}

bool RunConfig::operator==(const RunConfig& o) const {
  auto eq = [](double a, double b) { return (std::isnan(a) && std::isnan(b)) || a == b; };
  return bg_kind == o.bg_kind && eq(m0, o.m0) && eq(nu, o.nu) && eq(rate, o.rate) &&
         eq(H, o.H) && d == o.d && eq(t_lo, o.t_lo) && eq(t_hi, o.t_hi) &&
         samples_file == o.samples_file && gauge == o.gauge && eq(win_t1, o.win_t1) &&
         eq(win_t2, o.win_t2) && eq(win_w, o.win_w) && grid_n == o.grid_n &&
         eq(quad_tol, o.quad_tol) && eq(ode_tol, o.ode_tol) && eq(p_min, o.p_min) &&
         eq(p_max, o.p_max) && p_count == o.p_count && p_spacing == o.p_spacing &&
         eq(solve_p, o.solve_p) && route == o.route && eq(solve_t0, o.solve_t0) &&
         smallp_order == o.smallp_order && gd_order == o.gd_order && seed == o.seed &&
         eq(perturb_wronskian, o.perturb_wronskian);
}

std::vector<double> RunConfig::make_p_grid() const {
  std::vector<double> p(p_count);
  const double unit = bg_kind == "preinflation" || bg_kind == "desitter" ? H : 1.0;
  if (p_count == 1) {
    p[0] = p_min * unit;
    return p;
  }
  for (int i = 0; i < p_count; ++i) {
    const double s = static_cast<double>(i) / (p_count - 1);
    p[i] = p_spacing == "log" ? p_min * std::pow(p_max / p_min, s)
                              : p_min + (p_max - p_min) * s;
    p[i] *= unit;
  }
  return p;
}

}  // namespace sle
