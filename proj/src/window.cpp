#include "sle/window.hpp"

#include <cmath>

#include "sle/errors.hpp"
#include "sle/special.hpp"

namespace sle {

WindowFunction::WindowFunction(Background bg, Profile tag,
                               std::function<double(double)> profile_t, double t1, double t2,
                               std::string name)
    : bg_(std::move(bg)), tag_(tag), profile_(std::move(profile_t)), t1_(t1), t2_(t2),
      name_(std::move(name)) {
  if (!(t1_ < t2_)) throw DomainError("window: t1 must be < t2");
  if (t1_ < bg_.min_window_t() || t2_ > bg_.max_window_t())
    throw DomainError("window: support [" + std::to_string(t1_) + ", " + std::to_string(t2_) +
                      "] exceeds the admissible range [" + std::to_string(bg_.min_window_t()) +
                      ", " + std::to_string(bg_.max_window_t()) + "]");
  tau_lo_ = bg_.tau_of_t(t1_);
  tau_hi_ = bg_.tau_of_t(t2_);
}

double WindowFunction::f2_gauge(double t) const {
  if (t <= t1_ || t >= t2_) return 0.0;
  double p = scale2_ * profile_(t);
  if (p <= 0.0) return 0.0;
  switch (tag_) {
    case Profile::cosm: return p * std::pow(bg_.a_of_t(t), -bg_.dim());
    case Profile::conf: return p * std::pow(bg_.a_of_t(t), 1 - bg_.dim());
    case Profile::prop: return p;
  }
  return p;
}

double WindowFunction::f2_tau(double tau) const {
  if (tau <= tau_lo_ || tau >= tau_hi_) return 0.0;
  return f2_gauge(bg_.t_of_tau(tau));
}

WindowFunction WindowFunction::scaled(double s) const {
  if (!(s > 0.0)) throw DomainError("window: scale must be positive");
  WindowFunction w = *this;
  w.scale2_ *= s * s;
  return w;
}

WindowFunction window_family(const Background& bg, double t1, double t2, double w) {
  if (!(w > 0.0)) throw DomainError("window_family: w must be positive");
  const double center = 0.5 * (t1 + t2);
  const double scale = (t2 - t1) / (2.0 * (w + 1.0));
  auto profile = [center, scale, w](double t) { return bump((t - center) / scale, w); };
  return WindowFunction(bg, WindowFunction::Profile::cosm, profile, t1, t2,
                        "tophat[" + std::to_string(t1) + "," + std::to_string(t2) + ";w=" +
                            std::to_string(w) + "]");
}

double window_integral(const WindowFunction& f, const std::function<double(double)>& g,
                       const QuadOptions& opt_in) {
  QuadOptions opt = opt_in;
  auto extra = f.background().tau_breakpoints(f.tau_lo(), f.tau_hi());
  opt.breakpoints.insert(opt.breakpoints.end(), extra.begin(), extra.end());
  return quad([&](double tau) { return f.f2_tau(tau) * g(tau); }, f.tau_lo(), f.tau_hi(), opt);
}

double window_norm(const WindowFunction& f, const QuadOptions& opt) {
  return window_integral(f, [](double) { return 1.0; }, opt);
}

double abar(const Background& bg, const WindowFunction& f, const QuadOptions& opt) {
  const double num = window_norm(f, opt);
  if (!(num > 0.0)) throw DomainError("abar: degenerate window, int f^2 must be positive");
  const double den =
      window_integral(f, [&](double tau) { return bg.omega2_sq(tau); }, opt);
  return std::sqrt(num / den);
}

}  // namespace sle
