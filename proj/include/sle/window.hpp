#pragma once

#include <functional>
#include <string>

#include "sle/background.hpp"
#include "sle/quadrature.hpp"

namespace sle {

// Smooth compactly supported averaging weight f(tau)^2.  The stored profile
// lives in gauge time under one of the conventions
//   cosm: profile = f^2 a^d, conf: profile = f^2 a^{d-1}, prop: profile = f^2,
// and evaluation always returns the invariant f(tau)^2.
class WindowFunction {
 public:
  enum class Profile { cosm, conf, prop };

  WindowFunction(Background bg, Profile tag, std::function<double(double)> profile_t, double t1,
                 double t2, std::string name = "");

  double f2_tau(double tau) const;    // invariant profile
  double f2_gauge(double t) const;    // invariant profile at gauge time t
  double tau_lo() const { return tau_lo_; }
  double tau_hi() const { return tau_hi_; }
  double t1() const { return t1_; }
  double t2() const { return t2_; }
  Profile tag() const { return tag_; }
  const Background& background() const { return bg_; }
  const std::string& name() const { return name_; }

  // f -> s*f
  WindowFunction scaled(double s) const;

 private:
  Background bg_;
  Profile tag_;
  std::function<double(double)> profile_;
  double t1_, t2_;
  double tau_lo_, tau_hi_;
  double scale2_ = 1.0;
  std::string name_;
};

// Smoothened top-hat window with gauge-time support [t1, t2] and
// plateau-to-wall ratio w; the stored profile uses the cosm convention.
WindowFunction window_family(const Background& bg, double t1, double t2, double w);

// integral over tau of f(tau)^2 g(tau)
double window_integral(const WindowFunction& f, const std::function<double(double)>& g,
                       const QuadOptions& opt = {});
// integral over tau of f(tau)^2
double window_norm(const WindowFunction& f, const QuadOptions& opt = {});

// abar = (int f^2 / int f^2 a^{2d-2})^{1/2}
double abar(const Background& bg, const WindowFunction& f, const QuadOptions& opt = {});

}  // namespace sle
