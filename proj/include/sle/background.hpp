#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "sle/jet.hpp"

namespace sle {

enum class Gauge { cosmological, conformal, proper };

std::string to_string(Gauge g);

// Friedmann-Lemaitre background data: spatial dimension, scale factor and
// mass function of a gauge time coordinate, plus the maps to the invariant
// time in which all mode equations are solved.  Immutable and cheap to copy.
class Background {
 public:
  int dim() const;
  Gauge gauge() const;
  const std::string& kind() const;
  double t_lo() const;
  double t_hi() const;
  int max_deriv_order() const;

  // gauge-time data
  double a_of_t(double t) const;
  double m_of_t(double t) const;
  Jet a_t_jet(double t, int ord) const;
  Jet m_t_jet(double t, int ord) const;
  double lapse_density(double t) const;  // nbar(t) = Nbar/a^d

  // invariant time tau, normalized to tau(t_lo) = 0
  double tau_of_t(double t) const;
  double t_of_tau(double tau) const;
  double tau_lo() const { return 0.0; }
  double tau_hi() const;

  // data as functions of tau
  double a_of_tau(double tau) const;
  Jet a_tau_jet(double tau, int ord) const;
  Jet m_tau_jet(double tau, int ord) const;
  double omega0_sq(double tau) const;  // a^{2d} m^2
  double omega2_sq(double tau) const;  // a^{2d-2}
  double omega_p_sq(double p, double tau) const;
  Jet omega0_sq_jet(double tau, int ord) const;
  Jet omega2_sq_jet(double tau, int ord) const;

  // interior non-smooth points (tau coordinates), clipped to [lo, hi]
  std::vector<double> tau_breakpoints(double lo, double hi) const;

  // admissible gauge-time window support
  double min_window_t() const;
  double max_window_t() const;

  static Background minkowski(double m0, double t_lo = -5.0, double t_hi = 5.0, int d = 3);
  // a(tau) = (rate*t)^k with k = (1-2nu)/(2(d-1)nu); nu = 0 is the kinetic
  // domination limit a(tau) = exp(rate*t).  Proper gauge, so t is tau up to
  // the offset.
  static Background power_law(double nu, double rate = 1.0, double t_lo = 0.5, double t_hi = 3.0,
                              int d = 3);
  static Background desitter(double H, double t_lo = -3.0, double t_hi = 0.9, int d = 3);
  static Background preinflation(double H);
  static Background tabulated(Gauge g, int d, std::vector<double> t_samples,
                              std::vector<double> a_samples, double m0 = 0.0);
  static Background custom(Gauge g, int d, std::function<Jet(double, int)> a_jet,
                           std::function<Jet(double, int)> m_jet, double t_lo, double t_hi,
                           int max_ord);

 private:
  struct Core;
  std::shared_ptr<const Core> core_;
  explicit Background(std::shared_ptr<const Core> core);
};

// Frequency functions of the mode equation in invariant time.
struct FrequencyPair {
  std::function<double(double)> omega0_sq;
  std::function<double(double)> omega2_sq;
};

FrequencyPair frequencies(const Background& bg);

}  // namespace sle
