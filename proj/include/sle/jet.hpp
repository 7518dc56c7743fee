#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

namespace sle {

// Truncated Taylor expansion (jet) of a smooth real function about a point.
// coeff(k) stores f^(k)(x0)/k!.  All arithmetic truncates at the smaller of
// the two operand orders.  Used to push analytic time derivatives of the
// background data through gauge maps, frequency functions and the
// heat-kernel recursions without resorting to finite differences.
class Jet {
 public:
  static constexpr int kMaxOrder = 14;

  Jet() { c_.fill(0.0); }
  explicit Jet(int order) : ord_(clamp(order)) { c_.fill(0.0); }

  static Jet constant(double v, int order) {
    Jet j(order);
    j.c_[0] = v;
    return j;
  }
  static Jet variable(double x0, int order) {
    Jet j(order);
    j.c_[0] = x0;
    if (j.ord_ >= 1) j.c_[1] = 1.0;
    return j;
  }

  int order() const { return ord_; }
  double value() const { return c_[0]; }
  double coeff(int k) const { return (k >= 0 && k <= ord_) ? c_[k] : 0.0; }
  void set_coeff(int k, double v) {
    if (k >= 0 && k <= ord_) c_[k] = v;
  }

  // k-th derivative value: k! * coeff(k)
  double deriv(int k) const {
    double fact = 1.0;
    for (int j = 2; j <= k; ++j) fact *= j;
    return coeff(k) * fact;
  }

  Jet truncated(int order) const {
    Jet r(std::min(order, ord_));
    for (int k = 0; k <= r.ord_; ++k) r.c_[k] = c_[k];
    return r;
  }

  // d/dx; order drops by one
  Jet derivative() const {
    Jet r(ord_ > 0 ? ord_ - 1 : 0);
    for (int k = 0; k <= r.ord_; ++k) r.c_[k] = (k + 1) * c_[k + 1];
    if (ord_ == 0) r.c_[0] = 0.0;
    return r;
  }

  // antiderivative with value c0 at the base point; order grows by one
  Jet antiderivative(double c0) const {
    Jet r(std::min(ord_ + 1, kMaxOrder));
    r.c_[0] = c0;
    for (int k = 0; k < r.ord_; ++k) r.c_[k + 1] = c_[k] / (k + 1);
    return r;
  }

  friend Jet operator+(const Jet& a, const Jet& b) {
    Jet r(std::min(a.ord_, b.ord_));
    for (int k = 0; k <= r.ord_; ++k) r.c_[k] = a.c_[k] + b.c_[k];
    return r;
  }
  friend Jet operator-(const Jet& a, const Jet& b) {
    Jet r(std::min(a.ord_, b.ord_));
    for (int k = 0; k <= r.ord_; ++k) r.c_[k] = a.c_[k] - b.c_[k];
    return r;
  }
  friend Jet operator-(const Jet& a) {
    Jet r = a;
    for (int k = 0; k <= r.ord_; ++k) r.c_[k] = -r.c_[k];
    return r;
  }
  friend Jet operator*(const Jet& a, const Jet& b) {
    Jet r(std::min(a.ord_, b.ord_));
    for (int k = 0; k <= r.ord_; ++k) {
      double s = 0.0;
      for (int j = 0; j <= k; ++j) s += a.c_[j] * b.c_[k - j];
      r.c_[k] = s;
    }
    return r;
  }
  friend Jet operator*(double s, const Jet& a) {
    Jet r = a;
    for (int k = 0; k <= r.ord_; ++k) r.c_[k] *= s;
    return r;
  }
  friend Jet operator*(const Jet& a, double s) { return s * a; }
  friend Jet operator+(const Jet& a, double s) {
    Jet r = a;
    r.c_[0] += s;
    return r;
  }
  friend Jet operator+(double s, const Jet& a) { return a + s; }
  friend Jet operator-(const Jet& a, double s) { return a + (-s); }
  friend Jet operator-(double s, const Jet& a) { return (-a) + s; }
  friend Jet operator/(const Jet& a, const Jet& b) {
    if (b.c_[0] == 0.0) throw std::domain_error("jet division by zero constant term");
    Jet r(std::min(a.ord_, b.ord_));
    for (int k = 0; k <= r.ord_; ++k) {
      double s = a.c_[k];
      for (int j = 1; j <= k; ++j) s -= b.c_[j] * r.c_[k - j];
      r.c_[k] = s / b.c_[0];
    }
    return r;
  }
  friend Jet operator/(const Jet& a, double s) { return a * (1.0 / s); }
  friend Jet operator/(double s, const Jet& a) { return Jet::constant(s, a.ord_) / a; }

  Jet reciprocal() const { return Jet::constant(1.0, ord_) / *this; }

  friend Jet sqrt(const Jet& a) {
    if (a.c_[0] <= 0.0) throw std::domain_error("jet sqrt of non-positive constant term");
    Jet r(a.ord_);
    r.c_[0] = std::sqrt(a.c_[0]);
    for (int k = 1; k <= r.ord_; ++k) {
      double s = a.c_[k];
      for (int j = 1; j < k; ++j) s -= r.c_[j] * r.c_[k - j];
      r.c_[k] = s / (2.0 * r.c_[0]);
    }
    return r;
  }

  friend Jet exp(const Jet& a) {
    Jet r(a.ord_);
    r.c_[0] = std::exp(a.c_[0]);
    for (int k = 1; k <= r.ord_; ++k) {
      double s = 0.0;
      for (int j = 1; j <= k; ++j) s += j * a.c_[j] * r.c_[k - j];
      r.c_[k] = s / k;
    }
    return r;
  }

  friend Jet log(const Jet& a) {
    if (a.c_[0] <= 0.0) throw std::domain_error("jet log of non-positive constant term");
    // integrate a'/a
    Jet d = (a.derivative() / a.truncated(a.ord_ > 0 ? a.ord_ - 1 : 0));
    Jet r = d.antiderivative(std::log(a.c_[0]));
    return r.truncated(a.ord_);
  }

  // integer power, valid for any sign of the constant term
  friend Jet pow_int(const Jet& a, int n) {
    if (n < 0) return pow_int(a, -n).reciprocal();
    Jet r = Jet::constant(1.0, a.ord_);
    Jet base = a;
    int e = n;
    while (e > 0) {
      if (e & 1) r = r * base;
      base = base * base;
      e >>= 1;
    }
    return r;
  }

  // real power, requires positive constant term
  friend Jet pow(const Jet& a, double alpha) { return exp(alpha * log(a)); }

  // f(g(x)): `f` expanded about g.value(), result expanded about g's base point
  friend Jet compose(const Jet& f, const Jet& g) {
    int ord = std::min(f.ord_, g.ord_);
    Jet shift = g.truncated(ord);
    shift.c_[0] = 0.0;
    Jet r = Jet::constant(f.c_[f.ord_], ord);
    for (int k = f.ord_ - 1; k >= 0; --k) r = r * shift + f.c_[k];
    return r;
  }

 private:
  static int clamp(int order) {
    if (order < 0) return 0;
    if (order > kMaxOrder) throw std::domain_error("jet order exceeds kMaxOrder");
    return order;
  }
  std::array<double, kMaxOrder + 1> c_{};
  int ord_ = 0;
};

}  // namespace sle
