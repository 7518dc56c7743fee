#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <queue>
#include <vector>

#include "sle/errors.hpp"

namespace sle {

struct QuadOptions {
  double rel_tol = 1e-12;
  double abs_floor = 1e-15;
  int max_intervals = 2000;
  std::vector<double> breakpoints;  // interior points forced as initial panel edges
};

namespace detail {

// Gauss 7 / Kronrod 15 nodes and weights (QUADPACK dqk15).
inline constexpr double kXgk[8] = {
    0.991455371120813, 0.949107912342759, 0.864864423359769, 0.741531185599394,
    0.586087235467691, 0.405845151377397, 0.207784955007898, 0.000000000000000};
inline constexpr double kWgk[8] = {
    0.022935322010529, 0.063092092629979, 0.104790010322250, 0.140653259715525,
    0.169004726639267, 0.190350578064785, 0.204432940075298, 0.209482141084728};
inline constexpr double kWg[4] = {
    0.129484966168870, 0.279705391489277, 0.381830050505119, 0.417959183673469};

inline double qnorm(double v) { return std::abs(v); }
inline double qnorm(const std::complex<double>& v) { return std::abs(v); }

template <class F>
auto gk15(F&& f, double a, double b, double& err) -> decltype(f(a)) {
  using V = decltype(f(a));
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  V fc = f(c);
  V resg = kWg[3] * fc;
  V resk = kWgk[7] * fc;
  for (int i = 0; i < 7; ++i) {
    const double x = h * kXgk[i];
    V f1 = f(c - x);
    V f2 = f(c + x);
    V fsum = f1 + f2;
    resk += kWgk[i] * fsum;
    if (i % 2 == 1) resg += kWg[i / 2] * fsum;
  }
  resk = resk * h;
  resg = resg * h;
  err = qnorm(resk - resg);
  return resk;
}

}  // namespace detail

// Globally adaptive Gauss-Kronrod integration of a smooth (possibly
// oscillatory) integrand over [lo, hi].  Works for real and complex values.
// Throws AccuracyError with the best estimate when the interval budget runs
// out before the tolerance is met.
template <class F>
auto quad(F&& f, double lo, double hi, const QuadOptions& opt = {}) -> decltype(f(lo)) {
  using V = decltype(f(lo));
  if (!(lo < hi)) throw DomainError("quad: lo must be < hi");

  struct Panel {
    double a, b, err;
    V val;
    bool operator<(const Panel& o) const { return err < o.err; }
  };

  std::vector<double> edges{lo};
  for (double b : opt.breakpoints)
    if (b > lo && b < hi) edges.push_back(b);
  edges.push_back(hi);
  std::sort(edges.begin(), edges.end());

  std::priority_queue<Panel> heap;
  V total{};
  double total_err = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    double e;
    V v = detail::gk15(f, edges[i], edges[i + 1], e);
    heap.push(Panel{edges[i], edges[i + 1], e, v});
    total += v;
    total_err += e;
  }

  int n_panels = static_cast<int>(edges.size()) - 1;
  auto tolerance = [&](const V& t) {
    return std::max(opt.abs_floor, opt.rel_tol * detail::qnorm(t));
  };

  while (total_err > tolerance(total) && !heap.empty()) {
    if (n_panels >= opt.max_intervals)
      throw AccuracyError("quad: subdivision budget exhausted", detail::qnorm(total), total_err);
    Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b)
      throw AccuracyError("quad: interval underflow", detail::qnorm(total), total_err);
    double e1, e2;
    V v1 = detail::gk15(f, worst.a, mid, e1);
    V v2 = detail::gk15(f, mid, worst.b, e2);
    total += (v1 + v2) - worst.val;
    total_err += (e1 + e2) - worst.err;
    heap.push(Panel{worst.a, mid, e1, v1});
    heap.push(Panel{mid, worst.b, e2, v2});
    ++n_panels;
  }
  return total;
}

}  // namespace sle
