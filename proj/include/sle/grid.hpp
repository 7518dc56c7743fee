#pragma once

#include <cstddef>
#include <vector>

#include "sle/errors.hpp"

namespace sle {

// Ordered time grid covering a closed interval.  Units are gauge dependent;
// all internal solvers use the invariant time.
struct Grid {
  std::vector<double> pts;

  static Grid uniform(double lo, double hi, std::size_t n) {
    if (!(lo < hi)) throw DomainError("grid: lo must be < hi");
    if (n < 16) throw DomainError("grid: need at least 16 points");
    Grid g;
    g.pts.resize(n);
    for (std::size_t i = 0; i < n; ++i)
      g.pts[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    g.pts.front() = lo;
    g.pts.back() = hi;
    return g;
  }

  std::size_t size() const { return pts.size(); }
  double operator[](std::size_t i) const { return pts[i]; }
  double lo() const { return pts.front(); }
  double hi() const { return pts.back(); }

  void validate() const {
    if (pts.size() < 16) throw DomainError("grid: need at least 16 points");
    for (std::size_t i = 1; i < pts.size(); ++i)
      if (!(pts[i] > pts[i - 1])) throw DomainError("grid: points must be strictly increasing");
  }

  // index of the cell [pts[i], pts[i+1]] containing x (clamped)
  std::size_t locate(double x) const {
    if (x <= pts.front()) return 0;
    if (x >= pts.back()) return pts.size() - 2;
    std::size_t lo_i = 0, hi_i = pts.size() - 1;
    while (hi_i - lo_i > 1) {
      std::size_t mid = (lo_i + hi_i) / 2;
      if (pts[mid] <= x)
        lo_i = mid;
      else
        hi_i = mid;
    }
    return lo_i;
  }
};

}  // namespace sle
