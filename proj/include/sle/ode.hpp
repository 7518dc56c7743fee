#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <vector>

#include "sle/grid.hpp"

namespace sle {

using cplx = std::complex<double>;

// y'' + q(tau) y' + w(tau) y = 0.  q may be empty (treated as 0); w may take
// either sign.
struct LinearOde2 {
  std::function<double(double)> w;
  std::function<double(double)> q;
};

// Piecewise-quintic dense representation of a solution: value, first and
// second derivative at both ends of every accepted step.
class DenseSolution {
 public:
  cplx value(double tau) const;
  cplx deriv(double tau) const;
  double lo() const { return segs_.front().a; }
  double hi() const { return segs_.back().b; }

  struct Seg {
    double a, b;
    cplx y0, v0, s0;  // value, derivative, second derivative at a
    cplx y1, v1, s1;  // same at b
  };
  void add(const Seg& s) { segs_.push_back(s); }
  void finalize();

 private:
  const Seg& find(double tau) const;
  std::vector<Seg> segs_;
};

struct OdeSolveSpec {
  double rel_tol = 1e-12;
  std::vector<double> breakpoints;
  long max_steps = 4000000;
};

// Adaptive embedded Runge-Kutta 5(4), integrating from tau0 (where the data
// are prescribed) outward to cover [lo, hi].
std::shared_ptr<const DenseSolution> solve_linear_ode(const LinearOde2& ode, cplx y0, cplx v0,
                                                      double tau0, double lo, double hi,
                                                      const OdeSolveSpec& spec = {});

// Complex solution sampled on a grid, with dense evaluation in between.
// dense_value/dense_deriv may wrap an integrator solution or any closed-form
// combination of other trajectories.
struct ComplexTrajectory {
  Grid grid;
  std::vector<cplx> value;
  std::vector<cplx> deriv;
  std::function<cplx(double)> dense_value;
  std::function<cplx(double)> dense_deriv;

  cplx eval(double tau) const { return dense_value(tau); }
  cplx eval_deriv(double tau) const { return dense_deriv(tau); }
};

// Solve the ODE with data (z0, w0) at tau0 (defaulting to the grid start) and
// sample on the grid.  tol is relative; must lie in (1e-14, 1e-3).
ComplexTrajectory integrate_ode(const LinearOde2& ode, cplx z0, cplx w0, const Grid& grid,
                                double tol, double tau0, const std::vector<double>& breaks = {});
ComplexTrajectory integrate_ode(const LinearOde2& ode, cplx z0, cplx w0, const Grid& grid,
                                double tol);

}  // namespace sle
