#include "sle/ode.hpp"

#include <algorithm>
#include <cmath>

#include "sle/errors.hpp"

namespace sle {

namespace {

struct State {
  cplx y, v;
};

inline State operator+(const State& a, const State& b) { return {a.y + b.y, a.v + b.v}; }
inline State operator*(double s, const State& a) { return {s * a.y, s * a.v}; }

// Dormand-Prince 5(4) tableau.
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                 b6 = 11.0 / 84;
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

class Stepper {
 public:
  Stepper(const LinearOde2& ode, double rel_tol, long max_steps)
      : ode_(ode), rtol_(rel_tol), max_steps_(max_steps) {}

  State rhs(double tau, const State& s) const {
    double w = ode_.w(tau);
    if (!std::isfinite(w)) throw DomainError("ode: non-finite coefficient w(tau)");
    cplx acc = -w * s.y;
    if (ode_.q) {
      double q = ode_.q(tau);
      if (!std::isfinite(q)) throw DomainError("ode: non-finite coefficient q(tau)");
      acc -= q * s.v;
    }
    return {s.v, acc};
  }

  // Integrate from tau_from to tau_to (either direction), appending dense
  // segments and invoking `on_step` is not needed; data land in `dense`.
  State run(State s, double tau_from, double tau_to, DenseSolution& dense) {
    if (tau_from == tau_to) return s;
    const double dir = tau_to > tau_from ? 1.0 : -1.0;
    const double span = std::abs(tau_to - tau_from);
    double tau = tau_from;
    double h = dir * std::min(span, 0.01 * span + 1e-3 * span);
    State k1 = rhs(tau, s);
    double atol_y = rtol_ * std::max({std::abs(s.y), std::abs(s.v), 1e-30});
    long steps = 0;

    while (dir * (tau_to - tau) > 0) {
      if (++steps > max_steps_) throw StiffnessError("ode: step budget exhausted");
      if (std::abs(h) < 1e-14 * span) throw StiffnessError("ode: step-size underflow");
      if (dir * (tau + h - tau_to) > 0) h = tau_to - tau;

      State k2 = rhs(tau + c2 * h, s + (h * a21) * k1);
      State k3 = rhs(tau + c3 * h, s + (h * a31) * k1 + (h * a32) * k2);
      State k4 = rhs(tau + c4 * h, s + (h * a41) * k1 + (h * a42) * k2 + (h * a43) * k3);
      State k5 = rhs(tau + c5 * h,
                     s + (h * a51) * k1 + (h * a52) * k2 + (h * a53) * k3 + (h * a54) * k4);
      State k6 = rhs(tau + h, s + (h * a61) * k1 + (h * a62) * k2 + (h * a63) * k3 +
                                  (h * a64) * k4 + (h * a65) * k5);
      State ynew = s + (h * b1) * k1 + (h * b3) * k3 + (h * b4) * k4 + (h * b5) * k5 +
                   (h * b6) * k6;
      State k7 = rhs(tau + h, ynew);
      State errv = (h * e1) * k1 + (h * e3) * k3 + (h * e4) * k4 + (h * e5) * k5 +
                   (h * e6) * k6 + (h * e7) * k7;

      auto comp_err = [&](double e, double y0c, double y1c) {
        double sk = atol_y + rtol_ * std::max(std::abs(y0c), std::abs(y1c));
        return e / sk;
      };
      double er = 0.0;
      er += std::pow(comp_err(std::abs(errv.y.real()), s.y.real(), ynew.y.real()), 2);
      er += std::pow(comp_err(std::abs(errv.y.imag()), s.y.imag(), ynew.y.imag()), 2);
      er += std::pow(comp_err(std::abs(errv.v.real()), s.v.real(), ynew.v.real()), 2);
      er += std::pow(comp_err(std::abs(errv.v.imag()), s.v.imag(), ynew.v.imag()), 2);
      er = std::sqrt(er / 4.0);

      if (er <= 1.0) {
        DenseSolution::Seg seg;
        double ta = tau, tb = tau + h;
        State sa = s, sb = ynew;
        State da = k1, db = k7;
        if (h < 0) {
          std::swap(ta, tb);
          std::swap(sa, sb);
          std::swap(da, db);
        }
        seg.a = ta;
        seg.b = tb;
        seg.y0 = sa.y;
        seg.v0 = sa.v;
        seg.s0 = da.v;
        seg.y1 = sb.y;
        seg.v1 = sb.v;
        seg.s1 = db.v;
        dense.add(seg);

        tau += h;
        s = ynew;
        k1 = k7;  // FSAL
        atol_y = std::max(atol_y, rtol_ * 1e-6 * std::max(std::abs(s.y), std::abs(s.v)));
      }
      double fac = 0.9 * std::pow(std::max(er, 1e-10), -0.2);
      h *= std::clamp(fac, 0.2, 5.0);
    }
    return s;
  }

 private:
  const LinearOde2& ode_;
  double rtol_;
  long max_steps_;
};

}  // namespace

void DenseSolution::finalize() {
  std::sort(segs_.begin(), segs_.end(),
            [](const Seg& x, const Seg& y) { return x.a < y.a; });
}

const DenseSolution::Seg& DenseSolution::find(double tau) const {
  const double span = segs_.back().b - segs_.front().a;
  if (tau < segs_.front().a - 1e-9 * span || tau > segs_.back().b + 1e-9 * span)
    throw DomainError("dense solution: evaluation outside the integrated range");
  std::size_t lo = 0, hi = segs_.size();
  while (hi - lo > 1) {
    std::size_t mid = (lo + hi) / 2;
    if (segs_[mid].a <= tau)
      lo = mid;
    else
      hi = mid;
  }
  return segs_[lo];
}

cplx DenseSolution::value(double tau) const {
  const Seg& g = find(tau);
  const double h = g.b - g.a;
  const double s = (tau - g.a) / h;
  const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
  const double H0 = 1 - 10 * s3 + 15 * s4 - 6 * s5;
  const double H1 = s - 6 * s3 + 8 * s4 - 3 * s5;
  const double H2 = 0.5 * s2 - 1.5 * s3 + 1.5 * s4 - 0.5 * s5;
  const double H3 = 10 * s3 - 15 * s4 + 6 * s5;
  const double H4 = -4 * s3 + 7 * s4 - 3 * s5;
  const double H5 = 0.5 * s3 - s4 + 0.5 * s5;
  return H0 * g.y0 + (H1 * h) * g.v0 + (H2 * h * h) * g.s0 + H3 * g.y1 + (H4 * h) * g.v1 +
         (H5 * h * h) * g.s1;
}

cplx DenseSolution::deriv(double tau) const {
  const Seg& g = find(tau);
  const double h = g.b - g.a;
  const double s = (tau - g.a) / h;
  const double s2 = s * s, s3 = s2 * s, s4 = s3 * s;
  const double d0 = -30 * s2 + 60 * s3 - 30 * s4;
  const double d1 = 1 - 18 * s2 + 32 * s3 - 15 * s4;
  const double d2 = s - 4.5 * s2 + 6 * s3 - 2.5 * s4;
  const double d3 = 30 * s2 - 60 * s3 + 30 * s4;
  const double d4 = -12 * s2 + 28 * s3 - 15 * s4;
  const double d5 = 1.5 * s2 - 4 * s3 + 2.5 * s4;
  return (d0 / h) * g.y0 + d1 * g.v0 + (d2 * h) * g.s0 + (d3 / h) * g.y1 + d4 * g.v1 +
         (d5 * h) * g.s1;
}

std::shared_ptr<const DenseSolution> solve_linear_ode(const LinearOde2& ode, cplx y0, cplx v0,
                                                      double tau0, double lo, double hi,
                                                      const OdeSolveSpec& spec) {
  if (!(lo <= tau0 && tau0 <= hi)) throw DomainError("ode: tau0 outside [lo, hi]");
  auto dense = std::make_shared<DenseSolution>();
  Stepper stepper(ode, spec.rel_tol, spec.max_steps);

  std::vector<double> fw{tau0}, bw{tau0};
  for (double b : spec.breakpoints) {
    if (b > tau0 && b < hi) fw.push_back(b);
    if (b < tau0 && b > lo) bw.push_back(b);
  }
  fw.push_back(hi);
  bw.push_back(lo);
  std::sort(fw.begin(), fw.end());
  std::sort(bw.rbegin(), bw.rend());

  State s{y0, v0};
  for (std::size_t i = 0; i + 1 < fw.size(); ++i) s = stepper.run(s, fw[i], fw[i + 1], *dense);
  s = {y0, v0};
  for (std::size_t i = 0; i + 1 < bw.size(); ++i) s = stepper.run(s, bw[i], bw[i + 1], *dense);

  if (lo == hi) {
    // degenerate request: single stationary segment
    State k = stepper.rhs(tau0, {y0, v0});
    DenseSolution::Seg seg{lo, lo, y0, v0, k.v, y0, v0, k.v};
    dense->add(seg);
  }
  dense->finalize();
  return dense;
}

ComplexTrajectory integrate_ode(const LinearOde2& ode, cplx z0, cplx w0, const Grid& grid,
                                double tol, double tau0, const std::vector<double>& breaks) {
  if (!(tol > 1e-14 && tol < 1e-3)) throw DomainError("ode: tol must lie in (1e-14, 1e-3)");
  grid.validate();
  OdeSolveSpec spec;
  spec.rel_tol = tol;
  spec.breakpoints = breaks;
  ComplexTrajectory tr;
  tr.grid = grid;
  auto dense = solve_linear_ode(ode, z0, w0, tau0, grid.lo(), grid.hi(), spec);
  tr.dense_value = [dense](double tau) { return dense->value(tau); };
  tr.dense_deriv = [dense](double tau) { return dense->deriv(tau); };
  tr.value.resize(grid.size());
  tr.deriv.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    tr.value[i] = dense->value(grid[i]);
    tr.deriv[i] = dense->deriv(grid[i]);
  }
  return tr;
}

ComplexTrajectory integrate_ode(const LinearOde2& ode, cplx z0, cplx w0, const Grid& grid,
                                double tol) {
  return integrate_ode(ode, z0, w0, grid, tol, grid.lo(), {});
}

}  // namespace sle
