#pragma once

#include <complex>

namespace sle {

struct BesselJY {
  double J;
  double Y;
};

// Cylinder Bessel functions of order 0 or 1, x > 0.  Power series below the
// crossover, Hankel-type asymptotic expansion above; relative accuracy around
// 1e-11 over x in [1e-8, 1e4].
BesselJY bessel_jy(int order, double x);

// H^(1) = J + iY, H^(2) = J - iY.
std::complex<double> hankel(int kind, int order, double x);

// Smoothened step: 0 for y <= 0, 1 for y >= 1, C-infinity monotone in between,
// value 1/2 at y = 1/2.
double smooth_step(double y);

// C-infinity bump: 1 on |y| <= w, 0 on |y| >= w+1.
double bump(double y, double w);

}  // namespace sle
