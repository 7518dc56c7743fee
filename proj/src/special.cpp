#include "sle/special.hpp"

#include <cmath>

#include "sle/errors.hpp"

namespace sle {

namespace {

constexpr long double kGamma = 0.5772156649015328606065120900824024L;
constexpr long double kPi = 3.1415926535897932384626433832795029L;
constexpr double kSeriesCut = 12.0;

// Ascending series, x < kSeriesCut.  Accumulated in long double; the largest
// term at x ~ 12 costs about five digits of cancellation.
BesselJY series_jy(int order, double x) {
  const long double xl = x;
  const long double q = 0.25L * xl * xl;
  const long double lg = std::log(0.5L * xl) + kGamma;

  if (order == 0) {
    long double j = 1.0L, term = 1.0L;
    long double ysum = 0.0L, hk = 0.0L;
    for (int k = 1; k <= 40; ++k) {
      term *= -q / (static_cast<long double>(k) * k);
      j += term;
      hk += 1.0L / k;
      ysum += -term * hk;  // (-1)^{k+1} H_k q^k/(k!)^2
      if (std::abs(term) < 1e-22L * std::abs(j) && k > 4) break;
    }
    long double y = (2.0L / kPi) * (lg * j + ysum);
    return {static_cast<double>(j), static_cast<double>(y)};
  }

  // order == 1
  long double term = 1.0L;  // q^k/(k!(k+1)!)
  long double jsum = 1.0L;
  long double hsum = 1.0L;  // (H_0 + H_1) = 1 at k = 0
  long double ysum = 1.0L;  // (-1)^k (H_k + H_{k+1}) q^k/(k!(k+1)!)
  long double hk = 0.0L, hk1 = 1.0L;
  long double sgn = 1.0L;
  for (int k = 1; k <= 40; ++k) {
    term *= q / (static_cast<long double>(k) * (k + 1));
    sgn = -sgn;
    jsum += sgn * term;
    hk += 1.0L / k;
    hk1 += 1.0L / (k + 1);
    hsum = hk + hk1;
    ysum += sgn * term * hsum;
    if (term < 1e-22L * std::abs(jsum) && k > 4) break;
  }
  long double j = 0.5L * xl * jsum;
  long double y = (2.0L / kPi) * (lg * j - 1.0L / xl - 0.25L * xl * ysum);
  return {static_cast<double>(j), static_cast<double>(y)};
}

// Hankel asymptotic expansion, x >= kSeriesCut:
//   H^(1)_nu(x) = sqrt(2/(pi x)) e^{i(x - nu pi/2 - pi/4)} sum_k i^k A_k(nu) x^{-k}
BesselJY asymptotic_jy(int order, double x) {
  const long double xl = x;
  const long double nu2_4 = 4.0L * order * order;
  long double a = 1.0L;
  std::complex<long double> s(1.0L, 0.0L);
  std::complex<long double> ipow(0.0L, 1.0L);
  long double prev = 1.0L;
  for (int k = 1; k <= 18; ++k) {
    a *= (nu2_4 - (2.0L * k - 1) * (2.0L * k - 1)) / (8.0L * k);
    const long double mag = std::abs(a) / std::pow(xl, k);
    if (mag > prev) break;  // past the smallest term
    s += ipow * (a / std::pow(xl, k));
    ipow *= std::complex<long double>(0.0L, 1.0L);
    prev = mag;
  }
  const long double chi = xl - 0.5L * order * kPi - 0.25L * kPi;
  const std::complex<long double> phase(std::cos(chi), std::sin(chi));
  const std::complex<long double> h1 = std::sqrt(2.0L / (kPi * xl)) * phase * s;
  return {static_cast<double>(h1.real()), static_cast<double>(h1.imag())};
}

}  // namespace

BesselJY bessel_jy(int order, double x) {
  if (order != 0 && order != 1) throw DomainError("bessel_jy: order must be 0 or 1");
  if (!(x > 0.0)) throw DomainError("bessel_jy: x must be positive");
  return x < kSeriesCut ? series_jy(order, x) : asymptotic_jy(order, x);
}

std::complex<double> hankel(int kind, int order, double x) {
  if (kind != 1 && kind != 2) throw DomainError("hankel: kind must be 1 or 2");
  BesselJY jy = bessel_jy(order, x);
  return kind == 1 ? std::complex<double>(jy.J, jy.Y) : std::complex<double>(jy.J, -jy.Y);
}

double smooth_step(double y) {
  if (y <= 0.0) return 0.0;
  if (y >= 1.0) return 1.0;
  // h(y) = e^{-1/y} / (e^{-1/y} + e^{-1/(1-y)}) = 1 / (1 + e^{1/y - 1/(1-y)})
  const double arg = 1.0 / y - 1.0 / (1.0 - y);
  if (arg > 700.0) return 0.0;
  if (arg < -700.0) return 1.0;
  return 1.0 / (1.0 + std::exp(arg));
}

double bump(double y, double w) {
  if (!(w > 0.0)) throw DomainError("bump: width w must be positive");
  const double num = y * y - w * w;
  const double den = (w + 1.0) * (w + 1.0) - w * w;
  return 1.0 - smooth_step(num / den);
}

}  // namespace sle
