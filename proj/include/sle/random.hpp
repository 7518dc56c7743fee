#pragma once

#include <cstdint>
#include <random>
#include <utility>

#include "sle/ode.hpp"

namespace sle {

// Seeded sampler for Bogoliubov pairs (a, b) with |a|^2 - |b|^2 = 1,
// parameterized as a = cosh r e^{i phi}, b = sinh r e^{i psi}.  Uniform
// deviates are derived from the raw engine output, so streams are identical
// across standard libraries.
class BogoliubovSampler {
 public:
  explicit BogoliubovSampler(std::uint64_t seed) : rng_(seed) {}

  double uniform() { return static_cast<double>(rng_() >> 11) * 0x1.0p-53; }

  std::pair<cplx, cplx> next(double r_max = 2.0) {
    const double r = r_max * uniform();
    const double phi = 2.0 * M_PI * uniform();
    const double psi = 2.0 * M_PI * uniform();
    const cplx a = std::cosh(r) * std::exp(cplx(0.0, phi));
    const cplx b = std::sinh(r) * std::exp(cplx(0.0, psi));
    return {a, b};
  }

 private:
  std::mt19937_64 rng_;
};

}  // namespace sle
