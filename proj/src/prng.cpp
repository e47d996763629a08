#include "rdk/prng.hpp"

#include <cmath>
#include <stdexcept>

namespace rdk {

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t RandomSource::next_u64() {
  state_ += 0x9E3779B97F4A7C15ULL;
  return mix64(state_);
}

double RandomSource::next_double() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RandomSource::next_gaussian() {
  for (;;) {
    const double u = 2.0 * next_double() - 1.0;
    const double v = 2.0 * next_double() - 1.0;
    const double s = u * u + v * v;
    if (s > 0.0 && s < 1.0) {
      return u * std::sqrt(-2.0 * std::log(s) / s);
    }
  }
}

double RandomSource::next_gamma(double shape) {
  if (!(shape > 0.0)) {
    throw std::invalid_argument("next_gamma: shape must be positive");
  }
  if (shape < 1.0) {
    // Gamma(a) = Gamma(a+1) * U^(1/a)
    const double g = next_gamma(shape + 1.0);
    const double u = next_double();
    return g * std::pow(u > 0.0 ? u : 0x1.0p-53, 1.0 / shape);
  }
  const double d = shape - 1.0 / 3.0;
  const double c = 1.0 / std::sqrt(9.0 * d);
  for (;;) {
    const double x = next_gaussian();
    const double t = 1.0 + c * x;
    if (t <= 0.0) continue;
    const double v = t * t * t;
    const double u = next_double();
    if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
    if (u > 0.0 && std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) {
      return d * v;
    }
  }
}

double RandomSource::next_chi_square(double df) {
  if (!(df > 0.0)) {
    throw std::invalid_argument("next_chi_square: df must be positive");
  }
  return 2.0 * next_gamma(0.5 * df);
}

double RandomSource::next_student_t(double df) {
  if (!(df > 0.0)) {
    throw std::invalid_argument("next_student_t: df must be positive");
  }
  const double z = next_gaussian();
  const double v = next_chi_square(df);
  return z / std::sqrt(v / df);
}

double RandomSource::next_exponential() { return -std::log1p(-next_double()); }

RandomSource RandomSource::split(std::uint64_t key) const {
  return RandomSource(mix64(seed_ ^ mix64(key + 0x9E3779B97F4A7C15ULL)));
}

}  // namespace rdk
