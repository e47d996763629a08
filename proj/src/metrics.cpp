#include "rdk/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rdk/numeric.hpp"

namespace rdk {

double acceptance_rate(const ProbVector& target, const ProbVector& drafter) {
  if (target.size() != drafter.size()) {
    throw std::invalid_argument("acceptance_rate: size mismatch");
  }
  if (target.is_sub_probability()) {
    throw std::invalid_argument("acceptance_rate: target must be a full distribution");
  }
  std::vector<double> overlap(target.size());
  for (std::size_t i = 0; i < target.size(); ++i) {
    overlap[i] = std::min(target[i], drafter[i]);
  }
  return neumaier_sum(overlap);
}

KernelVector drafter_kernel(const ProbVector& target, const ProbVector& drafter) {
  if (target.size() != drafter.size()) {
    throw std::invalid_argument("drafter_kernel: size mismatch");
  }
  if (target.is_sub_probability() || drafter.is_sub_probability()) {
    throw std::invalid_argument("drafter_kernel: both inputs must be full distributions");
  }
  KernelVector k(target.size());
  for (std::size_t i = 0; i < target.size(); ++i) {
    k[i] = std::max(0.0, drafter[i] - target[i]);
  }
  return k;
}

double l1_norm(std::span<const double> xs) {
  std::vector<double> abs(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) abs[i] = std::abs(xs[i]);
  return neumaier_sum(abs);
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) {
    throw std::invalid_argument("l1_distance: size mismatch");
  }
  std::vector<double> diff(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) diff[i] = std::abs(a[i] - b[i]);
  return neumaier_sum(diff);
}

double l1_distance(const ProbVector& a, const ProbVector& b) {
  return l1_distance(a.span(), b.span());
}

}  // namespace rdk
