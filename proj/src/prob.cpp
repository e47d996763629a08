#include "rdk/prob.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "rdk/numeric.hpp"

namespace rdk {

SupportSet SupportSet::from_sorted(std::vector<std::uint32_t> idx) {
  for (std::size_t k = 1; k < idx.size(); ++k) {
    if (idx[k - 1] >= idx[k]) {
      throw std::invalid_argument("SupportSet: indices not strictly increasing");
    }
  }
  SupportSet s;
  s.idx_ = std::move(idx);
  return s;
}

SupportSet SupportSet::from_unsorted(std::vector<std::uint32_t> idx) {
  std::sort(idx.begin(), idx.end());
  return from_sorted(std::move(idx));
}

SupportSet SupportSet::full(std::size_t m) {
  SupportSet s;
  s.idx_.resize(m);
  for (std::size_t i = 0; i < m; ++i) s.idx_[i] = static_cast<std::uint32_t>(i);
  return s;
}

bool SupportSet::contains(std::uint32_t i) const {
  return std::binary_search(idx_.begin(), idx_.end(), i);
}

SupportSet SupportSet::intersect(const SupportSet& other) const {
  SupportSet out;
  std::set_intersection(idx_.begin(), idx_.end(), other.idx_.begin(), other.idx_.end(),
                        std::back_inserter(out.idx_));
  return out;
}

SupportSet SupportSet::minus(const SupportSet& other) const {
  SupportSet out;
  std::set_difference(idx_.begin(), idx_.end(), other.idx_.begin(), other.idx_.end(),
                      std::back_inserter(out.idx_));
  return out;
}

bool SupportSet::is_subset_of(const SupportSet& other) const {
  return std::includes(other.idx_.begin(), other.idx_.end(), idx_.begin(), idx_.end());
}

ProbVector::ProbVector(std::vector<double> values, double mass, bool sub)
    : values_(std::move(values)), mass_(mass), sub_(sub) {
  std::vector<std::uint32_t> idx;
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (values_[i] > 0.0) idx.push_back(static_cast<std::uint32_t>(i));
  }
  support_ = SupportSet::from_sorted(std::move(idx));
}

static double checked_mass(const std::vector<double>& values) {
  if (values.empty()) {
    throw std::invalid_argument("ProbVector: empty value vector");
  }
  for (double v : values) {
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument("ProbVector: entries must be finite and non-negative");
    }
  }
  return neumaier_sum(values);
}

ProbVector ProbVector::full(std::vector<double> values) {
  const double mass = checked_mass(values);
  if (std::abs(mass - 1.0) > kSimplexTol) {
    throw std::invalid_argument("ProbVector: mass not within tolerance of 1");
  }
  return ProbVector(std::move(values), mass, false);
}

ProbVector ProbVector::sub_probability(std::vector<double> values) {
  const double mass = checked_mass(values);
  if (mass > 1.0 + kSimplexTol) {
    throw std::invalid_argument("ProbVector: mass exceeds 1");
  }
  const bool sub = std::abs(mass - 1.0) > kSimplexTol;
  return ProbVector(std::move(values), mass, sub);
}

ProbVector softmax(const LogitVector& z) {
  if (z.empty()) throw std::invalid_argument("softmax: empty logit vector");
  double zmax = z[0];
  for (double v : z) {
    if (!std::isfinite(v)) throw std::invalid_argument("softmax: non-finite logit");
    zmax = std::max(zmax, v);
  }
  std::vector<double> e(z.size());
  for (std::size_t i = 0; i < z.size(); ++i) e[i] = std::exp(z[i] - zmax);
  const double total = neumaier_sum(e);
  for (double& v : e) v /= total;
  return ProbVector::full(std::move(e));
}

ProbVector restrict_to(const ProbVector& p, const SupportSet& s) {
  if (!s.empty() && s.indices().back() >= p.size()) {
    throw std::invalid_argument("restrict_to: support index out of range");
  }
  std::vector<double> out(p.size(), 0.0);
  for (std::uint32_t i : s) out[i] = p[i];
  return ProbVector::sub_probability(std::move(out));
}

ProbVector renormalize(const ProbVector& p) {
  const double mass = p.mass();
  if (mass <= 0.0) {
    throw std::domain_error("renormalize: vector has zero mass");
  }
  std::vector<double> out = p.values();
  for (double& v : out) v /= mass;
  return ProbVector::full(std::move(out));
}

std::uint32_t draw_token(const ProbVector& p, RandomSource& rng) {
  if (p.is_sub_probability()) {
    throw std::invalid_argument("draw_token: cannot sample a sub-probability vector");
  }
  if (p.support().empty()) {
    throw std::domain_error("draw_token: empty support");
  }
  const double u = rng.next_double();
  double cum = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    cum += p[i];
    if (u < cum) return static_cast<std::uint32_t>(i);
  }
  // Rounding can leave cum just under 1; fall back to the last live index.
  return p.support().indices().back();
}

}  // namespace rdk
