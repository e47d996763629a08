#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "rdk/prng.hpp"

// Probability-simplex building blocks. ProbVector is the one invariant-
// carrying type everything else leans on: entries are finite and
// non-negative, the mass is the compensated sum of the entries, and the
// support lists exactly the indices with positive value. A ProbVector is
// either a full distribution (mass within 1e-9 of one) or an explicitly
// flagged sub-probability left behind by masking.

namespace rdk {

using LogitVector = std::vector<double>;

inline constexpr double kSimplexTol = 1e-9;

class SupportSet {
 public:
  SupportSet() = default;

  // Indices must be strictly increasing.
  static SupportSet from_sorted(std::vector<std::uint32_t> idx);
  // Sorts and rejects duplicates.
  static SupportSet from_unsorted(std::vector<std::uint32_t> idx);
  static SupportSet full(std::size_t m);

  bool contains(std::uint32_t i) const;
  std::size_t size() const { return idx_.size(); }
  bool empty() const { return idx_.empty(); }
  std::uint32_t operator[](std::size_t k) const { return idx_[k]; }
  const std::vector<std::uint32_t>& indices() const { return idx_; }

  auto begin() const { return idx_.begin(); }
  auto end() const { return idx_.end(); }

  SupportSet intersect(const SupportSet& other) const;
  SupportSet minus(const SupportSet& other) const;
  bool is_subset_of(const SupportSet& other) const;

  bool operator==(const SupportSet& other) const = default;

 private:
  std::vector<std::uint32_t> idx_;  // strictly increasing
};

class ProbVector {
 public:
  ProbVector() = default;

  // Full distribution: mass within kSimplexTol of 1.
  static ProbVector full(std::vector<double> values);
  // Masked distribution: mass anywhere in [0, 1 + tol]. Promoted to a full
  // distribution when no mass is actually missing.
  static ProbVector sub_probability(std::vector<double> values);

  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  const std::vector<double>& values() const { return values_; }
  std::span<const double> span() const { return values_; }

  const SupportSet& support() const { return support_; }
  double mass() const { return mass_; }
  bool is_sub_probability() const { return sub_; }

  bool operator==(const ProbVector& other) const {
    return values_ == other.values_ && sub_ == other.sub_;
  }

 private:
  ProbVector(std::vector<double> values, double mass, bool sub);

  std::vector<double> values_;
  SupportSet support_;
  double mass_ = 0.0;
  bool sub_ = false;
};

// Max-shifted softmax. Rejects empty or non-finite input; output is strictly
// positive and sums to one within a few ulps.
ProbVector softmax(const LogitVector& z);

// Zero out everything outside s, keeping kept values bit-identical. The
// result is a sub-probability unless s covers the support of p.
ProbVector restrict_to(const ProbVector& p, const SupportSet& s);

// Scale a nonzero-mass vector back onto the simplex.
ProbVector renormalize(const ProbVector& p);

// Inverse-CDF draw over the stored index order. Requires a full
// distribution.
std::uint32_t draw_token(const ProbVector& p, RandomSource& rng);

}  // namespace rdk
