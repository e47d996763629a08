#pragma once

#include <span>
#include <vector>

#include "rdk/prob.hpp"

// Acceptance-rate scoring for a drafter/target pair, plus the L1 machinery
// tied to it. The acceptance rate is the total overlap sum_i min(p_i, q_i);
// a rejection-sampled draft from q is accepted with exactly this
// probability. For full distributions it equals 1 - |k|_1 for the drafter
// kernel k = max(0, q - p), and 1 - 0.5 * |p - q|_1. The drafter may be a
// sub-probability vector, in which case the literal overlap is returned and
// the missing mass simply counts against acceptance.

namespace rdk {

using KernelVector = std::vector<double>;

double acceptance_rate(const ProbVector& target, const ProbVector& drafter);

// Elementwise max(0, q - p). Both inputs must be full distributions of equal
// size.
KernelVector drafter_kernel(const ProbVector& target, const ProbVector& drafter);

double l1_norm(std::span<const double> xs);

double l1_distance(const ProbVector& a, const ProbVector& b);
double l1_distance(std::span<const double> a, std::span<const double> b);

}  // namespace rdk
