#pragma once

#include <cstdint>
#include <string>

#include "rdk/affinity.hpp"
#include "rdk/freq.hpp"
#include "rdk/prob.hpp"

// Drafter-side vocabulary pruning and the redistribution schemes that repair
// a pruned drafter against a target support T. The schemes share a common
// shape: given a drafter q (possibly a sub-probability left by masking) and
// the target support T, produce the distribution the verifier actually
// scores.
//
//   masked_only  keeps q restricted to T with no renormalization; missing
//                mass is genuinely lost.
//   tli          renormalizes q over the intersection supp(q) & T.
//   rdk          follows tli with an exact affinity-matrix transpose.
//   rdk_taylor   follows tli with the linear-time surrogate.

namespace rdk {

enum class SchemeId {
  MaskedOnly,
  TLI,
  RdkExact,
  RdkTaylor,
};

std::string to_string(SchemeId s);
SchemeId scheme_from_string(const std::string& name);

struct PrunedDrafter {
  SupportSet retained;
  std::size_t original_size = 0;
};

// Keep the `keep` highest-count tokens, ties toward the lower index.
// Requires 1 <= keep <= vocab size.
PrunedDrafter fr_prune(const TokenFrequencyTable& freq, std::size_t keep);

// Renormalize q over supp(q) & T. The intersection must carry positive mass.
ProbVector tli_redistribute(const ProbVector& q, const SupportSet& T);

// tli followed by the exact transpose application of M.
ProbVector rdk_redistribute(const ProbVector& q, const SupportSet& T,
                            const AffinityMatrix& M);

// tli followed by the linear-time surrogate anchored at p_ref.
ProbVector rdk_taylor_redistribute(const ProbVector& q, const SupportSet& T,
                                   const ProbVector& p_ref);

// Restriction with no renormalization; the missing-mass baseline.
ProbVector masked_only(const ProbVector& q, const SupportSet& T);

}  // namespace rdk
