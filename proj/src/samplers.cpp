#include "rdk/samplers.hpp"

#include <algorithm>
#include <stdexcept>

#include "rdk/numeric.hpp"

namespace rdk {

std::string to_string(SchemeId s) {
  switch (s) {
    case SchemeId::MaskedOnly: return "masked_only";
    case SchemeId::TLI: return "tli";
    case SchemeId::RdkExact: return "rdk_exact";
    case SchemeId::RdkTaylor: return "rdk_taylor";
  }
  throw std::invalid_argument("to_string: unknown scheme");
}

SchemeId scheme_from_string(const std::string& name) {
  if (name == "masked_only") return SchemeId::MaskedOnly;
  if (name == "tli") return SchemeId::TLI;
  if (name == "rdk_exact") return SchemeId::RdkExact;
  if (name == "rdk_taylor") return SchemeId::RdkTaylor;
  throw std::invalid_argument("unknown scheme: " + name);
}

PrunedDrafter fr_prune(const TokenFrequencyTable& freq, std::size_t keep) {
  if (keep == 0) throw std::invalid_argument("fr_prune: keep must be >= 1");
  if (keep > freq.vocab_size()) {
    throw std::invalid_argument("fr_prune: keep exceeds vocabulary size");
  }
  std::vector<std::uint32_t> order = freq.ranked();
  order.resize(keep);
  PrunedDrafter out;
  out.original_size = freq.vocab_size();
  out.retained = SupportSet::from_unsorted(std::move(order));
  return out;
}

ProbVector tli_redistribute(const ProbVector& q, const SupportSet& T) {
  if (!T.empty() && T.indices().back() >= q.size()) {
    throw std::invalid_argument("tli_redistribute: support index out of range");
  }
  const SupportSet overlap = q.support().intersect(T);
  if (overlap.empty()) {
    throw std::domain_error("tli_redistribute: drafter and target supports are disjoint");
  }
  std::vector<double> kept(overlap.size());
  for (std::size_t k = 0; k < overlap.size(); ++k) kept[k] = q[overlap[k]];
  const double mass = neumaier_sum(kept);
  if (mass <= 0.0) {
    throw std::domain_error("tli_redistribute: no drafter mass on the target support");
  }
  std::vector<double> out(q.size(), 0.0);
  for (std::uint32_t i : overlap) out[i] = q[i] / mass;
  return ProbVector::full(std::move(out));
}

ProbVector rdk_redistribute(const ProbVector& q, const SupportSet& T,
                            const AffinityMatrix& M) {
  return apply_exact(M, tli_redistribute(q, T));
}

ProbVector rdk_taylor_redistribute(const ProbVector& q, const SupportSet& T,
                                   const ProbVector& p_ref) {
  return taylor_redistribute(p_ref, tli_redistribute(q, T), T);
}

ProbVector masked_only(const ProbVector& q, const SupportSet& T) {
  return restrict_to(q, T);
}

}  // namespace rdk
