#pragma once

#include <cstdint>
#include <istream>
#include <vector>

// Empirical token-frequency accounting. Ranking is by count descending with
// ties broken toward the lower token index, and every consumer of the
// ranking (pruning, coverage curves, quantile queries) uses that same order,
// so results are deterministic for a given count table.

namespace rdk {

class TokenFrequencyTable {
 public:
  TokenFrequencyTable() = default;

  static TokenFrequencyTable from_counts(std::vector<std::uint64_t> counts);

  // Whitespace-separated non-negative token ids. Rejects an empty stream and
  // anything that fails to parse as an unsigned integer.
  static TokenFrequencyTable from_stream(std::istream& in);

  void add(std::uint32_t token, std::uint64_t n = 1);

  std::size_t vocab_size() const { return counts_.size(); }
  std::uint64_t count(std::uint32_t token) const;
  std::uint64_t total() const { return total_; }

  // Token ids sorted by (count desc, index asc).
  std::vector<std::uint32_t> ranked() const;

  // Cumulative mass fraction after each rank, in ranked order.
  std::vector<double> coverage_curve() const;

  // Smallest k such that the top-k ranked tokens cover at least the given
  // fraction of the total count. quantile must lie in (0, 1].
  std::size_t min_tokens_for_quantile(double quantile) const;

 private:
  std::vector<std::uint64_t> counts_;
  std::uint64_t total_ = 0;
};

// Synthetic Zipf count table over m tokens: counts[i] = floor(scale/(i+1)^s).
// Token 0 is the most frequent.
TokenFrequencyTable zipf_counts(std::size_t m, double s, double scale);

}  // namespace rdk
