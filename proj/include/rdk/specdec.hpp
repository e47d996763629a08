#pragma once
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <vector>
#include "rdk/prng.hpp"
#include "rdk/prob.hpp"
// Vanilla speculative decoding over table-driven toy models. The drafter
// proposes `lookahead` tokens; the verifier accepts proposal d with
// probability min(1, p(d)/q(d)). The first rejection is repaired by a draw
// from the residual distribution, and a fully accepted run earns one bonus
// token straight from the target. Under this scheme the marginal of the
// token emitted at any context equals the target entry exactly; the session
// statistics exist to check that claim empirically.
namespace rdk {

using ContextKey = std::vector<std::uint32_t>;

class ToyConditionalModel {
 public:
  // vocab must lie in [1, 64].
  ToyConditionalModel(std::size_t context_len, std::size_t vocab);
  // Document shape:
  //   { "context_len": c, "vocab": m,
  //     "entries": [ { "context": [...], "probs": [...] }, ... ] }
  // Unknown keys, duplicate contexts, and non-simplex prob rows are rejected.
  static ToyConditionalModel from_json(std::istream& in);
  // context must be no longer than context_len; dist must be a full
  // distribution over the model vocabulary. Re-setting a context overwrites.
  void set_entry(ContextKey context, ProbVector dist);
  // Conditions on the last min(context_len, context.size()) tokens.
  // Missing entries are a model-data error.
  const ProbVector& at_context(const ContextKey& context) const;
  // The truncated key at_context resolves, exposed so statistics can be
  // aggregated under the keys the model actually distinguishes.
  ContextKey lookup_key(const ContextKey& context) const;
  std::size_t context_len() const { return context_len_; }
  std::size_t vocab() const { return vocab_; }
  const std::map<ContextKey, ProbVector>& table() const { return table_; }

 private:
  std::size_t context_len_ = 0;
  std::size_t vocab_ = 0;
  std::map<ContextKey, ProbVector> table_;
};

// One verification round: the accepted prefix of the drafts plus exactly one
// token the target itself stands behind (a residual draw after a rejection,
// a bonus draw otherwise). Emits between 1 and lookahead + 1 tokens.
struct StepOutcome {
  std::vector<std::uint32_t> accepted;
  std::uint32_t corrective = 0;
  std::optional<std::size_t> rejected_at;  // draft position; absent when all accepted
};

struct SessionStats {
  std::size_t steps = 0;
  std::size_t lookahead = 0;
  // Indexed by draft position: proposals evaluated there, and how many of
  // those were accepted. position_trials[0] == steps, and
  // position_trials[j + 1] == position_accepts[j].
  std::vector<std::uint64_t> position_trials;
  std::vector<std::uint64_t> position_accepts;
  // Keyed by the target model's lookup key. Histograms are sized to the
  // vocabulary on first touch.
  std::map<ContextKey, std::vector<std::uint64_t>> emitted_histogram;
  std::map<ContextKey, std::uint64_t> context_trials;
  std::map<ContextKey, std::uint64_t> context_accepts;
  std::uint64_t total_trials() const;
  std::uint64_t total_accepts() const;
};

// r = (p - min(p, q)) / (1 - sum_t min(p(t), q(t))), the distribution a
// rejection falls back to. Both arguments must be full distributions of the
// same size with rejected mass above 1e-12.
ProbVector residual_distribution(const ProbVector& p, const ProbVector& q);

StepOutcome speculative_decode_step(const ToyConditionalModel& target,
                                    const ToyConditionalModel& drafter,
                                    const ContextKey& context, std::size_t lookahead,
                                    RandomSource& rng);

// Repeats speculative_decode_step `steps` times, extending the context with
// each step's emitted tokens, and aggregates acceptance and emitted-token
// counts per target context key.
SessionStats run_session(const ToyConditionalModel& target,
                         const ToyConditionalModel& drafter, const ContextKey& prompt,
                         std::size_t lookahead, std::size_t steps, RandomSource& rng);

}  // namespace rdk
