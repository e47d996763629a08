#include "rdk/specdec.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>

#include "json.hpp"

#include "rdk/numeric.hpp"

namespace rdk {

namespace {

std::string render_key(const ContextKey& key) {
  std::string out = "[";
  for (std::size_t i = 0; i < key.size(); ++i) {
    if (i > 0) out += ",";
    out += std::to_string(key[i]);
  }
  out += "]";
  return out;
}

}  // namespace

ToyConditionalModel::ToyConditionalModel(std::size_t context_len, std::size_t vocab)
    : context_len_(context_len), vocab_(vocab) {
  if (vocab_ == 0 || vocab_ > 64) {
    throw std::invalid_argument("ToyConditionalModel: vocab must lie in [1, 64]");
  }
}

void ToyConditionalModel::set_entry(ContextKey context, ProbVector dist) {
  if (context.size() > context_len_) {
    throw std::invalid_argument("ToyConditionalModel: context longer than context_len");
  }
  for (std::uint32_t t : context) {
    if (t >= vocab_) {
      throw std::invalid_argument("ToyConditionalModel: context token outside vocabulary");
    }
  }
  if (dist.size() != vocab_) {
    throw std::invalid_argument("ToyConditionalModel: entry size does not match vocab");
  }
  if (dist.is_sub_probability()) {
    throw std::invalid_argument("ToyConditionalModel: entries must be full distributions");
  }
  table_.insert_or_assign(std::move(context), std::move(dist));
}

ContextKey ToyConditionalModel::lookup_key(const ContextKey& context) const {
  const std::size_t n = std::min(context_len_, context.size());
  return ContextKey(context.end() - static_cast<std::ptrdiff_t>(n), context.end());
}

const ProbVector& ToyConditionalModel::at_context(const ContextKey& context) const {
  const auto it = table_.find(lookup_key(context));
  if (it == table_.end()) {
    throw std::domain_error("ToyConditionalModel: no entry for context " +
                            render_key(lookup_key(context)));
  }
  return it->second;
}

ToyConditionalModel ToyConditionalModel::from_json(std::istream& in) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string("toy model: malformed JSON: ") + e.what());
  }
  if (!doc.is_object()) {
    throw std::invalid_argument("toy model: top-level JSON object required");
  }
  for (const auto& item : doc.items()) {
    const std::string& key = item.key();
    if (key != "context_len" && key != "vocab" && key != "entries") {
      throw std::invalid_argument("toy model: unknown key \"" + key + "\"");
    }
  }
  if (!doc.contains("context_len") || !doc.contains("vocab") || !doc.contains("entries")) {
    throw std::invalid_argument("toy model: context_len, vocab, and entries are required");
  }
  if (!doc.at("context_len").is_number_unsigned() || !doc.at("vocab").is_number_unsigned()) {
    throw std::invalid_argument("toy model: context_len and vocab must be non-negative integers");
  }
  if (!doc.at("entries").is_array() || doc.at("entries").empty()) {
    throw std::invalid_argument("toy model: entries must be a non-empty array");
  }
  ToyConditionalModel model(doc.at("context_len").get<std::size_t>(),
                            doc.at("vocab").get<std::size_t>());
  for (const auto& entry : doc.at("entries")) {
    if (!entry.is_object()) {
      throw std::invalid_argument("toy model: each entry must be an object");
    }
    for (const auto& item : entry.items()) {
      const std::string& key = item.key();
      if (key != "context" && key != "probs") {
        throw std::invalid_argument("toy model: unknown entry key \"" + key + "\"");
      }
    }
    if (!entry.contains("context") || !entry.contains("probs")) {
      throw std::invalid_argument("toy model: entries need both context and probs");
    }
    ContextKey ctx;
    std::vector<double> probs;
    try {
      ctx = entry.at("context").get<ContextKey>();
      probs = entry.at("probs").get<std::vector<double>>();
    } catch (const nlohmann::json::exception& e) {
      throw std::invalid_argument(std::string("toy model: bad entry field: ") + e.what());
    }
    if (model.table_.contains(ctx)) {
      throw std::invalid_argument("toy model: duplicate context " + render_key(ctx));
    }
    model.set_entry(std::move(ctx), ProbVector::full(std::move(probs)));
  }
  return model;
}

std::uint64_t SessionStats::total_trials() const {
  return std::accumulate(position_trials.begin(), position_trials.end(), std::uint64_t{0});
}

std::uint64_t SessionStats::total_accepts() const {
  return std::accumulate(position_accepts.begin(), position_accepts.end(), std::uint64_t{0});
}

ProbVector residual_distribution(const ProbVector& p, const ProbVector& q) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("residual_distribution: size mismatch");
  }
  if (p.is_sub_probability() || q.is_sub_probability()) {
    throw std::invalid_argument("residual_distribution: full distributions required");
  }
  std::vector<double> excess(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) excess[i] = std::max(0.0, p[i] - q[i]);
  // Equals 1 - sum min(p, q); computing it from the excess keeps the
  // normalization self-consistent.
  const double rejected_mass = neumaier_sum(excess);
  if (rejected_mass <= 1e-12) {
    throw std::domain_error("residual_distribution: p and q coincide, residual undefined");
  }
  for (double& v : excess) v /= rejected_mass;
  return ProbVector::full(std::move(excess));
}

StepOutcome speculative_decode_step(const ToyConditionalModel& target,
                                    const ToyConditionalModel& drafter,
                                    const ContextKey& context, std::size_t lookahead,
                                    RandomSource& rng) {
  if (lookahead == 0) {
    throw std::invalid_argument("speculative_decode_step: lookahead must be >= 1");
  }
  if (target.vocab() != drafter.vocab()) {
    throw std::invalid_argument("speculative_decode_step: vocabulary size mismatch");
  }
  StepOutcome out;
  ContextKey ctx = context;
  for (std::size_t j = 0; j < lookahead; ++j) {
    const ProbVector& q = drafter.at_context(ctx);
    const ProbVector& p = target.at_context(ctx);
    const std::uint32_t d = draw_token(q, rng);
    const double pd = p[d];
    const double qd = q[d];
    // qd > 0 because d was just drawn from q. The uniform variate is
    // consumed only on the uncertain branch, so acceptance-heavy runs spend
    // fewer draws and stay reproducible.
    bool accept = pd >= qd;
    if (!accept) accept = rng.next_double() < pd / qd;
    if (accept) {
      out.accepted.push_back(d);
      ctx.push_back(d);
      continue;
    }
    out.rejected_at = j;
    out.corrective = draw_token(residual_distribution(p, q), rng);
    return out;
  }
  out.corrective = draw_token(target.at_context(ctx), rng);
  return out;
}

SessionStats run_session(const ToyConditionalModel& target,
                         const ToyConditionalModel& drafter, const ContextKey& prompt,
                         std::size_t lookahead, std::size_t steps, RandomSource& rng) {
  if (steps == 0) {
    throw std::invalid_argument("run_session: steps must be >= 1");
  }
  SessionStats stats;
  stats.steps = steps;
  stats.lookahead = lookahead;
  stats.position_trials.assign(lookahead, 0);
  stats.position_accepts.assign(lookahead, 0);
  // Lookups only ever see the trailing window, so the running context can be
  // truncated without changing any draw.
  const std::size_t window = std::max(target.context_len(), drafter.context_len());
  ContextKey ctx = prompt;
  for (std::size_t s = 0; s < steps; ++s) {
    const StepOutcome out = speculative_decode_step(target, drafter, ctx, lookahead, rng);
    auto record_emit = [&](const ContextKey& at, std::uint32_t token) {
      std::vector<std::uint64_t>& hist = stats.emitted_histogram[target.lookup_key(at)];
      if (hist.empty()) hist.assign(target.vocab(), 0);
      ++hist[token];
    };
    for (std::size_t j = 0; j < out.accepted.size(); ++j) {
      const ContextKey key = target.lookup_key(ctx);
      ++stats.position_trials[j];
      ++stats.position_accepts[j];
      ++stats.context_trials[key];
      ++stats.context_accepts[key];
      record_emit(ctx, out.accepted[j]);
      ctx.push_back(out.accepted[j]);
    }
    if (out.rejected_at.has_value()) {
      const ContextKey key = target.lookup_key(ctx);
      ++stats.position_trials[*out.rejected_at];
      ++stats.context_trials[key];
      record_emit(ctx, out.corrective);
    } else {
      // Bonus token: emitted without a draft proposal, so no trial counted.
      record_emit(ctx, out.corrective);
    }
    ctx.push_back(out.corrective);
    if (ctx.size() > window) {
      ctx.erase(ctx.begin(), ctx.end() - static_cast<std::ptrdiff_t>(window));
    }
  }
  return stats;
}

}  // namespace rdk
