#include "rdk/harness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <utility>

#include "json.hpp"

#include "rdk/affinity.hpp"
#include "rdk/metrics.hpp"
#include "rdk/numeric.hpp"
#include "rdk/sampling.hpp"
#include "rdk/verify.hpp"

namespace rdk {

namespace {

std::string g17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string render_context(const ContextKey& key) {
  std::string out;
  for (std::size_t i = 0; i < key.size(); ++i) {
    if (i > 0) out += '|';
    out += std::to_string(key[i]);
  }
  return out;
}

nlohmann::json parse_json_stream(std::istream& in, const char* what) {
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(std::string(what) + ": malformed JSON: " + e.what());
  }
}

void reject_unknown_keys(const nlohmann::json& obj,
                         std::initializer_list<const char*> allowed, const char* what) {
  for (const auto& item : obj.items()) {
    bool known = false;
    for (const char* a : allowed) {
      if (item.key() == a) {
        known = true;
        break;
      }
    }
    if (!known) {
      throw std::invalid_argument(std::string(what) + ": unknown key \"" + item.key() +
                                  "\"");
    }
  }
}

double require_number(const nlohmann::json& v, const char* what) {
  if (!v.is_number()) {
    throw std::invalid_argument(std::string(what) + " must be a number");
  }
  return v.get<double>();
}

std::uint64_t require_unsigned(const nlohmann::json& v, const char* what) {
  if (!v.is_number_unsigned()) {
    throw std::invalid_argument(std::string(what) + " must be a non-negative integer");
  }
  return v.get<std::uint64_t>();
}

std::vector<double> number_or_array(const nlohmann::json& v, const char* what) {
  if (v.is_number()) return {v.get<double>()};
  if (v.is_array() && !v.empty()) {
    std::vector<double> out;
    out.reserve(v.size());
    for (const auto& e : v) out.push_back(require_number(e, what));
    return out;
  }
  throw std::invalid_argument(std::string(what) + " must be a number or non-empty array");
}

TargetSpec parse_target(const nlohmann::json& t) {
  if (!t.is_object()) throw std::invalid_argument("config.target must be an object");
  std::string family = "student_t";
  if (t.contains("family")) {
    if (!t.at("family").is_string()) {
      throw std::invalid_argument("config.target.family must be a string");
    }
    family = t.at("family").get<std::string>();
  }
  TargetSpec spec;
  if (family == "student_t") {
    reject_unknown_keys(t, {"family", "df", "loc", "scale"}, "config.target");
    spec.family = TargetSpec::Family::StudentT;
    if (t.contains("df")) spec.df = require_number(t.at("df"), "config.target.df");
    if (t.contains("loc")) spec.loc = require_number(t.at("loc"), "config.target.loc");
    if (t.contains("scale")) {
      spec.scale = require_number(t.at("scale"), "config.target.scale");
    }
  } else if (family == "gaussian") {
    reject_unknown_keys(t, {"family", "mu", "diag_var"}, "config.target");
    spec.family = TargetSpec::Family::Gaussian;
    if (t.contains("mu")) spec.mu = number_or_array(t.at("mu"), "config.target.mu");
    if (t.contains("diag_var")) {
      spec.diag_var = number_or_array(t.at("diag_var"), "config.target.diag_var");
    }
  } else {
    throw std::invalid_argument("config.target.family must be student_t or gaussian");
  }
  return spec;
}

std::vector<std::size_t> default_levels(std::size_t m) {
  const double fractions[] = {1.0, 0.1, 0.01, 0.0025};
  std::vector<std::size_t> out;
  for (double f : fractions) {
    auto k = static_cast<std::size_t>(std::llround(f * static_cast<double>(m)));
    k = std::clamp<std::size_t>(k, 1, m);
    if (std::find(out.begin(), out.end(), k) == out.end()) out.push_back(k);
  }
  return out;
}

void validate_config(const ExperimentConfig& cfg) {
  if (cfg.vocab_size < 2) {
    throw std::invalid_argument("config: vocab_size must be at least 2");
  }
  if (cfg.trials < 1) throw std::invalid_argument("config: trials must be at least 1");
  if (!(cfg.tau > 0.0) || !std::isfinite(cfg.tau)) {
    throw std::invalid_argument("config: tau must be positive and finite");
  }
  if (!(cfg.theta_scale >= 0.0) || !std::isfinite(cfg.theta_scale)) {
    throw std::invalid_argument("config: theta_scale must be non-negative and finite");
  }
  if (cfg.prune_keep.empty()) {
    throw std::invalid_argument("config: prune_keep must be non-empty");
  }
  for (std::size_t k : cfg.prune_keep) {
    if (k < 1 || k > cfg.vocab_size) {
      throw std::invalid_argument("config: prune_keep levels must lie in [1, vocab_size]");
    }
  }
  std::vector<std::size_t> sorted_levels = cfg.prune_keep;
  std::sort(sorted_levels.begin(), sorted_levels.end());
  if (std::adjacent_find(sorted_levels.begin(), sorted_levels.end()) !=
      sorted_levels.end()) {
    throw std::invalid_argument("config: prune_keep levels must be distinct");
  }
  if (cfg.schemes.empty()) throw std::invalid_argument("config: schemes must be non-empty");
  std::vector<int> scheme_ids;
  for (SchemeId s : cfg.schemes) scheme_ids.push_back(static_cast<int>(s));
  std::sort(scheme_ids.begin(), scheme_ids.end());
  if (std::adjacent_find(scheme_ids.begin(), scheme_ids.end()) != scheme_ids.end()) {
    throw std::invalid_argument("config: schemes must be distinct");
  }
  const TargetSpec& t = cfg.target;
  if (t.family == TargetSpec::Family::StudentT) {
    if (!(t.df > 0.0) || !std::isfinite(t.df)) {
      throw std::invalid_argument("config: target df must be positive");
    }
    if (!std::isfinite(t.loc) || !std::isfinite(t.scale) || t.scale < 0.0) {
      throw std::invalid_argument("config: target loc/scale must be finite, scale >= 0");
    }
  } else {
    if (t.mu.size() != 1 && t.mu.size() != cfg.vocab_size) {
      throw std::invalid_argument("config: target mu must have size 1 or vocab_size");
    }
    if (t.diag_var.size() != 1 && t.diag_var.size() != cfg.vocab_size) {
      throw std::invalid_argument("config: target diag_var must have size 1 or vocab_size");
    }
    for (double v : t.mu) {
      if (!std::isfinite(v)) throw std::invalid_argument("config: target mu must be finite");
    }
    for (double v : t.diag_var) {
      if (!std::isfinite(v) || v < 0.0) {
        throw std::invalid_argument("config: target diag_var must be finite and >= 0");
      }
    }
  }
}

std::vector<double> broadcast(const std::vector<double>& v, std::size_t m) {
  if (v.size() == m) return v;
  return std::vector<double>(m, v.front());
}

ProbVector sample_target(const TargetSpec& t, std::size_t m, RandomSource& rng) {
  if (t.family == TargetSpec::Family::StudentT) {
    return softmax(sample_student_t_logits(m, t.df, t.loc, t.scale, rng));
  }
  return softmax(sample_gaussian_logits(broadcast(t.mu, m), broadcast(t.diag_var, m), rng));
}

// Token indices by descending target mass, ties toward the lower index.
std::vector<std::uint32_t> descending_order(const ProbVector& p) {
  std::vector<std::uint32_t> idx(p.size());
  std::iota(idx.begin(), idx.end(), 0u);
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::uint32_t a, std::uint32_t b) { return p[a] > p[b]; });
  return idx;
}

TokenFrequencyTable sweep_zipf_table(std::size_t m) {
  // s = 1 with scale 10m keeps every count positive so the synthetic corpus
  // covers the whole vocabulary.
  return zipf_counts(m, 1.0, 10.0 * static_cast<double>(m));
}

ProbVector normalized_counts(const TokenFrequencyTable& freq) {
  const double total = static_cast<double>(freq.total());
  std::vector<double> w(freq.vocab_size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    w[i] = static_cast<double>(freq.count(static_cast<std::uint32_t>(i))) / total;
  }
  return ProbVector::full(std::move(w));
}

ToyConditionalModel model_from_json_value(const nlohmann::json& v, const char* what) {
  if (!v.is_object()) {
    throw std::invalid_argument(std::string(what) + " must be a toy model object");
  }
  std::istringstream in(v.dump());
  return ToyConditionalModel::from_json(in);
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in.is_open()) throw std::runtime_error("cannot open " + path);
  return in;
}

}  // namespace

ExperimentConfig ExperimentConfig::defaults() {
  ExperimentConfig cfg;
  cfg.prune_keep = default_levels(cfg.vocab_size);
  cfg.schemes = {SchemeId::MaskedOnly, SchemeId::TLI, SchemeId::RdkTaylor};
  return cfg;
}

ExperimentConfig ExperimentConfig::from_json(std::istream& in) {
  const nlohmann::json doc = parse_json_stream(in, "config");
  if (!doc.is_object()) throw std::invalid_argument("config: top-level object required");
  reject_unknown_keys(doc,
                      {"vocab_size", "seed", "target", "prune_keep", "schemes", "trials",
                       "tau", "theta_scale", "p_ref", "prune_by"},
                      "config");
  ExperimentConfig cfg;
  if (doc.contains("vocab_size")) {
    cfg.vocab_size =
        static_cast<std::size_t>(require_unsigned(doc.at("vocab_size"), "config.vocab_size"));
  }
  if (doc.contains("seed")) cfg.seed = require_unsigned(doc.at("seed"), "config.seed");
  if (doc.contains("target")) cfg.target = parse_target(doc.at("target"));
  if (doc.contains("trials")) {
    cfg.trials = static_cast<std::size_t>(require_unsigned(doc.at("trials"), "config.trials"));
  }
  if (doc.contains("tau")) cfg.tau = require_number(doc.at("tau"), "config.tau");
  if (doc.contains("theta_scale")) {
    cfg.theta_scale = require_number(doc.at("theta_scale"), "config.theta_scale");
  }
  if (doc.contains("p_ref")) {
    const nlohmann::json& v = doc.at("p_ref");
    if (v == "true_target") {
      cfg.p_ref = PRef::TrueTarget;
    } else if (v == "frequency_prior") {
      cfg.p_ref = PRef::FrequencyPrior;
    } else {
      throw std::invalid_argument("config: p_ref must be true_target or frequency_prior");
    }
  }
  if (doc.contains("prune_by")) {
    const nlohmann::json& v = doc.at("prune_by");
    if (v == "top_prob") {
      cfg.prune_by = PruneBy::TopProb;
    } else if (v == "freq") {
      cfg.prune_by = PruneBy::Freq;
    } else {
      throw std::invalid_argument("config: prune_by must be top_prob or freq");
    }
  }
  if (doc.contains("prune_keep")) {
    const nlohmann::json& arr = doc.at("prune_keep");
    if (!arr.is_array() || arr.empty()) {
      throw std::invalid_argument("config: prune_keep must be a non-empty array");
    }
    cfg.prune_keep.clear();
    for (const auto& e : arr) {
      cfg.prune_keep.push_back(
          static_cast<std::size_t>(require_unsigned(e, "config.prune_keep entry")));
    }
  } else {
    cfg.prune_keep = default_levels(cfg.vocab_size);
  }
  if (doc.contains("schemes")) {
    const nlohmann::json& arr = doc.at("schemes");
    if (!arr.is_array() || arr.empty()) {
      throw std::invalid_argument("config: schemes must be a non-empty array");
    }
    cfg.schemes.clear();
    for (const auto& e : arr) {
      if (!e.is_string()) throw std::invalid_argument("config: scheme names must be strings");
      cfg.schemes.push_back(scheme_from_string(e.get<std::string>()));
    }
  } else {
    cfg.schemes = {SchemeId::MaskedOnly, SchemeId::TLI, SchemeId::RdkTaylor};
  }
  validate_config(cfg);
  return cfg;
}

void apply_overrides(ExperimentConfig& cfg, const ConfigOverrides& ov) {
  if (ov.seed) cfg.seed = *ov.seed;
  if (ov.trials) {
    if (*ov.trials < 1) throw std::invalid_argument("--trials must be >= 1");
    cfg.trials = *ov.trials;
  }
  if (ov.prune_by) {
    if (*ov.prune_by == "top_prob") {
      cfg.prune_by = ExperimentConfig::PruneBy::TopProb;
    } else if (*ov.prune_by == "freq") {
      cfg.prune_by = ExperimentConfig::PruneBy::Freq;
    } else {
      throw std::invalid_argument("--prune-by must be top_prob or freq");
    }
  }
  if (ov.p_ref) {
    if (*ov.p_ref == "true_target") {
      cfg.p_ref = ExperimentConfig::PRef::TrueTarget;
    } else if (*ov.p_ref == "frequency_prior") {
      cfg.p_ref = ExperimentConfig::PRef::FrequencyPrior;
    } else {
      throw std::invalid_argument("--p-ref must be true_target or frequency_prior");
    }
  }
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg) {
  validate_config(cfg);
  const std::size_t m = cfg.vocab_size;
  const SupportSet full_domain = SupportSet::full(m);
  const RandomSource master(cfg.seed);

  const bool need_freq_table = cfg.prune_by == ExperimentConfig::PruneBy::Freq ||
                               cfg.p_ref == ExperimentConfig::PRef::FrequencyPrior;
  TokenFrequencyTable zipf;
  if (need_freq_table) zipf = sweep_zipf_table(m);

  std::optional<ProbVector> freq_prior;
  if (cfg.p_ref == ExperimentConfig::PRef::FrequencyPrior) {
    freq_prior = normalized_counts(zipf);
  }

  // Frequency pruning does not depend on the sampled target, so the kept
  // supports are shared across trials.
  std::vector<SupportSet> freq_keep(cfg.prune_keep.size());
  if (cfg.prune_by == ExperimentConfig::PruneBy::Freq) {
    const std::vector<std::uint32_t> ranked = zipf.ranked();
    for (std::size_t li = 0; li < cfg.prune_keep.size(); ++li) {
      std::vector<std::uint32_t> kept(ranked.begin(),
                                      ranked.begin() + static_cast<std::ptrdiff_t>(
                                                           cfg.prune_keep[li]));
      freq_keep[li] = SupportSet::from_unsorted(std::move(kept));
    }
  }

  bool want_rdk = false;
  for (SchemeId s : cfg.schemes) {
    if (s == SchemeId::RdkExact || s == SchemeId::RdkTaylor) want_rdk = true;
  }

  std::vector<std::vector<std::vector<double>>> vals(
      cfg.prune_keep.size(), std::vector<std::vector<double>>(cfg.schemes.size()));

  for (std::size_t t = 0; t < cfg.trials; ++t) {
    RandomSource rng = master.split(t);
    const ProbVector p = sample_target(cfg.target, m, rng);
    const ProbVector& pref = freq_prior ? *freq_prior : p;
    std::optional<AffinityMatrix> structured;
    if (want_rdk) {
      structured = build_structured_affinity(pref, cfg.theta_scale, full_domain);
    }
    std::vector<std::uint32_t> order;
    if (cfg.prune_by == ExperimentConfig::PruneBy::TopProb) order = descending_order(p);

    for (std::size_t li = 0; li < cfg.prune_keep.size(); ++li) {
      SupportSet top_kept;
      const SupportSet* kept = nullptr;
      if (cfg.prune_by == ExperimentConfig::PruneBy::TopProb) {
        top_kept = SupportSet::from_unsorted(std::vector<std::uint32_t>(
            order.begin(),
            order.begin() + static_cast<std::ptrdiff_t>(cfg.prune_keep[li])));
        kept = &top_kept;
      } else {
        kept = &freq_keep[li];
      }
      const ProbVector masked = restrict_to(p, *kept);
      if (!masked.is_sub_probability()) {
        // Nothing was pruned away, so every scheme scores the intact target.
        const double alpha = acceptance_rate(p, masked);
        for (std::size_t si = 0; si < cfg.schemes.size(); ++si) {
          vals[li][si].push_back(alpha);
        }
        continue;
      }
      std::optional<ProbVector> renorm;
      for (std::size_t si = 0; si < cfg.schemes.size(); ++si) {
        double alpha = 0.0;
        switch (cfg.schemes[si]) {
          case SchemeId::MaskedOnly:
            alpha = acceptance_rate(p, masked);
            break;
          case SchemeId::TLI:
            if (!renorm) renorm = tli_redistribute(masked, full_domain);
            alpha = acceptance_rate(p, *renorm);
            break;
          case SchemeId::RdkExact:
          case SchemeId::RdkTaylor:
            if (!renorm) renorm = tli_redistribute(masked, full_domain);
            alpha = acceptance_rate(p, apply_exact(*structured, *renorm));
            break;
        }
        vals[li][si].push_back(alpha);
      }
    }
  }

  std::vector<std::size_t> level_order(cfg.prune_keep.size());
  std::iota(level_order.begin(), level_order.end(), std::size_t{0});
  std::sort(level_order.begin(), level_order.end(), [&](std::size_t a, std::size_t b) {
    return cfg.prune_keep[a] > cfg.prune_keep[b];
  });
  std::vector<std::size_t> scheme_order(cfg.schemes.size());
  std::iota(scheme_order.begin(), scheme_order.end(), std::size_t{0});
  std::sort(scheme_order.begin(), scheme_order.end(), [&](std::size_t a, std::size_t b) {
    return static_cast<int>(cfg.schemes[a]) < static_cast<int>(cfg.schemes[b]);
  });

  std::vector<SweepRow> rows;
  for (std::size_t li : level_order) {
    for (std::size_t si : scheme_order) {
      const std::vector<double>& xs = vals[li][si];
      const double n = static_cast<double>(xs.size());
      const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
      double var = 0.0;
      for (double x : xs) var += (x - mean) * (x - mean);
      SweepRow row;
      row.prune_keep = cfg.prune_keep[li];
      row.prune_fraction =
          static_cast<double>(cfg.prune_keep[li]) / static_cast<double>(m);
      row.scheme = cfg.schemes[si];
      row.acceptance_mean = mean;
      row.acceptance_std = xs.size() > 1 ? std::sqrt(var / (n - 1.0)) : 0.0;
      row.trials = xs.size();
      row.seed = cfg.seed;
      rows.push_back(row);
    }
  }
  return rows;
}

std::string sweep_csv(const std::vector<SweepRow>& rows) {
  std::string out = "prune_keep,prune_fraction,scheme,acceptance_mean,acceptance_std,trials,seed\n";
  for (const SweepRow& r : rows) {
    out += std::to_string(r.prune_keep);
    out += ',' + g17(r.prune_fraction);
    out += ',' + to_string(r.scheme);
    out += ',' + g17(r.acceptance_mean);
    out += ',' + g17(r.acceptance_std);
    out += ',' + std::to_string(r.trials);
    out += ',' + std::to_string(r.seed);
    out += '\n';
  }
  return out;
}

std::string overlay_csv(const ExperimentConfig& cfg, std::size_t keep) {
  validate_config(cfg);
  const std::size_t m = cfg.vocab_size;
  if (keep < 1 || keep > m) {
    throw std::invalid_argument("overlay: keep must lie in [1, vocab_size]");
  }
  const RandomSource master(cfg.seed);
  RandomSource rng = master.split(0);
  const ProbVector p = sample_target(cfg.target, m, rng);

  TokenFrequencyTable zipf;
  const bool need_freq_table = cfg.prune_by == ExperimentConfig::PruneBy::Freq ||
                               cfg.p_ref == ExperimentConfig::PRef::FrequencyPrior;
  if (need_freq_table) zipf = sweep_zipf_table(m);
  std::optional<ProbVector> freq_prior;
  if (cfg.p_ref == ExperimentConfig::PRef::FrequencyPrior) {
    freq_prior = normalized_counts(zipf);
  }
  const ProbVector& pref = freq_prior ? *freq_prior : p;

  const std::vector<std::uint32_t> order = descending_order(p);
  SupportSet kept;
  if (cfg.prune_by == ExperimentConfig::PruneBy::TopProb) {
    kept = SupportSet::from_unsorted(std::vector<std::uint32_t>(
        order.begin(), order.begin() + static_cast<std::ptrdiff_t>(keep)));
  } else {
    kept = fr_prune(zipf, keep).retained;
  }

  const ProbVector masked = restrict_to(p, kept);
  ProbVector tli_out = masked;
  ProbVector rdk_out = masked;
  if (masked.is_sub_probability()) {
    const SupportSet full_domain = SupportSet::full(m);
    tli_out = tli_redistribute(masked, full_domain);
    rdk_out = apply_exact(build_structured_affinity(pref, cfg.theta_scale, full_domain),
                          tli_out);
  }

  std::string out = "token_index,target,masked,tli,rdk_taylor\n";
  for (std::uint32_t i : order) {
    out += std::to_string(i);
    out += ',' + g17(p[i]);
    out += ',' + g17(masked[i]);
    out += ',' + g17(tli_out[i]);
    out += ',' + g17(rdk_out[i]);
    out += '\n';
  }
  return out;
}

CoverageSummary coverage_summary(const TokenFrequencyTable& freq, double quantile) {
  CoverageSummary s;
  s.quantile = quantile;
  s.tokens_needed = freq.min_tokens_for_quantile(quantile);
  s.token_fraction =
      static_cast<double>(s.tokens_needed) / static_cast<double>(freq.vocab_size());
  return s;
}

std::string coverage_csv(const TokenFrequencyTable& freq) {
  const std::vector<std::uint32_t> ranked = freq.ranked();
  const std::vector<double> curve = freq.coverage_curve();
  std::string out = "rank,token,count,cum_fraction\n";
  for (std::size_t r = 0; r < ranked.size(); ++r) {
    out += std::to_string(r + 1);
    out += ',' + std::to_string(ranked[r]);
    out += ',' + std::to_string(freq.count(ranked[r]));
    out += ',' + g17(curve[r]);
    out += '\n';
  }
  return out;
}

FitResult fit_location_scale(std::vector<double> samples, FitFamily family, double df) {
  if (samples.size() < 30) {
    throw std::invalid_argument("fit: need at least 30 samples");
  }
  for (double v : samples) {
    if (!std::isfinite(v)) throw std::invalid_argument("fit: samples must be finite");
  }
  if (family == FitFamily::StudentT && (!(df > 0.0) || !std::isfinite(df))) {
    throw std::invalid_argument("fit: df must be positive");
  }
  const double n = static_cast<double>(samples.size());
  double mean = std::accumulate(samples.begin(), samples.end(), 0.0) / n;
  double var = 0.0;
  for (double x : samples) var += (x - mean) * (x - mean);
  var /= n;
  if (!(var > 0.0)) {
    throw std::domain_error("fit: degenerate scale, samples are constant");
  }

  FitResult out;
  out.family = family;
  out.df = family == FitFamily::StudentT ? df : 0.0;
  if (family == FitFamily::Normal) {
    out.loc = mean;
    out.scale = std::sqrt(var);
  } else {
    // EM with fixed df: reweight by (df + 1) / (df + r^2), then closed-form
    // location/scale updates.
    double mu = mean;
    double s2 = var;
    std::vector<double> w(samples.size());
    for (int iter = 0; iter < 1000; ++iter) {
      double sum_w = 0.0;
      double sum_wx = 0.0;
      for (std::size_t i = 0; i < samples.size(); ++i) {
        const double r2 = (samples[i] - mu) * (samples[i] - mu) / s2;
        w[i] = (df + 1.0) / (df + r2);
        sum_w += w[i];
        sum_wx += w[i] * samples[i];
      }
      const double mu_next = sum_wx / sum_w;
      double s2_next = 0.0;
      for (std::size_t i = 0; i < samples.size(); ++i) {
        s2_next += w[i] * (samples[i] - mu_next) * (samples[i] - mu_next);
      }
      s2_next /= n;
      const bool done = std::fabs(mu_next - mu) <= 1e-12 * (1.0 + std::fabs(mu)) &&
                        std::fabs(s2_next - s2) <= 1e-12 * s2;
      mu = mu_next;
      s2 = s2_next;
      if (done) break;
    }
    out.loc = mu;
    out.scale = std::sqrt(s2);
  }

  double ll = 0.0;
  if (family == FitFamily::Normal) {
    const double log_norm = -0.5 * std::log(2.0 * 3.14159265358979323846) -
                            std::log(out.scale);
    for (double x : samples) {
      const double r = (x - out.loc) / out.scale;
      ll += log_norm - 0.5 * r * r;
    }
  } else {
    const double log_scale = std::log(out.scale);
    for (double x : samples) {
      ll += student_t_log_pdf((x - out.loc) / out.scale, df) - log_scale;
    }
  }
  out.log_likelihood = ll;

  std::sort(samples.begin(), samples.end());
  out.quantiles.reserve(199);
  for (int k = 1; k <= 199; ++k) {
    const double prob = static_cast<double>(k) / 200.0;
    const double h = prob * (n - 1.0);
    const std::size_t lo = static_cast<std::size_t>(h);
    const std::size_t hi = std::min(lo + 1, samples.size() - 1);
    const double frac = h - static_cast<double>(lo);
    QuantilePair qp;
    qp.prob = prob;
    qp.empirical = samples[lo] + frac * (samples[hi] - samples[lo]);
    const double base = family == FitFamily::Normal ? normal_quantile(prob)
                                                    : student_t_quantile(prob, df);
    qp.theoretical = out.loc + out.scale * base;
    out.quantiles.push_back(qp);
  }
  return out;
}

std::string fit_csv(const FitResult& fit) {
  std::string out = "prob,empirical_q,theoretical_q\n";
  for (const QuantilePair& q : fit.quantiles) {
    out += g17(q.prob);
    out += ',' + g17(q.empirical);
    out += ',' + g17(q.theoretical);
    out += '\n';
  }
  return out;
}

SimulateConfig SimulateConfig::from_json(std::istream& in) {
  const nlohmann::json doc = parse_json_stream(in, "simulate config");
  if (!doc.is_object()) {
    throw std::invalid_argument("simulate config: top-level object required");
  }
  reject_unknown_keys(doc, {"target", "drafter", "prompt", "schemes", "seed", "theta_scale"},
                      "simulate config");
  if (!doc.contains("target") || !doc.contains("drafter")) {
    throw std::invalid_argument("simulate config: target and drafter are required");
  }
  ToyConditionalModel target = model_from_json_value(doc.at("target"), "simulate config: target");
  ToyConditionalModel drafter =
      model_from_json_value(doc.at("drafter"), "simulate config: drafter");
  if (target.vocab() != drafter.vocab()) {
    throw std::invalid_argument("simulate config: target and drafter vocabularies differ");
  }
  if (target.context_len() != drafter.context_len()) {
    throw std::invalid_argument(
        "simulate config: target and drafter must share context_len");
  }
  SimulateConfig cfg(std::move(target), std::move(drafter));
  if (doc.contains("prompt")) {
    const nlohmann::json& arr = doc.at("prompt");
    if (!arr.is_array()) {
      throw std::invalid_argument("simulate config: prompt must be an array");
    }
    for (const auto& e : arr) {
      const std::uint64_t tok = require_unsigned(e, "simulate config: prompt token");
      if (tok >= cfg.target.vocab()) {
        throw std::invalid_argument("simulate config: prompt token outside vocabulary");
      }
      cfg.prompt.push_back(static_cast<std::uint32_t>(tok));
    }
  }
  if (doc.contains("schemes")) {
    const nlohmann::json& arr = doc.at("schemes");
    if (!arr.is_array() || arr.empty()) {
      throw std::invalid_argument("simulate config: schemes must be a non-empty array");
    }
    cfg.schemes.clear();
    for (const auto& e : arr) {
      if (!e.is_string()) {
        throw std::invalid_argument("simulate config: scheme names must be strings");
      }
      const std::string name = e.get<std::string>();
      if (name != "vanilla" && name != "tli" && name != "rdk_exact" &&
          name != "rdk_taylor") {
        throw std::invalid_argument("simulate config: unknown scheme \"" + name + "\"");
      }
      if (std::find(cfg.schemes.begin(), cfg.schemes.end(), name) != cfg.schemes.end()) {
        throw std::invalid_argument("simulate config: schemes must be distinct");
      }
      cfg.schemes.push_back(name);
    }
  } else {
    cfg.schemes = {"vanilla", "tli", "rdk_exact", "rdk_taylor"};
  }
  if (doc.contains("seed")) cfg.seed = require_unsigned(doc.at("seed"), "simulate config: seed");
  if (doc.contains("theta_scale")) {
    cfg.theta_scale = require_number(doc.at("theta_scale"), "simulate config: theta_scale");
    if (!(cfg.theta_scale >= 0.0) || !std::isfinite(cfg.theta_scale)) {
      throw std::invalid_argument("simulate config: theta_scale must be >= 0");
    }
  }
  return cfg;
}

ToyConditionalModel derive_scheme_drafter(const ToyConditionalModel& target,
                                          const ToyConditionalModel& drafter,
                                          const std::string& scheme, double theta_scale) {
  if (scheme == "vanilla") return drafter;
  if (scheme != "tli" && scheme != "rdk_exact" && scheme != "rdk_taylor") {
    throw std::invalid_argument("derive_scheme_drafter: unknown scheme \"" + scheme + "\"");
  }
  ToyConditionalModel out(drafter.context_len(), drafter.vocab());
  for (const auto& [ctx, q] : drafter.table()) {
    const ProbVector& p = target.at_context(ctx);
    const SupportSet& support = p.support();
    if (scheme == "tli") {
      out.set_entry(ctx, tli_redistribute(q, support));
    } else if (scheme == "rdk_exact") {
      const AffinityMatrix M = build_structured_affinity(p, theta_scale, support);
      out.set_entry(ctx, rdk_redistribute(q, support, M));
    } else {
      out.set_entry(ctx, rdk_taylor_redistribute(q, support, p));
    }
  }
  return out;
}

std::string simulate_csv(const SimulateConfig& cfg, std::size_t steps,
                         std::size_t lookahead) {
  if (steps < 1) throw std::invalid_argument("simulate: steps must be >= 1");
  if (lookahead < 1) throw std::invalid_argument("simulate: lookahead must be >= 1");
  const RandomSource master(cfg.seed);
  std::string out =
      "scheme,context,emitted,tv_distance,analytic_alpha,trials,accepts,empirical_alpha\n";
  for (std::size_t si = 0; si < cfg.schemes.size(); ++si) {
    const std::string& name = cfg.schemes[si];
    const ToyConditionalModel d =
        derive_scheme_drafter(cfg.target, cfg.drafter, name, cfg.theta_scale);
    RandomSource rng = master.split(si);
    const SessionStats st = run_session(cfg.target, d, cfg.prompt, lookahead, steps, rng);
    std::uint64_t emitted_total = 0;
    for (const auto& [key, hist] : st.emitted_histogram) {
      const std::uint64_t total =
          std::accumulate(hist.begin(), hist.end(), std::uint64_t{0});
      emitted_total += total;
      const ProbVector& p = cfg.target.at_context(key);
      double tv = 0.0;
      for (std::size_t i = 0; i < hist.size(); ++i) {
        tv += std::fabs(static_cast<double>(hist[i]) / static_cast<double>(total) - p[i]);
      }
      tv *= 0.5;
      const double analytic = acceptance_rate(p, d.at_context(key));
      const auto trial_it = st.context_trials.find(key);
      const auto accept_it = st.context_accepts.find(key);
      const std::uint64_t trials = trial_it == st.context_trials.end() ? 0 : trial_it->second;
      const std::uint64_t accepts =
          accept_it == st.context_accepts.end() ? 0 : accept_it->second;
      out += name;
      out += ',' + render_context(key);
      out += ',' + std::to_string(total);
      out += ',' + g17(tv);
      out += ',' + g17(analytic);
      out += ',' + std::to_string(trials);
      out += ',' + std::to_string(accepts);
      out += ',';
      if (trials > 0) {
        out += g17(static_cast<double>(accepts) / static_cast<double>(trials));
      }
      out += '\n';
    }
    const std::uint64_t trials = st.total_trials();
    const std::uint64_t accepts = st.total_accepts();
    out += name;
    out += ",*,";
    out += std::to_string(emitted_total);
    out += ",,,";
    out += std::to_string(trials);
    out += ',' + std::to_string(accepts);
    out += ',' + g17(static_cast<double>(accepts) / static_cast<double>(trials));
    out += '\n';
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  std::FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  const std::size_t n =
      content.empty() ? 0 : std::fwrite(content.data(), 1, content.size(), f);
  const int rc = std::fclose(f);
  if (n != content.size() || rc != 0) {
    throw std::runtime_error("short write: " + path);
  }
}

int cmd_sweep(const std::string& config_path, const std::string& out_path,
              const ConfigOverrides& ov) {
  ExperimentConfig cfg = ExperimentConfig::defaults();
  if (!config_path.empty()) {
    std::ifstream in = open_input(config_path);
    cfg = ExperimentConfig::from_json(in);
  }
  apply_overrides(cfg, ov);
  write_text_file(out_path, sweep_csv(run_sweep(cfg)));
  return 0;
}

int cmd_overlay(const std::string& config_path, std::size_t keep,
                const std::string& out_path, const ConfigOverrides& ov) {
  ExperimentConfig cfg = ExperimentConfig::defaults();
  if (!config_path.empty()) {
    std::ifstream in = open_input(config_path);
    cfg = ExperimentConfig::from_json(in);
  }
  apply_overrides(cfg, ov);
  write_text_file(out_path, overlay_csv(cfg, keep));
  return 0;
}

int cmd_freq(const std::string& input_path, double quantile, const std::string& out_path) {
  std::ifstream in = open_input(input_path);
  const TokenFrequencyTable freq = TokenFrequencyTable::from_stream(in);
  const CoverageSummary s = coverage_summary(freq, quantile);
  write_text_file(out_path, coverage_csv(freq));
  std::printf("quantile,tokens_needed,token_fraction\n%s,%zu,%s\n", g17(s.quantile).c_str(),
              s.tokens_needed, g17(s.token_fraction).c_str());
  return 0;
}

int cmd_fit(const std::string& input_path, const std::string& family, double df,
            const std::string& out_path) {
  FitFamily fam;
  if (family == "normal") {
    fam = FitFamily::Normal;
  } else if (family == "student_t") {
    fam = FitFamily::StudentT;
  } else {
    throw std::invalid_argument("fit: family must be normal or student_t");
  }
  std::ifstream in = open_input(input_path);
  std::vector<double> samples;
  double v = 0.0;
  while (in >> v) samples.push_back(v);
  if (!in.eof()) throw std::invalid_argument("fit: non-numeric sample input");
  const FitResult fit = fit_location_scale(std::move(samples), fam, df);
  write_text_file(out_path, fit_csv(fit));
  std::printf("family,loc,scale,df,loglik\n%s,%s,%s,%s,%s\n", family.c_str(),
              g17(fit.loc).c_str(), g17(fit.scale).c_str(), g17(fit.df).c_str(),
              g17(fit.log_likelihood).c_str());
  return 0;
}

int cmd_simulate(const std::string& config_path, std::size_t steps, std::size_t lookahead,
                 const std::string& out_path, std::optional<std::uint64_t> seed) {
  if (config_path.empty()) {
    throw std::invalid_argument("simulate: --config is required");
  }
  std::ifstream in = open_input(config_path);
  SimulateConfig cfg = SimulateConfig::from_json(in);
  if (seed) cfg.seed = *seed;
  write_text_file(out_path, simulate_csv(cfg, steps, lookahead));
  return 0;
}

int cmd_verify(const std::string& selector, std::uint64_t trials, std::uint64_t seed,
               const std::string& out_path, const std::string& table_out) {
  const bool known = selector == "all" || selector == "identity" ||
                     selector == "nonexpansive" || selector == "bounded_l1" ||
                     selector == "softmax" || selector == "rdk2d" || selector == "taylor";
  if (!known) throw std::invalid_argument("verify: unknown suite \"" + selector + "\"");
  const RandomSource base(seed);
  const auto want = [&](const char* s) { return selector == "all" || selector == s; };

  std::vector<VerificationReport> reports;
  std::optional<TaylorVerification> taylor;
  if (want("identity")) reports.push_back(verify_acceptance_identity(trials, 64, base.split(1)));
  if (want("nonexpansive")) reports.push_back(verify_nonexpansive(trials, 64, base.split(2)));
  if (want("bounded_l1")) reports.push_back(verify_bounded_l1(trials, 32, base.split(3)));
  if (want("softmax")) {
    reports.push_back(verify_softmax_stability(trials, 100, 0.1, base.split(4)));
  }
  if (want("rdk2d")) reports.push_back(verify_rdk_vs_tli_2d(trials, base.split(5)));
  if (want("taylor")) {
    taylor = verify_taylor_error(kTaylorThetaGrid, kTaylorNGrid, kTaylorSeeds, base.split(6));
    reports.push_back(taylor->report);
  }

  std::string csv = std::string(kReportCsvHeader) + "\n";
  bool all_pass = true;
  for (const VerificationReport& r : reports) {
    csv += r.csv_row() + "\n";
    all_pass = all_pass && r.pass;
  }
  write_text_file(out_path, csv);
  std::fputs(csv.c_str(), stdout);

  if (!table_out.empty() && taylor) {
    std::string table = "theta,n,mean_error,fitted_bound\n";
    for (const TaylorErrorCell& c : taylor->cells) {
      table += g17(c.theta);
      table += ',' + std::to_string(c.n);
      table += ',' + g17(c.mean_error);
      table += ',' + g17(c.fitted_bound);
      table += '\n';
    }
    write_text_file(table_out, table);
  }
  return all_pass ? 0 : 1;
}

}  // namespace rdk
