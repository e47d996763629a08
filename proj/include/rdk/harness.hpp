#pragma once
#include <cstdint>
#include <istream>
#include <optional>
#include <string>
#include <vector>
#include "rdk/freq.hpp"
#include "rdk/prob.hpp"
#include "rdk/samplers.hpp"
#include "rdk/specdec.hpp"
// Experiment orchestration behind the CLI: synthetic pruning sweeps,
// distribution overlays, frequency-coverage curves, location-scale fit
// diagnostics, toy decoding simulations, and the verification battery. All
// artifacts are CSV with a header row, floats printed with 17 significant
// digits, LF line endings, and rows in a canonical order, so identical
// (config, seed) pairs produce identical bytes.
namespace rdk {

struct TargetSpec {
  enum class Family { StudentT, Gaussian };
  Family family = Family::StudentT;

  // Student-t logits: independent df-heavy coordinates at loc/scale. The
  // default scale puts roughly 96% of the softmax mass on the top quarter of
  // a 200k vocabulary while keeping the bulk of tokens in play.
  double df = 5.0;
  double loc = 0.0;
  double scale = 0.7;

  // Gaussian logits with diagonal covariance. Size-one vectors broadcast
  // across the vocabulary.
  std::vector<double> mu{0.0};
  std::vector<double> diag_var{1.0};
};

// Sweep and overlay configuration. Every field has a default; a config file
// only needs the fields it wants to change, and unknown keys are errors.
struct ExperimentConfig {
  enum class PRef { TrueTarget, FrequencyPrior };
  enum class PruneBy { TopProb, Freq };

  std::size_t vocab_size = 200000;
  std::uint64_t seed = 42;
  TargetSpec target;
  std::vector<std::size_t> prune_keep;  // distinct, each within [1, vocab_size]
  std::vector<SchemeId> schemes;        // distinct, non-empty
  std::size_t trials = 50;
  double tau = 1.0;
  double theta_scale = 0.5;
  PRef p_ref = PRef::TrueTarget;
  PruneBy prune_by = PruneBy::TopProb;

  // The stock synthetic setup: 200k-token Student-t target, keep levels at
  // 100%, 10%, 1%, and 0.25% of the vocabulary, the three headline schemes,
  // 50 trials.
  static ExperimentConfig defaults();
  static ExperimentConfig from_json(std::istream& in);
};

// Command-line overrides layered on top of a parsed config.
struct ConfigOverrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> trials;
  std::optional<std::string> prune_by;  // "top_prob" | "freq"
  std::optional<std::string> p_ref;     // "true_target" | "frequency_prior"
};
void apply_overrides(ExperimentConfig& cfg, const ConfigOverrides& ov);

struct SweepRow {
  std::size_t prune_keep = 0;
  double prune_fraction = 0.0;
  SchemeId scheme = SchemeId::MaskedOnly;
  double acceptance_mean = 0.0;
  double acceptance_std = 0.0;  // sample standard deviation over trials
  std::size_t trials = 0;
  std::uint64_t seed = 0;
};

// One row per (keep level, scheme), keep levels descending, schemes in enum
// order. Within a trial every level and scheme scores the same sampled
// target, so scheme columns are paired comparisons.
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg);
std::string sweep_csv(const std::vector<SweepRow>& rows);

// Per-token mass table for one sampled target (trial 0 of the config seed)
// at one keep level: token_index,target,masked,tli,rdk_taylor sorted by
// descending target mass.
std::string overlay_csv(const ExperimentConfig& cfg, std::size_t keep);

struct CoverageSummary {
  double quantile = 0.0;
  std::size_t tokens_needed = 0;
  double token_fraction = 0.0;  // tokens_needed / vocab_size
};
CoverageSummary coverage_summary(const TokenFrequencyTable& freq, double quantile);
// rank,token,count,cum_fraction in ranked order.
std::string coverage_csv(const TokenFrequencyTable& freq);

enum class FitFamily { Normal, StudentT };

struct QuantilePair {
  double prob = 0.0;
  double empirical = 0.0;
  double theoretical = 0.0;
};

struct FitResult {
  FitFamily family = FitFamily::Normal;
  double loc = 0.0;
  double scale = 0.0;
  double df = 0.0;  // meaningful for the Student-t family only
  double log_likelihood = 0.0;
  std::vector<QuantilePair> quantiles;  // 199 evenly spaced probability levels
};

// Maximum-likelihood location/scale fit with the family's df held fixed.
// Normal is closed form; Student-t runs the standard EM reweighting.
// Requires at least 30 finite samples and non-degenerate spread.
FitResult fit_location_scale(std::vector<double> samples, FitFamily family,
                             double df = 5.0);
std::string fit_csv(const FitResult& fit);

// Toy decoding run configuration. The drafter tables for the redistribution
// schemes are derived per context from the target entry at the same key, so
// both models must condition on the same context length and share a
// vocabulary.
struct SimulateConfig {
  ToyConditionalModel target;
  ToyConditionalModel drafter;
  ContextKey prompt;
  std::vector<std::string> schemes;  // of "vanilla","tli","rdk_exact","rdk_taylor"
  std::uint64_t seed = 42;
  double theta_scale = 0.5;

  SimulateConfig(ToyConditionalModel t, ToyConditionalModel d)
      : target(std::move(t)), drafter(std::move(d)) {}
  static SimulateConfig from_json(std::istream& in);
};

// Builds the scheme's drafter table: "vanilla" returns the drafter as is,
// the others rebuild every entry against the target support at the same
// context.
ToyConditionalModel derive_scheme_drafter(const ToyConditionalModel& target,
                                          const ToyConditionalModel& drafter,
                                          const std::string& scheme,
                                          double theta_scale);

// Per (scheme, context key) emitted-token counts, total-variation distance
// from the target entry, analytic and empirical acceptance, plus a summary
// row per scheme with context "*".
std::string simulate_csv(const SimulateConfig& cfg, std::size_t steps,
                         std::size_t lookahead);

// Default grid for the surrogate-error battery.
inline const std::vector<double> kTaylorThetaGrid{0.01, 0.02, 0.05, 0.1, 0.2};
inline const std::vector<std::size_t> kTaylorNGrid{50, 200, 500, 2000};
inline constexpr std::size_t kTaylorSeeds = 10;

// Command fronts used by the CLI. They read inputs, write artifacts, and
// throw on problems: std::invalid_argument / std::domain_error for bad
// configs or degenerate data (exit 2), std::runtime_error for IO (exit 3).
// Return value is the process exit code for runs that completed.
int cmd_sweep(const std::string& config_path, const std::string& out_path,
              const ConfigOverrides& ov = {});
int cmd_overlay(const std::string& config_path, std::size_t keep,
                const std::string& out_path, const ConfigOverrides& ov = {});
int cmd_freq(const std::string& input_path, double quantile,
             const std::string& out_path);
int cmd_fit(const std::string& input_path, const std::string& family, double df,
            const std::string& out_path);
int cmd_simulate(const std::string& config_path, std::size_t steps,
                 std::size_t lookahead, const std::string& out_path,
                 std::optional<std::uint64_t> seed = std::nullopt);
// Runs the selected suites ("all", "identity", "nonexpansive", "bounded_l1",
// "softmax", "rdk2d", "taylor"); returns 1 when any suite fails. The taylor
// suite uses the default grid regardless of `trials` and writes its cell
// table to `table_out` when non-empty.
int cmd_verify(const std::string& selector, std::uint64_t trials, std::uint64_t seed,
               const std::string& out_path, const std::string& table_out = "");

// Whole-file write, "wb" semantics, LF preserved.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace rdk
