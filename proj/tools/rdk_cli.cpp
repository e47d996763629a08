#include <cstdint>
#include <cstdio>
#include <exception>
#include <optional>
#include <stdexcept>
#include <string>

#include "CLI11.hpp"

#include "rdk/harness.hpp"

// Exit codes: 0 success, 1 verification-suite failure, 2 invalid arguments or
// degenerate data, 3 IO or internal failure.
int main(int argc, char** argv) {
  CLI::App app{"Synthetic acceptance experiments for cross-vocabulary drafters"};
  app.require_subcommand(1);

  std::string config_path;
  std::string in_path;
  std::string out_path;
  std::optional<std::uint64_t> seed_ov;
  std::optional<std::size_t> trials_ov;
  std::optional<std::string> prune_by_ov;
  std::optional<std::string> p_ref_ov;

  CLI::App* sweep = app.add_subcommand(
      "sweep", "Acceptance-rate sweep across pruning levels and schemes");
  sweep->add_option("--config", config_path,
                    "JSON experiment config; defaults apply when omitted");
  sweep->add_option("--out", out_path, "Output CSV path")->required();
  sweep->add_option("--seed", seed_ov, "Override the config seed");
  sweep->add_option("--trials", trials_ov, "Override the number of trials");
  sweep->add_option("--prune-by", prune_by_ov, "Pruning mode: top_prob or freq");
  sweep->add_option("--p-ref", p_ref_ov,
                    "Reference distribution: true_target or frequency_prior");

  std::size_t keep = 0;
  CLI::App* overlay = app.add_subcommand(
      "overlay", "Per-token mass table (target, masked, tli, rdk_taylor) at one keep level");
  overlay->add_option("--config", config_path,
                      "JSON experiment config; defaults apply when omitted");
  overlay->add_option("--keep", keep, "Tokens retained by pruning")->required();
  overlay->add_option("--out", out_path, "Output CSV path")->required();
  overlay->add_option("--seed", seed_ov, "Override the config seed");
  overlay->add_option("--prune-by", prune_by_ov, "Pruning mode: top_prob or freq");
  overlay->add_option("--p-ref", p_ref_ov,
                      "Reference distribution: true_target or frequency_prior");

  double quantile = 0.95;
  CLI::App* freq =
      app.add_subcommand("freq", "Frequency-ranked coverage curve from a token stream");
  freq->add_option("--in", in_path, "Whitespace-separated token id stream")->required();
  freq->add_option("--quantile", quantile, "Mass quantile to summarize")
      ->capture_default_str();
  freq->add_option("--out", out_path, "Coverage curve CSV path")->required();

  std::string family = "student_t";
  double df = 5.0;
  CLI::App* fit =
      app.add_subcommand("fit", "Location-scale fit diagnostics for scalar samples");
  fit->add_option("--in", in_path, "Whitespace-separated samples")->required();
  fit->add_option("--family", family, "normal or student_t")->capture_default_str();
  fit->add_option("--df", df, "Degrees of freedom held fixed for student_t")
      ->capture_default_str();
  fit->add_option("--out", out_path, "Quantile table CSV path")->required();

  std::size_t steps = 1000;
  std::size_t lookahead = 3;
  CLI::App* simulate =
      app.add_subcommand("simulate", "Toy speculative decoding session statistics");
  simulate->add_option("--config", config_path, "JSON run config with target and drafter")
      ->required();
  simulate->add_option("--steps", steps, "Verification rounds per scheme")
      ->capture_default_str();
  simulate->add_option("--lookahead", lookahead, "Draft tokens per round")
      ->capture_default_str();
  simulate->add_option("--out", out_path, "Output CSV path")->required();
  simulate->add_option("--seed", seed_ov, "Override the config seed");

  std::string suite = "all";
  std::uint64_t verify_trials = 100000;
  std::uint64_t verify_seed = 42;
  std::string table_out;
  CLI::App* verify = app.add_subcommand("verify", "Monte-Carlo verification battery");
  verify->add_option("--suite", suite,
                     "all, identity, nonexpansive, bounded_l1, softmax, rdk2d, or taylor")
      ->capture_default_str();
  verify->add_option("--trials", verify_trials, "Trials per randomized suite")
      ->capture_default_str();
  verify->add_option("--seed", verify_seed, "Master seed")->capture_default_str();
  verify->add_option("--out", out_path, "Report CSV path")->required();
  verify->add_option("--table-out", table_out,
                     "Optional per-cell surrogate-error table CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    rdk::ConfigOverrides ov;
    ov.seed = seed_ov;
    ov.trials = trials_ov;
    ov.prune_by = prune_by_ov;
    ov.p_ref = p_ref_ov;
    if (sweep->parsed()) return rdk::cmd_sweep(config_path, out_path, ov);
    if (overlay->parsed()) return rdk::cmd_overlay(config_path, keep, out_path, ov);
    if (freq->parsed()) return rdk::cmd_freq(in_path, quantile, out_path);
    if (fit->parsed()) return rdk::cmd_fit(in_path, family, df, out_path);
    if (simulate->parsed()) {
      return rdk::cmd_simulate(config_path, steps, lookahead, out_path, seed_ov);
    }
    if (verify->parsed()) {
      return rdk::cmd_verify(suite, verify_trials, verify_seed, out_path, table_out);
    }
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::runtime_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
