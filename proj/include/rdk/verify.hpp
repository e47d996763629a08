#pragma once
#include <cstdint>
#include <optional>
#include <string>
#include <vector>
#include "rdk/prng.hpp"
// Monte-Carlo verification suites for the identities and inequalities the
// redistribution machinery relies on. Each suite draws its trials from
// split child streams of the caller's RandomSource, so trial k is the same
// experiment no matter how many trials run or in what order, and every
// report carries enough state (trials, bound, seed) to reproduce a
// violation standalone.
//
// Tolerance policy: exact algebraic identities are held to 1e-12,
// inequality theorems get 1e-9 of float slack, and probabilistic statements
// get three binomial standard deviations around the stated rate.
namespace rdk {

struct VerificationReport {
  std::string suite;
  std::uint64_t trials = 0;
  std::uint64_t violations = 0;
  double max_residual = 0.0;
  double bound = 0.0;
  std::uint64_t seed = 0;
  bool pass = false;
  // bounded_l1 only: trials re-drawn because the sampled supports were
  // disjoint. Diagnostic, not serialized.
  std::uint64_t redraws = 0;

  // suite,trials,violations,max_residual,bound,seed,pass
  std::string csv_row() const;
};

inline constexpr const char* kReportCsvHeader =
    "suite,trials,violations,max_residual,bound,seed,pass";

// Acceptance overlap against its two closed forms, 1 - |k|_1 and
// 1 - 0.5 |p - q|_1, on uniform-simplex pairs. Bound 1e-12.
VerificationReport verify_acceptance_identity(std::uint64_t trials, std::size_t m,
                                              const RandomSource& base);

// |M^T x - M^T y|_1 <= |x - y|_1 for row-stochastic M with Dirichlet(1) rows
// and x, y uniform in [-1, 1]^m. Bound 1e-12. m capped at 128.
VerificationReport verify_nonexpansive(std::uint64_t trials, std::size_t m,
                                       const RandomSource& base);

// |p' - p|_1 <= |q0 - p|_1 + |M^T p - p|_1 on random support pairs, with q0
// the renormalized restriction and p' its image under a random map that is
// Dirichlet on the overlap rows and identity elsewhere. Bound 1e-9. Trials
// whose supports are disjoint are redrawn and counted in `redraws`.
VerificationReport verify_bounded_l1(std::uint64_t trials, std::size_t m,
                                     const RandomSource& base);

// |softmax(z + eta) - softmax(z)|_1 <= epsilon / 2 for |eta|_1 = epsilon.
// Random directions, with periodic one-hot probes at the argmax coordinate.
VerificationReport verify_softmax_stability(std::uint64_t trials, std::size_t m,
                                            double epsilon, const RandomSource& base);

// Optional override for the two-token Gaussian comparison; without it each
// trial draws its own mixing weight and uses the tight mean separation.
struct Rdk2dParams {
  double a = 0.75;       // diagonal of the symmetric 2x2 map, in [0.5, 1]
  double mu_gap = 6.0;   // mean separation, must be >= 6 sqrt(a)
};

// Two-token Gaussian logit construction in which renormalization alone
// (acceptance p_1) beats the affinity route at most 0.54% of the time.
// Violation frequency is tested against 0.0054 plus three binomial sigmas.
VerificationReport verify_rdk_vs_tli_2d(std::uint64_t trials, const RandomSource& base,
                                        std::optional<Rdk2dParams> fixed = std::nullopt);

struct TaylorErrorCell {
  double theta = 0.0;
  std::size_t n = 0;
  double mean_error = 0.0;    // seed-averaged L1 gap, exact vs surrogate
  double fitted_bound = 0.0;  // c1 * theta + c2 / n^2
};

struct TaylorVerification {
  VerificationReport report;
  std::vector<TaylorErrorCell> cells;
  double c1 = 0.0;
  double c2 = 0.0;
};

// Surrogate error against a dense oracle on the structured covariance
// family. For each (theta, N): target logits are heavy-tailed over N, the
// input distribution tilts the uniform by +/- theta/N with the deficit on
// the target's head, and the oracle materializes the row-softmax map from
// omega_ij = theta * p_j. Passes when the seed-averaged error is monotone
// non-increasing in N at every theta and no cell exceeds the least-squares
// c1 * theta + c2 / N^2 surface by more than 10%.
TaylorVerification verify_taylor_error(const std::vector<double>& theta_grid,
                                       const std::vector<std::size_t>& n_grid,
                                       std::size_t seeds, const RandomSource& base);

}  // namespace rdk
