#pragma once

#include <vector>

#include "rdk/numeric.hpp"
#include "rdk/prng.hpp"
#include "rdk/prob.hpp"

// Synthetic logit and simplex samplers used by the verification suites and
// the experiment harness.

namespace rdk {

// Multivariate normal logits. The dense constructor factors the covariance
// once so repeated draws reuse the Cholesky factor; dense covariances are
// capped at 4096 dimensions.
class GaussianLogitSampler {
 public:
  // Diagonal covariance, one variance per coordinate.
  GaussianLogitSampler(LogitVector mu, const std::vector<double>& diag_variance);
  // Dense covariance; must be square, symmetric within tolerance, and
  // positive semidefinite.
  GaussianLogitSampler(LogitVector mu, const Matrix& covariance);

  LogitVector draw(RandomSource& rng) const;

 private:
  LogitVector mu_;
  std::vector<double> stddev_;  // diagonal path
  Matrix chol_;                 // dense path, lower triangular
  bool dense_ = false;
};

LogitVector sample_gaussian_logits(const LogitVector& mu,
                                   const std::vector<double>& diag_variance,
                                   RandomSource& rng);
LogitVector sample_gaussian_logits(const LogitVector& mu, const Matrix& covariance,
                                   RandomSource& rng);

// Independent scaled and shifted Student-t draws per coordinate. df must be
// positive; scale entries may be zero (degenerate coordinates return loc) but
// not negative.
LogitVector sample_student_t_logits(std::size_t m, double df, double loc, double scale,
                                    RandomSource& rng);

// Uniform draw from the m-simplex (normalized exponentials).
ProbVector sample_uniform_simplex(std::size_t m, RandomSource& rng);

// Dirichlet with the given concentration parameters.
ProbVector sample_dirichlet(const std::vector<double>& alpha, RandomSource& rng);

}  // namespace rdk
