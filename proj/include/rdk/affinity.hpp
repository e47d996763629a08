#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "rdk/numeric.hpp"
#include "rdk/prob.hpp"

// Token-affinity matrices used to push drafter mass back across the target
// vocabulary. An AffinityMatrix is a row-stochastic map M over the ambient
// vocabulary that acts as identity outside a domain set T. Two forms exist:
//
//   dense:    an explicit |T| x |T| block. Rows listed in I are softmax rows
//             built from a covariance estimate at temperature tau; rows in
//             T \ I are identity rows.
//
//   rank-one: every row of the block is the same tilted distribution
//             softmax(theta_scale * p_ref) over T. Applying the transpose to
//             any distribution supported in T returns that shared row, so
//             application costs O(|T|) and no matrix is materialized.
//
// taylor_redistribute is the O(|T|) surrogate for the rank-one application:
// it expands the shared-row map to first order around the uniform
// distribution and therefore tracks the exact output only when its input is
// itself near uniform over T.

namespace rdk {

struct CovarianceEstimate {
  Matrix omega;              // |T| x |T|, coordinates in T order
  std::size_t sample_count = 0;
};

// Unbiased sample covariance of the given distributions restricted to the
// coordinates in T. Requires at least two samples and |T| <= 4096.
CovarianceEstimate estimate_covariance(const std::vector<ProbVector>& samples,
                                       const SupportSet& T);

class AffinityMatrix {
 public:
  static AffinityMatrix dense(Matrix block, SupportSet domain, SupportSet built_rows,
                              double tau);
  static AffinityMatrix rank_one(std::vector<double> shared_row, SupportSet domain,
                                 double theta_scale);

  bool is_dense() const { return dense_; }
  const SupportSet& domain() const { return domain_; }          // T
  const SupportSet& built_rows() const { return built_rows_; }  // I (= T for rank-one)
  double tau() const { return tau_; }
  double theta_scale() const { return theta_scale_; }

  // Minimum ambient vector length this matrix can act on.
  std::size_t min_vocab() const;

  // Block row for the k-th domain index, length |T|.
  std::vector<double> domain_row(std::size_t k) const;

  const Matrix& block() const { return block_; }
  const std::vector<double>& shared_row() const { return shared_row_; }

 private:
  AffinityMatrix() = default;

  bool dense_ = false;
  SupportSet domain_;
  SupportSet built_rows_;
  double tau_ = 1.0;
  double theta_scale_ = 0.0;
  Matrix block_;                    // dense form
  std::vector<double> shared_row_;  // rank-one form
};

// Softmax rows at temperature tau from a covariance estimate. Rows in I get
// exp(omega_ij / tau) normalized over T; rows in T \ I stay identity.
AffinityMatrix build_affinity(const CovarianceEstimate& cov, double tau,
                              const SupportSet& T, const SupportSet& I);

// Rank-one form with shared row softmax(theta_scale * p_ref) over T.
AffinityMatrix build_structured_affinity(const ProbVector& p_ref, double theta_scale,
                                         const SupportSet& T);

// Exact transpose application to a full distribution supported within the
// built rows. Output is a full distribution supported within T.
ProbVector apply_exact(const AffinityMatrix& m, const ProbVector& q_prime);

// Raw transpose application to an arbitrary real vector, identity outside T.
// This is the honest linear map, with no simplex checks; the verification
// suites use it to probe non-expansiveness and bias.
std::vector<double> apply_transpose(const AffinityMatrix& m, std::span<const double> x);

// Overlap weight theta = <p, q_prime> between two full distributions.
double compute_theta(const ProbVector& p, const ProbVector& q_prime);

// Linear-time redistribution surrogate:
//   tilde_i = (N q'_i + theta p_i) / (N + p_i),  N = |T|, theta = <p_ref, q'>
// normalized over T. Zero outside T.
ProbVector taylor_redistribute(const ProbVector& p_ref, const ProbVector& q_prime,
                               const SupportSet& T);

// Dense persistence. Layout: magic "RDKM", version u32, block dimension u64,
// tau f64, then row-major f64 payload, all little-endian. Loading restores a
// dense matrix over vocabulary {0..m-1} with every row validated as a
// distribution.
void save_affinity(const AffinityMatrix& m, const std::string& path);
AffinityMatrix load_affinity(const std::string& path);

}  // namespace rdk
