#include "rdk/sampling.hpp"

#include <cmath>
#include <stdexcept>

namespace rdk {

GaussianLogitSampler::GaussianLogitSampler(LogitVector mu,
                                           const std::vector<double>& diag_variance)
    : mu_(std::move(mu)) {
  if (mu_.empty()) throw std::invalid_argument("gaussian sampler: empty mean");
  if (diag_variance.size() != mu_.size()) {
    throw std::invalid_argument("gaussian sampler: mean/variance size mismatch");
  }
  stddev_.resize(diag_variance.size());
  for (std::size_t i = 0; i < diag_variance.size(); ++i) {
    const double v = diag_variance[i];
    if (!std::isfinite(v) || v < 0.0) {
      throw std::invalid_argument("gaussian sampler: variances must be finite and >= 0");
    }
    stddev_[i] = std::sqrt(v);
  }
}

GaussianLogitSampler::GaussianLogitSampler(LogitVector mu, const Matrix& covariance)
    : mu_(std::move(mu)), dense_(true) {
  if (mu_.empty()) throw std::invalid_argument("gaussian sampler: empty mean");
  if (covariance.rows != mu_.size() || covariance.cols != mu_.size()) {
    throw std::invalid_argument("gaussian sampler: covariance shape mismatch");
  }
  if (covariance.rows > 4096) {
    throw std::invalid_argument("gaussian sampler: dense covariance capped at 4096");
  }
  chol_ = cholesky_semidefinite(covariance);
}

LogitVector GaussianLogitSampler::draw(RandomSource& rng) const {
  const std::size_t m = mu_.size();
  LogitVector z(m);
  if (!dense_) {
    for (std::size_t i = 0; i < m; ++i) {
      z[i] = mu_[i] + stddev_[i] * rng.next_gaussian();
    }
    return z;
  }
  std::vector<double> g(m);
  for (double& v : g) v = rng.next_gaussian();
  for (std::size_t i = 0; i < m; ++i) {
    double acc = mu_[i];
    for (std::size_t k = 0; k <= i; ++k) acc += chol_.at(i, k) * g[k];
    z[i] = acc;
  }
  return z;
}

LogitVector sample_gaussian_logits(const LogitVector& mu,
                                   const std::vector<double>& diag_variance,
                                   RandomSource& rng) {
  return GaussianLogitSampler(mu, diag_variance).draw(rng);
}

LogitVector sample_gaussian_logits(const LogitVector& mu, const Matrix& covariance,
                                   RandomSource& rng) {
  return GaussianLogitSampler(mu, covariance).draw(rng);
}

LogitVector sample_student_t_logits(std::size_t m, double df, double loc, double scale,
                                    RandomSource& rng) {
  if (m == 0) throw std::invalid_argument("student t logits: m must be >= 1");
  if (!(df > 0.0)) throw std::invalid_argument("student t logits: df must be positive");
  if (!(scale >= 0.0)) {
    throw std::invalid_argument("student t logits: scale must be non-negative");
  }
  LogitVector z(m);
  if (scale == 0.0) {
    for (double& v : z) v = loc;
    return z;
  }
  for (double& v : z) v = loc + scale * rng.next_student_t(df);
  return z;
}

ProbVector sample_uniform_simplex(std::size_t m, RandomSource& rng) {
  if (m == 0) throw std::invalid_argument("sample_uniform_simplex: m must be >= 1");
  std::vector<double> e(m);
  for (double& v : e) v = rng.next_exponential();
  const double total = neumaier_sum(e);
  for (double& v : e) v /= total;
  return ProbVector::full(std::move(e));
}

ProbVector sample_dirichlet(const std::vector<double>& alpha, RandomSource& rng) {
  if (alpha.empty()) throw std::invalid_argument("sample_dirichlet: empty alpha");
  std::vector<double> g(alpha.size());
  for (std::size_t i = 0; i < alpha.size(); ++i) g[i] = rng.next_gamma(alpha[i]);
  const double total = neumaier_sum(g);
  if (total <= 0.0) {
    // Vanishingly unlikely underflow for tiny alphas; retry once split.
    RandomSource retry = rng.split(0x5eed);
    return sample_dirichlet(alpha, retry);
  }
  for (double& v : g) v /= total;
  return ProbVector::full(std::move(g));
}

}  // namespace rdk
