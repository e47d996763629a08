#include "rdk/affinity.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <memory>
#include <stdexcept>

namespace rdk {

CovarianceEstimate estimate_covariance(const std::vector<ProbVector>& samples,
                                       const SupportSet& T) {
  if (samples.size() < 2) {
    throw std::invalid_argument("estimate_covariance: need at least two samples");
  }
  if (T.empty()) throw std::invalid_argument("estimate_covariance: empty support");
  if (T.size() > 4096) {
    throw std::invalid_argument("estimate_covariance: dense output capped at 4096");
  }
  const std::size_t m = samples.front().size();
  const std::size_t d = T.size();
  if (T.indices().back() >= m) {
    throw std::invalid_argument("estimate_covariance: support index out of range");
  }
  for (const ProbVector& s : samples) {
    if (s.size() != m) {
      throw std::invalid_argument("estimate_covariance: sample size mismatch");
    }
  }
  const std::size_t n = samples.size();
  std::vector<double> mean(d, 0.0);
  std::vector<std::vector<double>> rows(n, std::vector<double>(d));
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t k = 0; k < d; ++k) rows[s][k] = samples[s][T[k]];
  }
  for (std::size_t k = 0; k < d; ++k) {
    double acc = 0.0;
    for (std::size_t s = 0; s < n; ++s) acc += rows[s][k];
    mean[k] = acc / static_cast<double>(n);
  }
  CovarianceEstimate out;
  out.sample_count = n;
  out.omega = Matrix(d, d);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t k = 0; k < d; ++k) rows[s][k] -= mean[k];
  }
  const double denom = static_cast<double>(n - 1);
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i; j < d; ++j) {
      double acc = 0.0;
      for (std::size_t s = 0; s < n; ++s) acc += rows[s][i] * rows[s][j];
      const double c = acc / denom;
      out.omega.at(i, j) = c;
      out.omega.at(j, i) = c;
    }
  }
  return out;
}

AffinityMatrix AffinityMatrix::dense(Matrix block, SupportSet domain,
                                     SupportSet built_rows, double tau) {
  if (domain.empty()) throw std::invalid_argument("AffinityMatrix: empty domain");
  if (block.rows != domain.size() || block.cols != domain.size()) {
    throw std::invalid_argument("AffinityMatrix: block shape does not match domain");
  }
  if (!built_rows.is_subset_of(domain)) {
    throw std::invalid_argument("AffinityMatrix: built rows must lie inside the domain");
  }
  AffinityMatrix m;
  m.dense_ = true;
  m.block_ = std::move(block);
  m.domain_ = std::move(domain);
  m.built_rows_ = std::move(built_rows);
  m.tau_ = tau;
  return m;
}

AffinityMatrix AffinityMatrix::rank_one(std::vector<double> shared_row,
                                        SupportSet domain, double theta_scale) {
  if (domain.empty()) throw std::invalid_argument("AffinityMatrix: empty domain");
  if (shared_row.size() != domain.size()) {
    throw std::invalid_argument("AffinityMatrix: row length does not match domain");
  }
  AffinityMatrix m;
  m.dense_ = false;
  m.shared_row_ = std::move(shared_row);
  m.built_rows_ = domain;
  m.domain_ = std::move(domain);
  m.theta_scale_ = theta_scale;
  return m;
}

std::size_t AffinityMatrix::min_vocab() const {
  return static_cast<std::size_t>(domain_.indices().back()) + 1;
}

std::vector<double> AffinityMatrix::domain_row(std::size_t k) const {
  if (k >= domain_.size()) {
    throw std::invalid_argument("AffinityMatrix: row index outside domain");
  }
  if (!dense_) return shared_row_;
  std::vector<double> row(domain_.size());
  for (std::size_t j = 0; j < domain_.size(); ++j) row[j] = block_.at(k, j);
  return row;
}

// Shared row softmax helper working on raw doubles.
static void softmax_row_inplace(std::vector<double>& row) {
  double mx = row[0];
  for (double v : row) mx = std::max(mx, v);
  for (double& v : row) v = std::exp(v - mx);
  const double total = neumaier_sum(row);
  for (double& v : row) v /= total;
}

AffinityMatrix build_affinity(const CovarianceEstimate& cov, double tau,
                              const SupportSet& T, const SupportSet& I) {
  if (!(tau > 0.0)) throw std::invalid_argument("build_affinity: tau must be positive");
  if (T.empty()) throw std::invalid_argument("build_affinity: empty domain");
  if (cov.omega.rows != T.size() || cov.omega.cols != T.size()) {
    throw std::invalid_argument("build_affinity: covariance shape does not match domain");
  }
  if (!I.is_subset_of(T)) {
    throw std::invalid_argument("build_affinity: built rows must lie inside the domain");
  }
  for (double v : cov.omega.a) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("build_affinity: non-finite covariance entry");
    }
  }
  const std::size_t d = T.size();
  Matrix block(d, d);
  std::size_t next_built = 0;
  std::vector<double> row(d);
  for (std::size_t k = 0; k < d; ++k) {
    const bool built = next_built < I.size() && I[next_built] == T[k];
    if (!built) {
      block.at(k, k) = 1.0;
      continue;
    }
    ++next_built;
    for (std::size_t j = 0; j < d; ++j) row[j] = cov.omega.at(k, j) / tau;
    softmax_row_inplace(row);
    for (std::size_t j = 0; j < d; ++j) block.at(k, j) = row[j];
  }
  return AffinityMatrix::dense(std::move(block), T, I, tau);
}

AffinityMatrix build_structured_affinity(const ProbVector& p_ref, double theta_scale,
                                         const SupportSet& T) {
  if (T.empty()) throw std::invalid_argument("build_structured_affinity: empty domain");
  if (!(theta_scale >= 0.0) || !std::isfinite(theta_scale)) {
    throw std::invalid_argument("build_structured_affinity: theta_scale must be >= 0");
  }
  if (p_ref.is_sub_probability()) {
    throw std::invalid_argument("build_structured_affinity: p_ref must be a full distribution");
  }
  if (T.indices().back() >= p_ref.size()) {
    throw std::invalid_argument("build_structured_affinity: domain exceeds p_ref size");
  }
  std::vector<double> row(T.size());
  for (std::size_t k = 0; k < T.size(); ++k) row[k] = theta_scale * p_ref[T[k]];
  softmax_row_inplace(row);
  return AffinityMatrix::rank_one(std::move(row), T, theta_scale);
}

ProbVector apply_exact(const AffinityMatrix& m, const ProbVector& q_prime) {
  if (q_prime.is_sub_probability()) {
    throw std::invalid_argument("apply_exact: input must be a full distribution");
  }
  if (q_prime.size() < m.min_vocab()) {
    throw std::invalid_argument("apply_exact: input shorter than the matrix domain");
  }
  if (!q_prime.support().is_subset_of(m.built_rows())) {
    throw std::invalid_argument("apply_exact: input support escapes the built rows");
  }
  const SupportSet& T = m.domain();
  std::vector<double> out(q_prime.size(), 0.0);
  if (!m.is_dense()) {
    const std::vector<double>& w = m.shared_row();
    for (std::size_t j = 0; j < T.size(); ++j) out[T[j]] = w[j];
    return ProbVector::full(std::move(out));
  }
  const Matrix& block = m.block();
  const auto& t_idx = T.indices();
  for (std::uint32_t i : q_prime.support()) {
    const double qi = q_prime[i];
    const std::size_t k =
        std::lower_bound(t_idx.begin(), t_idx.end(), i) - t_idx.begin();
    for (std::size_t j = 0; j < T.size(); ++j) {
      out[t_idx[j]] += qi * block.at(k, j);
    }
  }
  return ProbVector::full(std::move(out));
}

std::vector<double> apply_transpose(const AffinityMatrix& m, std::span<const double> x) {
  if (x.size() < m.min_vocab()) {
    throw std::invalid_argument("apply_transpose: input shorter than the matrix domain");
  }
  const SupportSet& T = m.domain();
  // Identity everywhere outside the domain block.
  std::vector<double> out(x.begin(), x.end());
  if (!m.is_dense()) {
    double total = 0.0;
    for (std::uint32_t i : T) total += x[i];
    const std::vector<double>& w = m.shared_row();
    for (std::size_t j = 0; j < T.size(); ++j) out[T[j]] = w[j] * total;
    return out;
  }
  const Matrix& block = m.block();
  std::vector<double> acc(T.size(), 0.0);
  for (std::size_t k = 0; k < T.size(); ++k) {
    const double xi = x[T[k]];
    if (xi == 0.0) continue;
    for (std::size_t j = 0; j < T.size(); ++j) acc[j] += xi * block.at(k, j);
  }
  for (std::size_t j = 0; j < T.size(); ++j) out[T[j]] = acc[j];
  return out;
}

double compute_theta(const ProbVector& p, const ProbVector& q_prime) {
  if (p.size() != q_prime.size()) {
    throw std::invalid_argument("compute_theta: size mismatch");
  }
  if (p.is_sub_probability() || q_prime.is_sub_probability()) {
    throw std::invalid_argument("compute_theta: both inputs must be full distributions");
  }
  std::vector<double> prod(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) prod[i] = p[i] * q_prime[i];
  return neumaier_sum(prod);
}

ProbVector taylor_redistribute(const ProbVector& p_ref, const ProbVector& q_prime,
                               const SupportSet& T) {
  if (T.empty()) throw std::invalid_argument("taylor_redistribute: empty domain");
  if (p_ref.size() != q_prime.size()) {
    throw std::invalid_argument("taylor_redistribute: size mismatch");
  }
  if (T.indices().back() >= p_ref.size()) {
    throw std::invalid_argument("taylor_redistribute: domain exceeds vector size");
  }
  if (p_ref.is_sub_probability() || q_prime.is_sub_probability()) {
    throw std::invalid_argument("taylor_redistribute: inputs must be full distributions");
  }
  if (!q_prime.support().is_subset_of(T)) {
    throw std::invalid_argument("taylor_redistribute: input support escapes the domain");
  }
  const double n = static_cast<double>(T.size());
  const double theta = compute_theta(p_ref, q_prime);
  std::vector<double> tilde(p_ref.size(), 0.0);
  for (std::uint32_t i : T) {
    tilde[i] = (n * q_prime[i] + theta * p_ref[i]) / (n + p_ref[i]);
  }
  const double total = neumaier_sum(tilde);
  for (double& v : tilde) v /= total;
  return ProbVector::full(std::move(tilde));
}

namespace {

constexpr char kMagic[4] = {'R', 'D', 'K', 'M'};
constexpr std::uint32_t kVersion = 1;

void write_bytes(std::FILE* f, const void* p, std::size_t n, const std::string& path) {
  if (std::fwrite(p, 1, n, f) != n) {
    throw std::runtime_error("save_affinity: short write to " + path);
  }
}

void read_bytes(std::FILE* f, void* p, std::size_t n, const std::string& path) {
  if (std::fread(p, 1, n, f) != n) {
    throw std::runtime_error("load_affinity: short read from " + path);
  }
}

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};

}  // namespace

void save_affinity(const AffinityMatrix& m, const std::string& path) {
  if (!m.is_dense()) {
    throw std::invalid_argument("save_affinity: persistence covers the dense form only");
  }
  std::unique_ptr<std::FILE, FileCloser> f(std::fopen(path.c_str(), "wb"));
  if (!f) throw std::runtime_error("save_affinity: cannot open " + path);
  write_bytes(f.get(), kMagic, sizeof(kMagic), path);
  const std::uint32_t version = kVersion;
  write_bytes(f.get(), &version, sizeof(version), path);
  const std::uint64_t dim = m.domain().size();
  write_bytes(f.get(), &dim, sizeof(dim), path);
  const double tau = m.tau();
  write_bytes(f.get(), &tau, sizeof(tau), path);
  const Matrix& block = m.block();
  write_bytes(f.get(), block.a.data(), block.a.size() * sizeof(double), path);
  if (std::fflush(f.get()) != 0) {
    throw std::runtime_error("save_affinity: flush failed for " + path);
  }
}

AffinityMatrix load_affinity(const std::string& path) {
  std::unique_ptr<std::FILE, FileCloser> f(std::fopen(path.c_str(), "rb"));
  if (!f) throw std::runtime_error("load_affinity: cannot open " + path);
  char magic[4];
  read_bytes(f.get(), magic, sizeof(magic), path);
  if (std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw std::runtime_error("load_affinity: bad magic in " + path);
  }
  std::uint32_t version = 0;
  read_bytes(f.get(), &version, sizeof(version), path);
  if (version != kVersion) {
    throw std::runtime_error("load_affinity: unsupported version in " + path);
  }
  std::uint64_t dim = 0;
  read_bytes(f.get(), &dim, sizeof(dim), path);
  if (dim == 0 || dim > 4096) {
    throw std::runtime_error("load_affinity: implausible dimension in " + path);
  }
  double tau = 0.0;
  read_bytes(f.get(), &tau, sizeof(tau), path);
  if (!(tau > 0.0) || !std::isfinite(tau)) {
    throw std::runtime_error("load_affinity: invalid tau in " + path);
  }
  Matrix block(dim, dim);
  read_bytes(f.get(), block.a.data(), block.a.size() * sizeof(double), path);
  // Re-validate what the writer promised: every row is a distribution.
  for (std::size_t i = 0; i < dim; ++i) {
    std::vector<double> row(dim);
    for (std::size_t j = 0; j < dim; ++j) {
      const double v = block.at(i, j);
      if (!std::isfinite(v) || v < 0.0) {
        throw std::runtime_error("load_affinity: invalid entry in " + path);
      }
      row[j] = v;
    }
    if (std::abs(neumaier_sum(row) - 1.0) > kSimplexTol) {
      throw std::runtime_error("load_affinity: row mass off the simplex in " + path);
    }
  }
  const SupportSet full = SupportSet::full(dim);
  return AffinityMatrix::dense(std::move(block), full, full, tau);
}

}  // namespace rdk
