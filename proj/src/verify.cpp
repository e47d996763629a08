#include "rdk/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "rdk/affinity.hpp"
#include "rdk/metrics.hpp"
#include "rdk/numeric.hpp"
#include "rdk/prob.hpp"
#include "rdk/sampling.hpp"
#include "rdk/samplers.hpp"

namespace rdk {

namespace {

constexpr double kIdentityTol = 1e-12;
constexpr double kInequalityTol = 1e-9;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// Non-empty uniform random subset of {0..m-1}; each index kept with
// probability one half, empty outcomes redrawn.
SupportSet random_subset(std::size_t m, RandomSource& rng) {
  std::vector<std::uint32_t> idx;
  while (idx.empty()) {
    for (std::size_t i = 0; i < m; ++i) {
      if (rng.next_double() < 0.5) idx.push_back(static_cast<std::uint32_t>(i));
    }
  }
  return SupportSet::from_sorted(std::move(idx));
}

// Full distribution over m coordinates whose restriction to s is a uniform
// Dirichlet draw.
ProbVector scatter_simplex(std::size_t m, const SupportSet& s, RandomSource& rng) {
  const ProbVector inner = sample_uniform_simplex(s.size(), rng);
  std::vector<double> out(m, 0.0);
  for (std::size_t k = 0; k < s.size(); ++k) out[s[k]] = inner[k];
  return ProbVector::full(std::move(out));
}

}  // namespace

std::string VerificationReport::csv_row() const {
  std::string row = suite;
  row += ',' + std::to_string(trials);
  row += ',' + std::to_string(violations);
  row += ',' + format_double(max_residual);
  row += ',' + format_double(bound);
  row += ',' + std::to_string(seed);
  row += ',';
  row += pass ? "true" : "false";
  return row;
}

VerificationReport verify_acceptance_identity(std::uint64_t trials, std::size_t m,
                                              const RandomSource& base) {
  if (trials < 1) throw std::invalid_argument("verify_acceptance_identity: trials >= 1");
  if (m < 2) throw std::invalid_argument("verify_acceptance_identity: m >= 2");
  VerificationReport rep;
  rep.suite = "acceptance_identity";
  rep.trials = trials;
  rep.bound = kIdentityTol;
  rep.seed = base.seed();
  for (std::uint64_t t = 0; t < trials; ++t) {
    RandomSource rng = base.split(t);
    const ProbVector p = sample_uniform_simplex(m, rng);
    const ProbVector q = sample_uniform_simplex(m, rng);
    const double alpha = acceptance_rate(p, q);
    const KernelVector k = drafter_kernel(p, q);
    const double via_kernel = 1.0 - l1_norm(k);
    const double via_distance = 1.0 - 0.5 * l1_distance(p, q);
    const double res =
        std::max(std::fabs(alpha - via_kernel), std::fabs(alpha - via_distance));
    rep.max_residual = std::max(rep.max_residual, res);
    if (res > rep.bound) ++rep.violations;
  }
  rep.pass = rep.violations == 0;
  return rep;
}

VerificationReport verify_nonexpansive(std::uint64_t trials, std::size_t m,
                                       const RandomSource& base) {
  if (trials < 1) throw std::invalid_argument("verify_nonexpansive: trials >= 1");
  if (m < 1 || m > 128) throw std::invalid_argument("verify_nonexpansive: m in [1, 128]");
  VerificationReport rep;
  rep.suite = "nonexpansive";
  rep.trials = trials;
  rep.bound = kIdentityTol;
  rep.seed = base.seed();
  std::vector<double> mt(m * m);
  std::vector<double> x(m), y(m), mx(m), my(m);
  for (std::uint64_t t = 0; t < trials; ++t) {
    RandomSource rng = base.split(t);
    for (std::size_t i = 0; i < m; ++i) {
      const ProbVector row = sample_uniform_simplex(m, rng);
      for (std::size_t j = 0; j < m; ++j) mt[i * m + j] = row[j];
    }
    for (std::size_t i = 0; i < m; ++i) x[i] = 2.0 * rng.next_double() - 1.0;
    for (std::size_t i = 0; i < m; ++i) y[i] = 2.0 * rng.next_double() - 1.0;
    for (std::size_t j = 0; j < m; ++j) {
      double ax = 0.0, ay = 0.0;
      for (std::size_t i = 0; i < m; ++i) {
        ax += mt[i * m + j] * x[i];
        ay += mt[i * m + j] * y[i];
      }
      mx[j] = ax;
      my[j] = ay;
    }
    const double res = l1_distance(mx, my) - l1_distance(x, y);
    rep.max_residual = std::max(rep.max_residual, res);
    if (res > rep.bound) ++rep.violations;
  }
  rep.pass = rep.violations == 0;
  return rep;
}

VerificationReport verify_bounded_l1(std::uint64_t trials, std::size_t m,
                                     const RandomSource& base) {
  if (trials < 1) throw std::invalid_argument("verify_bounded_l1: trials >= 1");
  if (m < 2 || m > 128) throw std::invalid_argument("verify_bounded_l1: m in [2, 128]");
  VerificationReport rep;
  rep.suite = "bounded_l1";
  rep.trials = trials;
  rep.bound = kInequalityTol;
  rep.seed = base.seed();
  for (std::uint64_t t = 0; t < trials; ++t) {
    RandomSource rng = base.split(t);
    SupportSet target_support;
    SupportSet drafter_support;
    SupportSet overlap;
    for (;;) {
      target_support = random_subset(m, rng);
      drafter_support = random_subset(m, rng);
      overlap = drafter_support.intersect(target_support);
      if (!overlap.empty()) break;
      ++rep.redraws;
    }
    const ProbVector p = scatter_simplex(m, target_support, rng);
    const ProbVector q = scatter_simplex(m, drafter_support, rng);
    const ProbVector q0 = tli_redistribute(q, target_support);

    // Dirichlet rows on the overlap, identity rows elsewhere in the domain.
    const std::size_t d = target_support.size();
    Matrix block(d, d);
    for (std::size_t k = 0; k < d; ++k) {
      if (overlap.contains(target_support[k])) {
        const ProbVector row = sample_uniform_simplex(d, rng);
        for (std::size_t j = 0; j < d; ++j) block.at(k, j) = row[j];
      } else {
        block.at(k, k) = 1.0;
      }
    }
    const AffinityMatrix M =
        AffinityMatrix::dense(std::move(block), target_support, overlap, 1.0);
    const ProbVector p_prime = apply_exact(M, q0);
    const std::vector<double> mp = apply_transpose(M, p.span());
    const double eps = l1_distance(mp, p.span());
    const double res =
        l1_distance(p_prime, p) - (l1_distance(q0, p) + eps);
    rep.max_residual = std::max(rep.max_residual, res);
    if (res > rep.bound) ++rep.violations;
  }
  rep.pass = rep.violations == 0;
  return rep;
}

VerificationReport verify_softmax_stability(std::uint64_t trials, std::size_t m,
                                            double epsilon, const RandomSource& base) {
  if (trials < 1) throw std::invalid_argument("verify_softmax_stability: trials >= 1");
  if (m < 2) throw std::invalid_argument("verify_softmax_stability: m >= 2");
  if (!(epsilon > 0.0)) {
    throw std::invalid_argument("verify_softmax_stability: epsilon must be positive");
  }
  VerificationReport rep;
  rep.suite = "softmax_stability";
  rep.trials = trials;
  rep.bound = 0.5 * epsilon + kIdentityTol;
  rep.seed = base.seed();
  std::vector<double> eta(m);
  LogitVector shifted(m);
  for (std::uint64_t t = 0; t < trials; ++t) {
    RandomSource rng = base.split(t);
    const LogitVector z = sample_student_t_logits(m, 5.0, 0.0, 1.0, rng);
    const std::size_t peak =
        static_cast<std::size_t>(std::max_element(z.begin(), z.end()) - z.begin());
    std::fill(eta.begin(), eta.end(), 0.0);
    if (t % 7 == 3) {
      // One-hot probe at the dominant logit, the direction that moves the
      // softmax the most.
      eta[peak] = epsilon;
    } else if (t % 7 == 5) {
      eta[peak] = -epsilon;
    } else {
      for (std::size_t i = 0; i < m; ++i) eta[i] = 2.0 * rng.next_double() - 1.0;
      const double norm = l1_norm(eta);
      if (norm == 0.0) {
        eta[0] = epsilon;
      } else {
        for (double& v : eta) v *= epsilon / norm;
      }
    }
    for (std::size_t i = 0; i < m; ++i) shifted[i] = z[i] + eta[i];
    const double dist = l1_distance(softmax(shifted), softmax(z));
    rep.max_residual = std::max(rep.max_residual, dist);
    if (dist > rep.bound) ++rep.violations;
  }
  rep.pass = rep.violations == 0;
  return rep;
}

VerificationReport verify_rdk_vs_tli_2d(std::uint64_t trials, const RandomSource& base,
                                        std::optional<Rdk2dParams> fixed) {
  if (trials < 10000) {
    throw std::invalid_argument("verify_rdk_vs_tli_2d: trials >= 10000");
  }
  if (fixed) {
    if (!(fixed->a >= 0.5 && fixed->a <= 1.0)) {
      throw std::invalid_argument("verify_rdk_vs_tli_2d: a must lie in [0.5, 1]");
    }
    if (!(fixed->mu_gap >= 6.0 * std::sqrt(fixed->a))) {
      throw std::invalid_argument(
          "verify_rdk_vs_tli_2d: mean separation below 6 sqrt(a) is infeasible");
    }
  }
  VerificationReport rep;
  rep.suite = "rdk_vs_tli_2d";
  rep.trials = trials;
  rep.seed = base.seed();
  const double rate = 0.0054;
  rep.bound = rate + 3.0 * std::sqrt(rate * (1.0 - rate) / static_cast<double>(trials));
  for (std::uint64_t t = 0; t < trials; ++t) {
    RandomSource rng = base.split(t);
    const double a = fixed ? fixed->a : 0.5 + 0.5 * rng.next_double();
    const double gap = fixed ? fixed->mu_gap : 6.0 * std::sqrt(a);
    Matrix cov(2, 2);
    cov.at(0, 0) = a;
    cov.at(0, 1) = 1.0 - a;
    cov.at(1, 0) = 1.0 - a;
    cov.at(1, 1) = a;
    const Matrix chol = cholesky_semidefinite(cov);
    const double g0 = rng.next_gaussian();
    const double g1 = rng.next_gaussian();
    LogitVector z(2);
    z[0] = chol.at(0, 0) * g0;
    z[1] = gap + chol.at(1, 0) * g0 + chol.at(1, 1) * g1;
    const ProbVector p = softmax(z);
    // The drafter after renormalization is a point mass on token 0, so the
    // renormalized route scores p[0] while the affinity route scores the
    // overlap with the map's first row (a, 1 - a).
    const double alpha_tli = p[0];
    const double alpha_rdk = std::min(p[0], a) + std::min(p[1], 1.0 - a);
    if (alpha_tli > alpha_rdk + kIdentityTol) ++rep.violations;
  }
  rep.max_residual =
      static_cast<double>(rep.violations) / static_cast<double>(trials);
  rep.pass = rep.max_residual <= rep.bound;
  return rep;
}

TaylorVerification verify_taylor_error(const std::vector<double>& theta_grid,
                                       const std::vector<std::size_t>& n_grid,
                                       std::size_t seeds, const RandomSource& base) {
  if (theta_grid.empty() || n_grid.empty()) {
    throw std::invalid_argument("verify_taylor_error: grids must be non-empty");
  }
  for (double th : theta_grid) {
    if (!(th >= 0.0 && th < 1.0)) {
      throw std::invalid_argument("verify_taylor_error: theta must lie in [0, 1)");
    }
  }
  for (std::size_t n : n_grid) {
    if (n < 2 || n > 4096) {
      throw std::invalid_argument(
          "verify_taylor_error: N must lie in [2, 4096] so the dense oracle fits");
    }
  }
  if (seeds < 1) throw std::invalid_argument("verify_taylor_error: seeds >= 1");

  TaylorVerification out;
  out.report.suite = "taylor_error";
  out.report.seed = base.seed();
  out.report.trials =
      static_cast<std::uint64_t>(theta_grid.size()) * n_grid.size() * seeds;
  out.report.bound = 1.1;

  const double tau = 1.0;
  for (std::size_t ti = 0; ti < theta_grid.size(); ++ti) {
    const double theta = theta_grid[ti];
    for (std::size_t ni = 0; ni < n_grid.size(); ++ni) {
      const std::size_t n = n_grid[ni];
      const SupportSet domain = SupportSet::full(n);
      double total_err = 0.0;
      for (std::size_t s = 0; s < seeds; ++s) {
        RandomSource rng = base.split(ti).split(ni).split(s);
        const ProbVector p = softmax(sample_student_t_logits(n, 5.0, 0.0, 2.0, rng));

        // Tilt the uniform by theta/N per coordinate, taking the deficit on
        // the target's heaviest half so the gap to the oracle carries a
        // deterministic 1/N component.
        std::vector<std::size_t> order(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
          return p[a] > p[b];
        });
        const std::size_t half = n / 2;
        std::vector<double> tilted(n, 1.0 / static_cast<double>(n));
        for (std::size_t k = 0; k < half; ++k) {
          tilted[order[k]] -= theta / static_cast<double>(n);
          tilted[order[n - 1 - k]] += theta / static_cast<double>(n);
        }
        const ProbVector q_prime = ProbVector::full(std::move(tilted));

        CovarianceEstimate cov;
        cov.sample_count = 2;
        cov.omega = Matrix(n, n);
        for (std::size_t i = 0; i < n; ++i) {
          for (std::size_t j = 0; j < n; ++j) cov.omega.at(i, j) = theta * tau * p[j];
        }
        const AffinityMatrix oracle = build_affinity(cov, tau, domain, domain);
        const ProbVector exact = apply_exact(oracle, q_prime);
        const ProbVector approx = taylor_redistribute(p, q_prime, domain);
        total_err += l1_distance(exact, approx);
      }
      TaylorErrorCell cell;
      cell.theta = theta;
      cell.n = n;
      cell.mean_error = total_err / static_cast<double>(seeds);
      out.cells.push_back(cell);
    }
  }

  // Least-squares fit of error = c1 * theta + c2 / N^2, clamped to the
  // non-negative quadrant one coordinate at a time.
  double a11 = 0.0, a12 = 0.0, a22 = 0.0, b1 = 0.0, b2 = 0.0;
  for (const TaylorErrorCell& c : out.cells) {
    const double x = 1.0 / (static_cast<double>(c.n) * static_cast<double>(c.n));
    a11 += c.theta * c.theta;
    a12 += c.theta * x;
    a22 += x * x;
    b1 += c.theta * c.mean_error;
    b2 += x * c.mean_error;
  }
  const double det = a11 * a22 - a12 * a12;
  double c1 = 0.0, c2 = 0.0;
  if (std::fabs(det) > 1e-300) {
    c1 = (b1 * a22 - b2 * a12) / det;
    c2 = (a11 * b2 - a12 * b1) / det;
  }
  if (c2 < 0.0) {
    c2 = 0.0;
    c1 = a11 > 0.0 ? b1 / a11 : 0.0;
  }
  if (c1 < 0.0) {
    c1 = 0.0;
    c2 = a22 > 0.0 ? b2 / a22 : 0.0;
    c2 = std::max(0.0, c2);
  }
  out.c1 = c1;
  out.c2 = c2;

  for (TaylorErrorCell& c : out.cells) {
    const double x = 1.0 / (static_cast<double>(c.n) * static_cast<double>(c.n));
    c.fitted_bound = c1 * c.theta + c2 * x;
    double ratio;
    if (c.fitted_bound > 0.0) {
      ratio = c.mean_error / c.fitted_bound;
    } else {
      ratio = c.mean_error == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    }
    out.report.max_residual = std::max(out.report.max_residual, ratio);
    if (ratio > out.report.bound) ++out.report.violations;
  }

  // Seed-averaged error must not grow with N at fixed theta.
  std::vector<std::size_t> sorted_n = n_grid;
  std::sort(sorted_n.begin(), sorted_n.end());
  for (double theta : theta_grid) {
    double prev = std::numeric_limits<double>::infinity();
    for (std::size_t n : sorted_n) {
      for (const TaylorErrorCell& c : out.cells) {
        if (c.theta == theta && c.n == n) {
          if (c.mean_error > prev) ++out.report.violations;
          prev = c.mean_error;
        }
      }
    }
  }

  out.report.pass = out.report.violations == 0;
  return out;
}

}  // namespace rdk
