#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "rdk/numeric.hpp"
#include "rdk/prng.hpp"
#include "rdk/sampling.hpp"

using namespace rdk;

TEST_CASE("student t logits with zero scale collapse to loc exactly") {
  RandomSource rng(1);
  const LogitVector z = sample_student_t_logits(16, 5.0, 2.5, 0.0, rng);
  for (double v : z) CHECK(v == 2.5);
}

TEST_CASE("student t logits are centered at loc") {
  RandomSource rng(8);
  const std::size_t n = 1000000;
  LogitVector z = sample_student_t_logits(n, 5.0, 0.0, 1.0, rng);
  std::nth_element(z.begin(), z.begin() + n / 2, z.end());
  CHECK(std::fabs(z[n / 2]) < 0.01);
}

TEST_CASE("student t logits have heavier tails than their variance suggests") {
  RandomSource rng(13);
  const std::size_t n = 1000000;
  const LogitVector z = sample_student_t_logits(n, 5.0, 0.0, 1.0, rng);
  double m2 = 0.0;
  double m4 = 0.0;
  for (double v : z) {
    m2 += v * v;
    m4 += v * v * v * v;
  }
  m2 /= n;
  m4 /= n;
  // df = 5 has kurtosis 9; sample kurtosis converges slowly, but anything
  // above 4 separates it cleanly from a Gaussian's 3.
  CHECK(m4 / (m2 * m2) > 4.0);
}

TEST_CASE("student t logits validate their parameters") {
  RandomSource rng(2);
  CHECK_THROWS_AS(sample_student_t_logits(0, 5.0, 0.0, 1.0, rng), std::invalid_argument);
  CHECK_THROWS_AS(sample_student_t_logits(4, 0.0, 0.0, 1.0, rng), std::invalid_argument);
  CHECK_THROWS_AS(sample_student_t_logits(4, 5.0, 0.0, -1.0, rng), std::invalid_argument);
}

TEST_CASE("diagonal gaussian logits match their mean and variance") {
  RandomSource rng(21);
  const LogitVector mu{1.0, -2.0};
  const std::vector<double> var{4.0, 0.25};
  const int n = 100000;
  double s0 = 0.0, s1 = 0.0, q0 = 0.0, q1 = 0.0;
  for (int i = 0; i < n; ++i) {
    const LogitVector z = sample_gaussian_logits(mu, var, rng);
    s0 += z[0];
    s1 += z[1];
    q0 += (z[0] - 1.0) * (z[0] - 1.0);
    q1 += (z[1] + 2.0) * (z[1] + 2.0);
  }
  CHECK(std::fabs(s0 / n - 1.0) < 0.03);
  CHECK(std::fabs(s1 / n + 2.0) < 0.02);
  CHECK(std::fabs(q0 / n - 4.0) < 0.1);
  CHECK(std::fabs(q1 / n - 0.25) < 0.01);
}

TEST_CASE("dense gaussian logits reproduce the requested correlation") {
  Matrix cov(2, 2);
  cov.at(0, 0) = 1.0;
  cov.at(0, 1) = 0.5;
  cov.at(1, 0) = 0.5;
  cov.at(1, 1) = 1.0;
  const GaussianLogitSampler sampler({0.0, 0.0}, cov);
  RandomSource rng(33);
  const int n = 100000;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (int i = 0; i < n; ++i) {
    const LogitVector z = sampler.draw(rng);
    sxy += z[0] * z[1];
    sxx += z[0] * z[0];
    syy += z[1] * z[1];
  }
  const double corr = sxy / std::sqrt(sxx * syy);
  CHECK(std::fabs(corr - 0.5) < 0.02);
}

TEST_CASE("a zero-variance coordinate is pinned to its mean") {
  RandomSource rng(3);
  const LogitVector z = sample_gaussian_logits({5.0, 0.0}, std::vector<double>{0.0, 1.0}, rng);
  CHECK(z[0] == 5.0);
}

TEST_CASE("uniform simplex draws have Dirichlet(1,...,1) moments") {
  RandomSource rng(91);
  const int n = 100000;
  double mean0 = 0.0, var0 = 0.0, cov01 = 0.0;
  for (int i = 0; i < n; ++i) {
    const ProbVector p = sample_uniform_simplex(3, rng);
    CHECK(std::fabs(p[0] + p[1] + p[2] - 1.0) < 1e-12);
    mean0 += p[0];
    var0 += (p[0] - 1.0 / 3.0) * (p[0] - 1.0 / 3.0);
    cov01 += (p[0] - 1.0 / 3.0) * (p[1] - 1.0 / 3.0);
  }
  // Dirichlet(1,1,1): var = 1/18, cov = -1/36.
  CHECK(std::fabs(mean0 / n - 1.0 / 3.0) < 0.002);
  CHECK(std::fabs(var0 / n - 1.0 / 18.0) < 0.002);
  CHECK(std::fabs(cov01 / n + 1.0 / 36.0) < 0.002);
}

TEST_CASE("dirichlet draws match their mean") {
  RandomSource rng(14);
  const std::vector<double> alpha{2.0, 3.0, 4.0};
  const int n = 50000;
  std::vector<double> mean(3, 0.0);
  for (int i = 0; i < n; ++i) {
    const ProbVector p = sample_dirichlet(alpha, rng);
    for (int j = 0; j < 3; ++j) mean[j] += p[j];
  }
  for (int j = 0; j < 3; ++j) {
    CHECK(std::fabs(mean[j] / n - alpha[j] / 9.0) < 0.003);
  }
  CHECK_THROWS_AS(sample_dirichlet({}, rng), std::invalid_argument);
}
