#include <cmath>
#include <cstring>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "rdk/prng.hpp"
#include "rdk/prob.hpp"
#include "rdk/sampling.hpp"

using namespace rdk;

TEST_CASE("support sets sort, validate, and intersect") {
  const SupportSet s = SupportSet::from_unsorted({5, 1, 3});
  CHECK(s.indices() == std::vector<std::uint32_t>{1, 3, 5});
  CHECK(s.contains(3));
  CHECK(!s.contains(2));
  CHECK(s.size() == 3);

  CHECK_THROWS_AS(SupportSet::from_unsorted({2, 2}), std::invalid_argument);
  CHECK_THROWS_AS(SupportSet::from_sorted({3, 1}), std::invalid_argument);

  const SupportSet t = SupportSet::from_sorted({1, 2, 5});
  CHECK(s.intersect(t).indices() == std::vector<std::uint32_t>{1, 5});
  CHECK(s.minus(t).indices() == std::vector<std::uint32_t>{3});
  CHECK(SupportSet::from_sorted({1, 5}).is_subset_of(s));
  CHECK(!t.is_subset_of(s));

  const SupportSet f = SupportSet::full(4);
  CHECK(f.indices() == std::vector<std::uint32_t>{0, 1, 2, 3});
}

TEST_CASE("ProbVector validates mass and tracks support") {
  const ProbVector p = ProbVector::full({0.5, 0.0, 0.5});
  CHECK(p.mass() == doctest::Approx(1.0));
  CHECK(!p.is_sub_probability());
  CHECK(p.support().indices() == std::vector<std::uint32_t>{0, 2});

  CHECK_THROWS_AS(ProbVector::full({0.5, 0.4}), std::invalid_argument);
  CHECK_THROWS_AS(ProbVector::full({0.5, -0.5, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(ProbVector::full(std::vector<double>{}), std::invalid_argument);
  CHECK_THROWS_AS(ProbVector::sub_probability({0.8, 0.8}), std::invalid_argument);

  // Just inside the tolerance band still counts as a full distribution.
  const ProbVector q = ProbVector::full({0.5, 0.5 + 5e-10});
  CHECK(!q.is_sub_probability());

  const ProbVector sub = ProbVector::sub_probability({0.2, 0.3});
  CHECK(sub.is_sub_probability());
  CHECK(sub.mass() == doctest::Approx(0.5));

  // No missing mass promotes a "sub" vector back to a full one.
  const ProbVector promoted = ProbVector::sub_probability({0.4, 0.6});
  CHECK(!promoted.is_sub_probability());
}

TEST_CASE("softmax matches hand-computed values") {
  const ProbVector p = softmax({1.0, 2.0, 3.0});
  CHECK(p[0] == doctest::Approx(0.09003057317038046).epsilon(1e-14));
  CHECK(p[1] == doctest::Approx(0.24472847105479764).epsilon(1e-14));
  CHECK(p[2] == doctest::Approx(0.6652409557748219).epsilon(1e-14));
  CHECK_THROWS_AS(softmax({}), std::invalid_argument);
  CHECK_THROWS_AS(softmax({1.0, std::nan("")}), std::invalid_argument);
}

TEST_CASE("softmax is bitwise shift invariant for dyadic shifts") {
  // Logits on a 1/256 grid shifted by an exact power of two: the max-shift
  // inside softmax then cancels to identical bit patterns.
  LogitVector z;
  for (int i = 0; i < 40; ++i) z.push_back(static_cast<double>(i * 7 % 23) / 256.0);
  LogitVector shifted = z;
  for (double& v : shifted) v += 512.0;
  const ProbVector a = softmax(z);
  const ProbVector b = softmax(shifted);
  CHECK(std::memcmp(a.values().data(), b.values().data(), z.size() * sizeof(double)) == 0);
}

TEST_CASE("softmax stays normalized at vocabulary scale") {
  RandomSource rng(6);
  const LogitVector z = sample_student_t_logits(200000, 5.0, 0.0, 0.7, rng);
  const ProbVector p = softmax(z);
  double sum = 0.0;
  for (double v : p.values()) sum += v;
  CHECK(std::fabs(sum - 1.0) < 1e-12);
  for (double v : p.values()) CHECK(v > 0.0);
}

TEST_CASE("restrict_to keeps values bit-identical and flags missing mass") {
  const ProbVector p = ProbVector::full({0.5, 0.3, 0.2});
  const ProbVector masked = restrict_to(p, SupportSet::from_sorted({0, 2}));
  CHECK(masked[0] == 0.5);
  CHECK(masked[1] == 0.0);
  CHECK(masked[2] == 0.2);
  CHECK(masked.is_sub_probability());
  CHECK(masked.mass() == doctest::Approx(0.7));

  // Covering the whole support prunes nothing.
  const ProbVector intact = restrict_to(p, SupportSet::full(3));
  CHECK(!intact.is_sub_probability());

  CHECK_THROWS_AS(restrict_to(p, SupportSet::from_sorted({5})), std::invalid_argument);
}

TEST_CASE("renormalize equals exact conditioning on every subset") {
  RandomSource rng(17);
  const std::size_t m = 6;
  const ProbVector p = sample_uniform_simplex(m, rng);
  for (unsigned mask = 1; mask < (1u << m); ++mask) {
    std::vector<std::uint32_t> idx;
    for (std::uint32_t i = 0; i < m; ++i) {
      if (mask & (1u << i)) idx.push_back(i);
    }
    const SupportSet s = SupportSet::from_sorted(std::move(idx));
    const ProbVector cond = renormalize(restrict_to(p, s));
    double kept = 0.0;
    for (std::uint32_t i : s) kept += p[i];
    for (std::uint32_t i = 0; i < m; ++i) {
      const double expect = s.contains(i) ? p[i] / kept : 0.0;
      CHECK(cond[i] == doctest::Approx(expect).epsilon(1e-12));
    }
  }

  const ProbVector zero = ProbVector::sub_probability({0.0, 0.0});
  CHECK_THROWS_AS(renormalize(zero), std::domain_error);
}

TEST_CASE("draw_token tracks the distribution it samples") {
  const ProbVector p = ProbVector::full({0.6, 0.4});
  RandomSource rng(101);
  const int n = 100000;
  int zeros = 0;
  for (int i = 0; i < n; ++i) zeros += draw_token(p, rng) == 0;
  // 4 sigma of a Bernoulli(0.6) frequency at n = 1e5 is about 0.0062.
  CHECK(std::fabs(static_cast<double>(zeros) / n - 0.6) < 0.0062);

  const ProbVector sub = ProbVector::sub_probability({0.2, 0.3});
  CHECK_THROWS_AS(draw_token(sub, rng), std::invalid_argument);
}

TEST_CASE("draw_token never returns an index outside the support") {
  const ProbVector p = ProbVector::full({0.0, 0.7, 0.0, 0.3});
  RandomSource rng(55);
  for (int i = 0; i < 2000; ++i) {
    const std::uint32_t t = draw_token(p, rng);
    CHECK((t == 1 || t == 3));
  }
}
