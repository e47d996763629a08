#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "rdk/metrics.hpp"
#include "rdk/prng.hpp"
#include "rdk/sampling.hpp"

using namespace rdk;

TEST_CASE("acceptance rate is the overlap mass") {
  const ProbVector p = ProbVector::full({0.5, 0.3, 0.2});
  const ProbVector q = ProbVector::full({0.3, 0.5, 0.2});
  CHECK(acceptance_rate(p, q) == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(acceptance_rate(p, p) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("a sub-probability drafter is scored by what it covers") {
  const ProbVector p = ProbVector::full({0.5, 0.3, 0.2});
  const ProbVector masked = ProbVector::sub_probability({0.3, 0.2, 0.0});
  CHECK(acceptance_rate(p, masked) == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("drafter kernel holds exactly the drafter's excess mass") {
  const ProbVector p = ProbVector::full({0.5, 0.3, 0.2});
  const ProbVector q = ProbVector::full({0.3, 0.5, 0.2});
  const KernelVector k = drafter_kernel(p, q);
  CHECK(k[0] == 0.0);
  CHECK(k[1] == doctest::Approx(0.2).epsilon(1e-15));
  CHECK(k[2] == 0.0);
  CHECK(l1_norm(k) == doctest::Approx(1.0 - acceptance_rate(p, q)).epsilon(1e-15));
}

TEST_CASE("the three acceptance identities agree on random pairs") {
  RandomSource rng(7);
  for (int t = 0; t < 200; ++t) {
    const ProbVector p = sample_uniform_simplex(16, rng);
    const ProbVector q = sample_uniform_simplex(16, rng);
    const double alpha = acceptance_rate(p, q);
    const double via_kernel = 1.0 - l1_norm(drafter_kernel(p, q));
    const double via_l1 = 1.0 - 0.5 * l1_distance(p, q);
    CHECK(std::fabs(alpha - via_kernel) < 1e-12);
    CHECK(std::fabs(alpha - via_l1) < 1e-12);
  }
}

TEST_CASE("l1 helpers agree across overloads") {
  const ProbVector a = ProbVector::full({0.5, 0.5});
  const ProbVector b = ProbVector::full({0.25, 0.75});
  CHECK(l1_distance(a, b) == doctest::Approx(0.5).epsilon(1e-15));
  CHECK(l1_distance(a.span(), b.span()) == doctest::Approx(0.5).epsilon(1e-15));
  const std::vector<double> v{1.0, -2.0, 0.5};
  CHECK(l1_norm(v) == doctest::Approx(3.5).epsilon(1e-15));
}

TEST_CASE("metric inputs are validated") {
  const ProbVector p = ProbVector::full({0.5, 0.5});
  const ProbVector q3 = ProbVector::full({0.5, 0.3, 0.2});
  const ProbVector sub = ProbVector::sub_probability({0.4, 0.1});
  CHECK_THROWS_AS(acceptance_rate(p, q3), std::invalid_argument);
  CHECK_THROWS_AS(acceptance_rate(sub, p), std::invalid_argument);
  CHECK_THROWS_AS(drafter_kernel(p, sub), std::invalid_argument);
  CHECK_THROWS_AS(l1_distance(p, q3), std::invalid_argument);
}
