#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "rdk/affinity.hpp"
#include "rdk/metrics.hpp"
#include "rdk/prng.hpp"
#include "rdk/samplers.hpp"
#include "rdk/sampling.hpp"

using namespace rdk;

TEST_CASE("scheme names round-trip") {
  CHECK(to_string(SchemeId::MaskedOnly) == "masked_only");
  CHECK(to_string(SchemeId::TLI) == "tli");
  CHECK(to_string(SchemeId::RdkExact) == "rdk_exact");
  CHECK(to_string(SchemeId::RdkTaylor) == "rdk_taylor");
  CHECK(scheme_from_string("rdk_taylor") == SchemeId::RdkTaylor);
  CHECK_THROWS_AS(scheme_from_string("nope"), std::invalid_argument);
}

TEST_CASE("fr_prune keeps the most frequent tokens with index tie-break") {
  // Counts 5, 7, 5: rank order is 1, 0, 2, so keep=2 retains {0, 1}.
  const TokenFrequencyTable freq = TokenFrequencyTable::from_counts({5, 7, 5});
  const PrunedDrafter pruned = fr_prune(freq, 2);
  CHECK(pruned.original_size == 3);
  CHECK(pruned.retained.indices() == std::vector<std::uint32_t>{0, 1});
  CHECK(fr_prune(freq, 1).retained.indices() == std::vector<std::uint32_t>{1});
  CHECK_THROWS_AS(fr_prune(freq, 0), std::invalid_argument);
  CHECK_THROWS_AS(fr_prune(freq, 4), std::invalid_argument);
}

TEST_CASE("tli renormalizes over the vocabulary intersection") {
  const ProbVector q = ProbVector::full({0.5, 0.3, 0.2});
  const ProbVector out = tli_redistribute(q, SupportSet::from_sorted({0, 1}));
  CHECK(out[0] == doctest::Approx(0.625).epsilon(1e-15));
  CHECK(out[1] == doctest::Approx(0.375).epsilon(1e-15));
  CHECK(out[2] == 0.0);
  CHECK(!out.is_sub_probability());
}

TEST_CASE("tli accepts sub-probability drafters") {
  const ProbVector masked = ProbVector::sub_probability({0.5, 0.0, 0.2});
  const ProbVector out = tli_redistribute(masked, SupportSet::full(3));
  CHECK(out[0] == doctest::Approx(0.5 / 0.7).epsilon(1e-14));
  CHECK(out[2] == doctest::Approx(0.2 / 0.7).epsilon(1e-14));
}

TEST_CASE("tli fails loudly when nothing overlaps") {
  const ProbVector q = ProbVector::full({0.5, 0.5, 0.0});
  CHECK_THROWS_AS(tli_redistribute(q, SupportSet::from_sorted({2})), std::domain_error);
  CHECK_THROWS_AS(tli_redistribute(q, SupportSet::from_sorted({7})), std::invalid_argument);
}

TEST_CASE("rdk pushes renormalized mass through the affinity transpose") {
  // T = {0, 1}; tli of (0.5, 0.3, 0.2) is (0.625, 0.375); M^T then mixes it
  // to (0.65, 0.35).
  Matrix block(2, 2);
  block.at(0, 0) = 0.8;
  block.at(0, 1) = 0.2;
  block.at(1, 0) = 0.4;
  block.at(1, 1) = 0.6;
  const SupportSet T = SupportSet::from_sorted({0, 1});
  const AffinityMatrix m = AffinityMatrix::dense(block, T, T, 1.0);
  const ProbVector q = ProbVector::full({0.5, 0.3, 0.2});
  const ProbVector out = rdk_redistribute(q, T, m);
  CHECK(out[0] == doctest::Approx(0.65).epsilon(1e-14));
  CHECK(out[1] == doctest::Approx(0.35).epsilon(1e-14));
  CHECK(out[2] == 0.0);
}

TEST_CASE("identity affinity reduces rdk to tli bitwise") {
  RandomSource rng(71);
  for (int t = 0; t < 20; ++t) {
    const std::size_t m = 2 + static_cast<std::size_t>(rng.next_u64() % 15);
    const ProbVector q = sample_uniform_simplex(m, rng);
    // Random target support that always intersects supp(q) = everything.
    std::vector<std::uint32_t> idx;
    for (std::uint32_t i = 0; i < m; ++i) {
      if (rng.next_double() < 0.5) idx.push_back(i);
    }
    if (idx.empty()) idx.push_back(0);
    const SupportSet T = SupportSet::from_sorted(std::move(idx));
    const AffinityMatrix eye =
        AffinityMatrix::dense(Matrix::identity(T.size()), T, T, 1.0);
    const ProbVector via_tli = tli_redistribute(q, T);
    const ProbVector via_rdk = rdk_redistribute(q, T, eye);
    CHECK(via_rdk.values() == via_tli.values());
  }
}

TEST_CASE("taylor scheme matches the surrogate applied to the tli output") {
  RandomSource rng(72);
  const std::size_t m = 24;
  const ProbVector q = sample_uniform_simplex(m, rng);
  const ProbVector p_ref = sample_uniform_simplex(m, rng);
  const SupportSet T = SupportSet::full(m);
  const ProbVector direct = rdk_taylor_redistribute(q, T, p_ref);
  const ProbVector composed = taylor_redistribute(p_ref, tli_redistribute(q, T), T);
  CHECK(direct.values() == composed.values());
}

TEST_CASE("masked_only discards pruned mass without renormalizing") {
  const ProbVector q = ProbVector::full({0.5, 0.3, 0.2});
  const ProbVector out = masked_only(q, SupportSet::from_sorted({0}));
  CHECK(out[0] == 0.5);
  CHECK(out[1] == 0.0);
  CHECK(out.is_sub_probability());
  CHECK(out.mass() == doctest::Approx(0.5));
}
