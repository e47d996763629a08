#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "rdk/numeric.hpp"

using namespace rdk;

TEST_CASE("neumaier_sum keeps cancelled mass that naive addition drops") {
  const std::vector<double> xs{1e16, 1.0, -1e16};
  CHECK(neumaier_sum(xs) == 1.0);

  double naive = 0.0;
  for (double x : xs) naive += x;
  CHECK(naive == 0.0);

  CHECK(neumaier_sum(std::vector<double>{}) == 0.0);

  const std::vector<double> tenths(10, 0.1);
  CHECK(std::fabs(neumaier_sum(tenths) - 1.0) < 1e-15);
}

TEST_CASE("matrix identity and element access") {
  const Matrix id = Matrix::identity(3);
  CHECK(id.rows == 3);
  CHECK(id.cols == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      CHECK(id.at(i, j) == (i == j ? 1.0 : 0.0));
    }
  }
}

TEST_CASE("cholesky factors a positive definite matrix") {
  Matrix m(2, 2);
  m.at(0, 0) = 4.0;
  m.at(0, 1) = 2.0;
  m.at(1, 0) = 2.0;
  m.at(1, 1) = 5.0;
  const Matrix l = cholesky_semidefinite(m);
  // Hand factorization: [[2,0],[1,2]].
  CHECK(l.at(0, 0) == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(l.at(0, 1) == 0.0);
  CHECK(l.at(1, 0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(l.at(1, 1) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("cholesky tolerates a singular PSD matrix") {
  Matrix m(2, 2);
  m.at(0, 0) = 1.0;
  m.at(0, 1) = 1.0;
  m.at(1, 0) = 1.0;
  m.at(1, 1) = 1.0;
  const Matrix l = cholesky_semidefinite(m);
  // L L^T must reproduce the input even though the pivot hits zero.
  for (std::size_t i = 0; i < 2; ++i) {
    for (std::size_t j = 0; j < 2; ++j) {
      double dot = 0.0;
      for (std::size_t k = 0; k < 2; ++k) dot += l.at(i, k) * l.at(j, k);
      CHECK(dot == doctest::Approx(m.at(i, j)).epsilon(1e-12));
    }
  }
}

TEST_CASE("cholesky rejects an indefinite matrix") {
  Matrix m(2, 2);
  m.at(0, 0) = 1.0;
  m.at(0, 1) = 2.0;
  m.at(1, 0) = 2.0;
  m.at(1, 1) = 1.0;
  CHECK_THROWS_AS(cholesky_semidefinite(m), std::domain_error);
}

TEST_CASE("incomplete beta matches closed forms") {
  // I_x(2,3) = x^2 (6 - 8x + 3x^2).
  CHECK(incomplete_beta(2.0, 3.0, 0.4) == doctest::Approx(0.5248).epsilon(1e-12));
  // I_x(1/2,1/2) = (2/pi) asin(sqrt(x)).
  CHECK(incomplete_beta(0.5, 0.5, 0.3) ==
        doctest::Approx(0.36901011956554536).epsilon(1e-12));
  CHECK(incomplete_beta(1.0, 1.0, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(incomplete_beta(2.0, 3.0, 0.0) == 0.0);
  CHECK(incomplete_beta(2.0, 3.0, 1.0) == 1.0);
}

TEST_CASE("normal pdf, cdf, and quantile agree with reference values") {
  CHECK(normal_pdf(0.0) == doctest::Approx(0.3989422804014327).epsilon(1e-14));
  CHECK(normal_cdf(0.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(normal_cdf(1.0) == doctest::Approx(0.8413447460685429).epsilon(1e-12));
  CHECK(normal_quantile(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-9));
  CHECK(normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-12));

  // Round trip across the body of the distribution.
  for (double p = 0.01; p < 1.0; p += 0.07) {
    CHECK(normal_cdf(normal_quantile(p)) == doctest::Approx(p).epsilon(1e-10));
  }
}

TEST_CASE("student t pdf, cdf, and quantile agree with reference values") {
  CHECK(student_t_pdf(0.0, 5.0) == doctest::Approx(0.3796066898224944).epsilon(1e-12));
  CHECK(student_t_pdf(1.3, 5.0) == doctest::Approx(0.15847673572898244).epsilon(1e-12));
  CHECK(student_t_log_pdf(1.3, 5.0) ==
        doctest::Approx(std::log(0.15847673572898244)).epsilon(1e-12));
  CHECK(student_t_cdf(0.0, 5.0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(student_t_cdf(1.0, 5.0) == doctest::Approx(0.8183912661754387).epsilon(1e-12));
  CHECK(student_t_quantile(0.95, 5.0) ==
        doctest::Approx(2.0150483733330233).epsilon(1e-8));
  CHECK(student_t_quantile(0.975, 5.0) ==
        doctest::Approx(2.570581835636314).epsilon(1e-8));

  // Symmetry: F(-x) = 1 - F(x).
  for (double x = 0.25; x < 4.0; x += 0.5) {
    CHECK(student_t_cdf(-x, 5.0) ==
          doctest::Approx(1.0 - student_t_cdf(x, 5.0)).epsilon(1e-12));
  }
  // Quantile inverts the cdf.
  for (double p = 0.05; p < 1.0; p += 0.1) {
    CHECK(student_t_cdf(student_t_quantile(p, 5.0), 5.0) ==
          doctest::Approx(p).epsilon(1e-9));
  }
}
