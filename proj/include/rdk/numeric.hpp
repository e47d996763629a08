#pragma once

#include <cstddef>
#include <span>
#include <vector>

// Small numeric kernel shared by the probability types and the verification
// suites: compensated summation, a dense row-major matrix with a
// semidefinite-tolerant Cholesky, and the distribution functions needed for
// quantile diagnostics (regularized incomplete beta, Student-t, normal).

namespace rdk {

// Neumaier variant of Kahan summation. Keeps simplex sums accurate to a few
// ulps even at vocabulary sizes in the hundreds of thousands.
double neumaier_sum(std::span<const double> xs);

struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> a;  // row-major, rows*cols entries

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), a(r * c, 0.0) {}

  double& at(std::size_t i, std::size_t j) { return a[i * cols + j]; }
  double at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

  static Matrix identity(std::size_t n);
};

// Lower-triangular Cholesky factor of a symmetric positive semidefinite
// matrix. Pivots within tolerance of zero produce a zero column, so rank
// deficient inputs (including the zero matrix) factor cleanly. A pivot that
// is negative beyond tolerance throws std::domain_error.
Matrix cholesky_semidefinite(const Matrix& m);

// Regularized incomplete beta I_x(a, b), continued fraction evaluation.
double incomplete_beta(double a, double b, double x);

double normal_pdf(double x);
double normal_cdf(double x);
// Inverse standard normal CDF, refined to full double precision.
double normal_quantile(double p);

double student_t_pdf(double x, double df);
double student_t_log_pdf(double x, double df);
double student_t_cdf(double x, double df);
double student_t_quantile(double p, double df);

}  // namespace rdk
