#include "emm/linalg.hpp"

#include "test_support.hpp"

#include <doctest.h>

using namespace emm;

namespace {

template <class T>
Matrix<T> random_symmetric(std::size_t n) {
  Matrix<T> a(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) a(i, j) = a(j, i) = T(test::uniform(-1, 1));
  return a;
}

// Hankel of a positive measure: graded, nearly singular, the shape the feasibility loop meets.
RealMatrix moment_hankel(std::size_t n) {
  RealMatrix h(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) h(i, j) = Real(1) / Real(static_cast<int>(i + j + 1));
  return h;
}

template <class T>
T residual(const Matrix<T>& a, const SymmetricEigen<T>& e) {
  using std::abs;
  T worst(0);
  const std::size_t n = a.rows();
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t i = 0; i < n; ++i) {
      T av(0);
      for (std::size_t j = 0; j < n; ++j) av += a(i, j) * e.vectors(j, k);
      worst = std::max<T>(worst, abs(av - e.values[k] * e.vectors(i, k)));
    }
  return worst;
}

}  // namespace

TEST_CASE("inversion and determinant") {
  RealMatrix a(3, 3);
  const double v[3][3] = {{2, 1, 0}, {1, 3, 1}, {0, 1, 4}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) a(i, j) = v[i][j];
  const auto inv = invert(a);
  REQUIRE(inv);
  CHECK(test::abs_real(inv->determinant - 18) <= test::working_tolerance(3));
  const RealMatrix id = multiply(a, inv->inverse);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(test::abs_real(id(i, j) - (i == j ? 1 : 0)) <= test::working_tolerance(3));

  RealMatrix singular(2, 2);
  singular(0, 0) = 1;
  singular(0, 1) = 2;
  singular(1, 0) = 2;
  singular(1, 1) = 4;
  CHECK_FALSE(invert(singular).has_value());
  CHECK(norm_one(a) == 5);  // largest column sum
}

TEST_CASE("QL and Jacobi eigen routes agree") {
  for (int trial = 0; trial < 5; ++trial) {
    const RealMatrix a = random_symmetric<Real>(12);
    const auto ql = symmetric_eigen_ql(a);
    const auto jac = symmetric_eigen(a, test::working_tolerance(5));
    REQUIRE(ql.values.size() == 12);
    for (std::size_t k = 0; k < 12; ++k) CHECK(test::abs_real(ql.values[k] - jac.values[k]) <= test::working_tolerance(8));
    for (std::size_t k = 1; k < 12; ++k) CHECK(ql.values[k - 1] <= ql.values[k]);
    CHECK(residual(a, ql) <= test::working_tolerance(8));
    CHECK(residual(a, jac) <= test::working_tolerance(8));
  }
}

TEST_CASE("eigenvectors are orthonormal") {
  const RealMatrix a = random_symmetric<Real>(9);
  const auto e = symmetric_eigen_ql(a);
  for (std::size_t p = 0; p < 9; ++p)
    for (std::size_t q = 0; q < 9; ++q) {
      Real dot = 0;
      for (std::size_t i = 0; i < 9; ++i) dot += e.vectors(i, p) * e.vectors(i, q);
      CHECK(test::abs_real(dot - (p == q ? 1 : 0)) <= test::working_tolerance(8));
    }
}

TEST_CASE("graded positive Hankel keeps its tiny eigenvalue positive") {
  // Hilbert matrix of order 15: lambda_min ~ 1e-21, far above 100-digit rounding.
  const RealMatrix h = moment_hankel(15);
  const auto ql = symmetric_eigen_ql(h);
  const auto jac = symmetric_eigen(h, test::working_tolerance(5));
  CHECK(ql.values.front() > 0);
  CHECK(ql.values.front() < Real("1e-15"));
  CHECK(test::abs_real(ql.values.front() - jac.values.front()) <= test::working_tolerance(10));
}

TEST_CASE("double instantiation cross-check") {
  const Matrix<double> a = random_symmetric<double>(8);
  const auto ql = symmetric_eigen_ql(a);
  const auto jac = symmetric_eigen(a, 1e-15);
  for (std::size_t k = 0; k < 8; ++k) CHECK(ql.values[k] == doctest::Approx(jac.values[k]).epsilon(1e-12));
  CHECK(residual(a, ql) < 1e-12);
}
