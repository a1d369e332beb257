#include <doctest.h>

#include <cmath>
#include <limits>

#include "gaas/error.hpp"
#include "gaas/matrix.hpp"

using gaas::Matrix;

TEST_CASE("construction rejects non-finite entries and bad sizes") {
  CHECK_THROWS_AS(Matrix(1, 1, std::numeric_limits<double>::quiet_NaN()), gaas::Error);
  CHECK_THROWS_AS(Matrix(2, 2, std::vector<double>{1, 2, 3}), gaas::Error);
  CHECK_THROWS_AS((Matrix{{1, 2}, {3}}), gaas::Error);
  try {
    Matrix(1, 1, std::numeric_limits<double>::infinity());
  } catch (const gaas::Error& e) {
    CHECK(e.code() == gaas::ErrorCode::NonFinite);
  }
}

TEST_CASE("products, transpose and stacking") {
  const Matrix a{{1, 2}, {3, 4}};
  const Matrix b{{0, 1}, {1, 0}};
  CHECK((a * b) == Matrix{{2, 1}, {4, 3}});
  CHECK(a.transpose() == Matrix{{1, 3}, {2, 4}});
  CHECK(hstack(a, b).cols() == 4);
  CHECK(vstack(a, b).rows() == 4);
  CHECK(vstack(a, b)(2, 1) == 1.0);
  const gaas::Vector v = a * gaas::Vector{1, 1};
  CHECK(v == gaas::Vector{3, 7});
  CHECK_THROWS_AS(a * Matrix(3, 1), gaas::Error);
}

TEST_CASE("vec is column-major and unvec inverts it") {
  const Matrix a{{1, 2, 3}, {4, 5, 6}};
  CHECK(a.vec() == gaas::Vector{1, 4, 2, 5, 3, 6});
  CHECK(Matrix::unvec(a.vec(), 2, 3) == a);
}

TEST_CASE("kron satisfies vec(A X B) = (B^T kron A) vec(X)") {
  const Matrix A{{1, 2}, {0, -1}, {3, 1}};
  const Matrix X{{1, -2}, {0.5, 4}};
  const Matrix B{{2, 0, 1}, {-1, 1, 0}};
  const gaas::Vector lhs = (A * X * B).vec();
  const gaas::Vector rhs = kron(B.transpose(), A) * X.vec();
  REQUIRE(lhs.size() == rhs.size());
  for (std::size_t i = 0; i < lhs.size(); ++i) CHECK(lhs[i] == doctest::Approx(rhs[i]).epsilon(1e-14));
}

TEST_CASE("blocks and norms") {
  Matrix a(3, 3);
  a.set_block(1, 1, Matrix{{1, 2}, {3, 4}});
  CHECK(a.block(1, 1, 2, 2) == Matrix{{1, 2}, {3, 4}});
  CHECK(a.frobenius_norm() == doctest::Approx(std::sqrt(30.0)));
  CHECK(a.max_abs() == 4.0);
  CHECK(gaas::norm2(gaas::Vector{3, 4}) == doctest::Approx(5.0));
  CHECK(gaas::norm2(gaas::Vector{3e200, 4e200}) == doctest::Approx(5e200));
  CHECK(gaas::norm2(gaas::Vector{}) == 0.0);
}
