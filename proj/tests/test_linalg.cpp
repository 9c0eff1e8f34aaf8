#include <doctest.h>

#include <cmath>
#include <random>

#include "etcons/errors.hpp"
#include "etcons/linalg.hpp"
#include "oracles.hpp"

using namespace etcons;

TEST_CASE("2x2 symmetric eigenvalues match the closed form") {
  const Matrix P{{5, 2}, {2, 1}};
  const Vector ev = symmetric_eigenvalues(P);
  REQUIRE(ev.size() == 2);
  CHECK(ev[0] == doctest::Approx(3 - 2 * std::sqrt(2.0)).epsilon(1e-14));
  CHECK(ev[1] == doctest::Approx(3 + 2 * std::sqrt(2.0)).epsilon(1e-14));
  CHECK(lambda_min(P) == ev[0]);
  CHECK(lambda_max(P) == ev[1]);
}

TEST_CASE("diagonal input is returned sorted") {
  Matrix d(3, 3);
  d(0, 0) = 4;
  d(1, 1) = -1;
  d(2, 2) = 2;
  CHECK(symmetric_eigenvalues(d) == Vector{-1, 2, 4});
}

TEST_CASE("random symmetric matrices agree with the characteristic polynomial") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 2 + trial % 5;
    const Matrix a = oracle::random_symmetric(rng, n, 2.0);
    const Vector ev = symmetric_eigenvalues(a);
    const auto roots = oracle::eigenvalues(a, 40000);
    // Random matrices have simple spectra almost surely, so every root is found.
    REQUIRE(roots.size() == n);
    for (std::size_t k = 0; k < n; ++k) CHECK(ev[k] == doctest::Approx(roots[k]).epsilon(1e-9));
  }
}

TEST_CASE("eigenvalues are reproducible bit for bit") {
  std::mt19937_64 rng(11);
  const Matrix a = oracle::random_symmetric(rng, 6);
  CHECK(symmetric_eigenvalues(a) == symmetric_eigenvalues(a));
}

TEST_CASE("non-symmetric or non-finite input is rejected") {
  CHECK_THROWS_AS(symmetric_eigenvalues(Matrix{{1, 2}, {3, 4}}), NumericsError);
  CHECK_THROWS_AS(symmetric_eigenvalues(Matrix{{NAN, 0}, {0, 1}}), NumericsError);
  CHECK_THROWS_AS(symmetric_eigenvalues(Matrix(2, 3)), NumericsError);
}

TEST_CASE("spectral norm") {
  // B = (0, -1)^T has norm 1; [[1, 2], [0, 0]] has norm sqrt(5).
  CHECK(spectral_norm(Matrix{{0}, {-1}}) == doctest::Approx(1.0));
  CHECK(spectral_norm(Matrix{{1, 2}, {0, 0}}) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-14));
  CHECK(spectral_norm(Matrix(3, 3)) == 0.0);
}

TEST_CASE("vector and matrix helpers") {
  const Matrix A{{1, 2}, {3, 4}};
  const Vector x{1, -1};
  CHECK(A * std::span<const double>(x) == Vector{-1, -1});
  CHECK(bilinear(x, A, Vector{0, 1}) == doctest::Approx(-2.0));
  CHECK(quadratic_form(x, Matrix{{5, 2}, {2, 1}}) == doctest::Approx(2.0));
  CHECK((A * A.transpose())(0, 1) == 11.0);
  CHECK(A.block(1, 0, 1, 2) == Matrix{{3, 4}});
  CHECK(is_symmetric(Matrix{{1, 2}, {2, 1}}));
  CHECK_FALSE(is_symmetric(A));
  CHECK(norm2(Vector{3, 4}) == 5.0);
}
