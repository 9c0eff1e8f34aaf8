#include <doctest.h>

#include <random>

#include "etcons/errors.hpp"
#include "etcons/graph.hpp"
#include "oracles.hpp"

using namespace etcons;

namespace {

Graph fig1() { return Graph::from_edges(5, {{1, 2}, {2, 3}, {2, 5}, {3, 4}}); }

// Connected random graph: a random spanning tree plus extra random edges.
Graph random_connected(std::mt19937_64& rng, std::size_t n) {
  std::vector<Edge> edges;
  std::uniform_real_distribution<double> w(0.1, 3.0);
  for (std::size_t v = 2; v <= n; ++v) {
    std::uniform_int_distribution<std::size_t> parent(1, v - 1);
    edges.push_back({parent(rng), v, w(rng)});
  }
  std::uniform_int_distribution<std::size_t> any(1, n);
  for (std::size_t e = 0; e < n; ++e) {
    const std::size_t a = any(rng), b = any(rng);
    if (a != b) edges.push_back({a, b, w(rng)});
  }
  return Graph::from_edges(n, edges);
}

}  // namespace

TEST_CASE("Laplacian of the five-agent topology") {
  const Laplacian lap = build_laplacian(fig1());
  const double diag[] = {1, 3, 2, 1, 1};
  for (std::size_t i = 0; i < 5; ++i) CHECK(lap.L(i, i) == diag[i]);
  CHECK(lap.L(0, 1) == -1);
  CHECK(lap.L(1, 0) == -1);
  CHECK(lap.L(1, 2) == -1);
  CHECK(lap.L(1, 4) == -1);
  CHECK(lap.L(2, 3) == -1);
  int nonzero_off = 0;
  for (std::size_t i = 0; i < 5; ++i)
    for (std::size_t j = 0; j < 5; ++j)
      if (i != j && lap.L(i, j) != 0) ++nonzero_off;
  CHECK(nonzero_off == 8);
  CHECK(lap.l22 == lap.L.block(1, 1, 4, 4));
  CHECK(lap.M == Vector{2, 12, 6, 2, 2});
  CHECK(lap.epsilon == 1.0 / lap.lambda_max);
}

TEST_CASE("two-agent graph") {
  const Laplacian lap = build_laplacian(Graph::from_edges(2, {{1, 2}}));
  CHECK(lap.L == Matrix{{1, -1}, {-1, 1}});
  CHECK(lap.mu == doctest::Approx(1.0));
  CHECK(lap.lambda_max == doctest::Approx(2.0));
  const SpectralBounds sb = spectral_bounds(lap.L);
  CHECK(sb.lambda_min_l22 == doctest::Approx(1.0));
  CHECK(sb.lambda_max_l == doctest::Approx(2.0));
}

TEST_CASE("spectral constants agree with the characteristic-polynomial oracle") {
  const Laplacian lap = build_laplacian(fig1());
  const auto l22_roots = oracle::eigenvalues(lap.l22);
  const auto l_roots = oracle::eigenvalues(lap.L);
  REQUIRE(l22_roots.size() == 4);
  REQUIRE(l_roots.size() == 5);
  CHECK(lap.mu == doctest::Approx(l22_roots.front()).epsilon(1e-9));
  CHECK(lap.lambda_max == doctest::Approx(l_roots.back()).epsilon(1e-9));
  const SpectralBounds sb = spectral_bounds(lap.L);
  CHECK(sb.lambda_min_l22 == doctest::Approx(l22_roots.front()).epsilon(1e-9));
  CHECK(sb.lambda_max_l == doctest::Approx(l_roots.back()).epsilon(1e-9));
}

TEST_CASE("invalid topologies") {
  CHECK_THROWS_AS(build_laplacian(Graph::from_edges(3, {{1, 2}})), ConnectivityError);
  CHECK_THROWS_AS(Graph(Matrix{{0, 1}, {0, 0}}), TopologyError);
  CHECK_THROWS_AS(Graph(Matrix{{1, 1}, {1, 0}}), TopologyError);
  CHECK_THROWS_AS(Graph(Matrix{{0, -1}, {-1, 0}}), TopologyError);
  CHECK_THROWS_AS(Graph::from_edges(3, {{1, 4}}), TopologyError);
  CHECK_THROWS_AS(Graph::from_edges(3, {{2, 2}}), TopologyError);
  CHECK_THROWS_AS(Graph::from_edges(3, {{1, 2, 0.0}}), TopologyError);
  CHECK_THROWS_AS(build_laplacian(Graph(Matrix(1, 1))), TopologyError);
  CHECK_THROWS_AS(spectral_bounds(Matrix(1, 1)), TopologyError);
  CHECK_THROWS_AS(spectral_bounds(Matrix{{1, -1}, {-0.5, 1}}), TopologyError);
}

TEST_CASE("edges, neighbours and duplicate accumulation") {
  const Graph g = Graph::from_edges(3, {{1, 2}, {2, 1, 0.5}, {2, 3}});
  CHECK(g.weight(0, 1) == 1.5);
  CHECK(g.neighbours(1) == std::vector<std::size_t>{0, 2});
  const auto e = g.edges();
  REQUIRE(e.size() == 2);
  CHECK(e[0].i == 1);
  CHECK(e[0].j == 2);
  CHECK(e[0].weight == 1.5);
}

TEST_CASE("Laplacian properties on random connected graphs") {
  std::mt19937_64 rng(2024);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 2 + trial % 12;
    const Laplacian lap = build_laplacian(random_connected(rng, n));
    const Matrix& L = lap.L;
    for (std::size_t i = 0; i < n; ++i) {
      double row = 0;
      for (std::size_t j = 0; j < n; ++j) row += L(i, j);
      CHECK(std::abs(row) <= 1e-12);
    }
    for (int s = 0; s < 5; ++s) {
      Vector x(n), o(n);
      for (auto& v : x) v = g(rng);
      for (auto& v : o) v = g(rng);
      CHECK(quadratic_form(x, L) >= -1e-12);
      const Matrix shrunk = L - lap.epsilon * (L * L);
      CHECK(quadratic_form(o, shrunk) >= -1e-9 * squared_norm(o));
    }
    CHECK(lap.mu > 0);
    CHECK(lap.epsilon * lap.lambda_max <= 1.0);
  }
}
