#pragma once

#include <cstddef>
#include <vector>

#include "etcons/linalg.hpp"

namespace etcons {

// Weighted undirected edge between 1-based agent indices.
struct Edge {
  std::size_t i = 0;
  std::size_t j = 0;
  double weight = 1.0;
};

// Communication topology. Agent index 0 (agent 1 externally) is the leader.
class Graph {
 public:
  // Throws TopologyError on asymmetry, negative weights or a non-zero diagonal.
  explicit Graph(Matrix adjacency);
  // 1-based edge list; duplicate edges accumulate their weights.
  static Graph from_edges(std::size_t n_agents, const std::vector<Edge>& edges);

  std::size_t n_agents() const noexcept { return adjacency_.rows(); }
  const Matrix& adjacency() const noexcept { return adjacency_; }
  double weight(std::size_t i, std::size_t j) const { return adjacency_(i, j); }
  bool adjacent(std::size_t i, std::size_t j) const { return i != j && adjacency_(i, j) > 0.0; }

  // 0-based neighbours of agent i, ascending.
  std::vector<std::size_t> neighbours(std::size_t i) const;
  std::vector<Edge> edges() const;  // 1-based, i < j
  bool connected() const;           // BFS over positive-weight edges

 private:
  Matrix adjacency_;
};

struct Laplacian {
  Matrix L;
  Matrix l22;             // L with leader row/column removed
  double mu = 0.0;        // λmin(L₂₂)
  double lambda_max = 0.0;
  double epsilon = 0.0;   // default exactly 1/λmax(L)
  Vector M;               // Mᵢ = Σⱼ l_ij²

  std::size_t n_agents() const noexcept { return L.rows(); }
  double degree(std::size_t i) const { return L(i, i); }
};

// Throws ConnectivityError for a disconnected graph, TopologyError for N < 2.
Laplacian build_laplacian(const Graph& graph);

struct SpectralBounds {
  double lambda_min_l22 = 0.0;
  double lambda_max_l = 0.0;
};

// Throws TopologyError on a non-symmetric input or when L has no L₂₂ block (N < 2).
SpectralBounds spectral_bounds(const Matrix& L);

}  // namespace etcons
