#include "etcons/graph.hpp"

#include <cmath>
#include <deque>
#include <string>

#include "etcons/errors.hpp"

namespace etcons {

Graph::Graph(Matrix adjacency) : adjacency_(std::move(adjacency)) {
  if (!adjacency_.square() || adjacency_.rows() == 0)
    throw TopologyError("adjacency matrix must be square and non-empty");
  const std::size_t n = adjacency_.rows();
  for (std::size_t i = 0; i < n; ++i) {
    if (adjacency_(i, i) != 0.0)
      throw TopologyError("adjacency diagonal must be zero (agent " + std::to_string(i + 1) + ")");
    for (std::size_t j = 0; j < n; ++j) {
      const double a = adjacency_(i, j);
      if (!std::isfinite(a) || a < 0.0)
        throw TopologyError("adjacency weights must be finite and non-negative");
      if (a != adjacency_(j, i))
        throw TopologyError("adjacency must be symmetric: a_" + std::to_string(i + 1) + std::to_string(j + 1) +
                            " != a_" + std::to_string(j + 1) + std::to_string(i + 1));
    }
  }
}

Graph Graph::from_edges(std::size_t n_agents, const std::vector<Edge>& edges) {
  if (n_agents == 0) throw TopologyError("graph needs at least one agent");
  Matrix a(n_agents, n_agents);
  for (const Edge& e : edges) {
    if (e.i < 1 || e.j < 1 || e.i > n_agents || e.j > n_agents)
      throw TopologyError("edge (" + std::to_string(e.i) + ", " + std::to_string(e.j) +
                          ") references an unknown agent");
    if (e.i == e.j) throw TopologyError("self-loop on agent " + std::to_string(e.i));
    if (!(e.weight > 0.0) || !std::isfinite(e.weight))
      throw TopologyError("edge weights must be positive and finite");
    a(e.i - 1, e.j - 1) += e.weight;
    a(e.j - 1, e.i - 1) += e.weight;
  }
  return Graph(std::move(a));
}

std::vector<std::size_t> Graph::neighbours(std::size_t i) const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < n_agents(); ++j)
    if (adjacent(i, j)) out.push_back(j);
  return out;
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  for (std::size_t i = 0; i < n_agents(); ++i)
    for (std::size_t j = i + 1; j < n_agents(); ++j)
      if (adjacency_(i, j) > 0.0) out.push_back({i + 1, j + 1, adjacency_(i, j)});
  return out;
}

bool Graph::connected() const {
  const std::size_t n = n_agents();
  std::vector<bool> seen(n, false);
  std::deque<std::size_t> queue{0};
  seen[0] = true;
  std::size_t visited = 1;
  while (!queue.empty()) {
    const std::size_t v = queue.front();
    queue.pop_front();
    for (std::size_t w = 0; w < n; ++w) {
      if (!seen[w] && adjacent(v, w)) {
        seen[w] = true;
        ++visited;
        queue.push_back(w);
      }
    }
  }
  return visited == n;
}

SpectralBounds spectral_bounds(const Matrix& L) {
  if (!L.square()) throw TopologyError("Laplacian must be square");
  if (L.rows() < 2) throw TopologyError("Laplacian of a single agent has no follower block L22");
  if (!is_symmetric(L)) throw TopologyError("Laplacian must be symmetric");
  const std::size_t n = L.rows();
  return {lambda_min(L.block(1, 1, n - 1, n - 1)), lambda_max(L)};
}

Laplacian build_laplacian(const Graph& graph) {
  const std::size_t n = graph.n_agents();
  if (n < 2) throw TopologyError("leader-follower consensus needs at least two agents");
  if (!graph.connected()) throw ConnectivityError("communication graph is not connected");

  Laplacian lap;
  lap.L = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    double degree = 0.0;
    for (std::size_t k = 0; k < n; ++k) degree += graph.weight(i, k);
    for (std::size_t j = 0; j < n; ++j) lap.L(i, j) = i == j ? degree : -graph.weight(i, j);
  }
  lap.l22 = lap.L.block(1, 1, n - 1, n - 1);
  const SpectralBounds sb = spectral_bounds(lap.L);
  lap.mu = sb.lambda_min_l22;
  lap.lambda_max = sb.lambda_max_l;
  if (!(lap.mu > 0.0)) throw ConnectivityError("L22 is not positive definite");
  lap.epsilon = 1.0 / lap.lambda_max;
  lap.M.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) lap.M[i] += lap.L(i, j) * lap.L(i, j);
  return lap;
}

}  // namespace etcons
