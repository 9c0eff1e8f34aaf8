#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include "etcons/dynamics.hpp"
#include "etcons/graph.hpp"
#include "etcons/integrator.hpp"

namespace etcons {

// Agent `owner`'s open-loop predictors x̂ⱼ for itself and each neighbour j
// (0-based keys). Between broadcasts they follow f(·, θ̂) only.
struct EstimatorBank {
  std::size_t owner = 0;
  std::map<std::size_t, Vector> estimates;
  Vector theta_hat;

  bool has(std::size_t j) const { return estimates.contains(j); }
  // Throws TopologyError when agent j is not tracked by this bank.
  const Vector& estimate(std::size_t j) const;
  const Vector& self() const { return estimate(owner); }
};

// One bank per agent, every estimate initialised to the agent's true state.
std::vector<EstimatorBank> make_banks(const Graph& graph, const std::vector<Vector>& initial_states,
                                      const Vector& theta_hat);

// Advances every estimate by one integrator step of f(·, θ̂). Throws NumericsError
// on a non-finite result and ModelError when h ≤ 0.
EstimatorBank propagate(const EstimatorBank& bank, const SystemModel& model, double h, Integrator integrator);

// Resets x̂_sender in the sender's own bank and in every neighbour's bank to `state`.
// Throws TopologyError for an unknown sender.
void apply_broadcast(std::vector<EstimatorBank>& banks, const Graph& graph, std::size_t sender,
                     std::span<const double> state);

}  // namespace etcons
