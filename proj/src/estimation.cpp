#include "etcons/estimation.hpp"

#include <string>

#include "etcons/errors.hpp"

namespace etcons {

std::string_view to_string(Integrator integrator) {
  return integrator == Integrator::euler ? "euler" : "rk4";
}

Integrator parse_integrator(std::string_view name) {
  if (name == "euler") return Integrator::euler;
  if (name == "rk4") return Integrator::rk4;
  throw ConfigError("integrator", "must be 'euler' or 'rk4', got '" + std::string(name) + "'");
}

const Vector& EstimatorBank::estimate(std::size_t j) const {
  auto it = estimates.find(j);
  if (it == estimates.end())
    throw TopologyError("agent " + std::to_string(owner + 1) + " holds no estimate of agent " +
                        std::to_string(j + 1));
  return it->second;
}

std::vector<EstimatorBank> make_banks(const Graph& graph, const std::vector<Vector>& initial_states,
                                      const Vector& theta_hat) {
  if (initial_states.size() != graph.n_agents())
    throw TopologyError("one initial state per agent is required");
  std::vector<EstimatorBank> banks(graph.n_agents());
  for (std::size_t i = 0; i < graph.n_agents(); ++i) {
    banks[i].owner = i;
    banks[i].theta_hat = theta_hat;
    banks[i].estimates[i] = initial_states[i];
    for (std::size_t j : graph.neighbours(i)) banks[i].estimates[j] = initial_states[j];
  }
  return banks;
}

EstimatorBank propagate(const EstimatorBank& bank, const SystemModel& model, double h, Integrator integrator) {
  if (!(h > 0.0)) throw ModelError("propagate: step must be positive");
  EstimatorBank next;
  next.owner = bank.owner;
  next.theta_hat = bank.theta_hat;
  const std::span<const double> theta(bank.theta_hat);
  auto rhs = [&](std::span<const double> x) { return model.f(x, theta); };
  for (const auto& [j, xhat] : bank.estimates) {
    Vector advanced = integrate_step(integrator, rhs, xhat, h);
    if (!all_finite(advanced))
      throw NumericsError("estimate of agent " + std::to_string(j + 1) + " held by agent " +
                          std::to_string(bank.owner + 1) + " became non-finite");
    next.estimates.emplace(j, std::move(advanced));
  }
  return next;
}

void apply_broadcast(std::vector<EstimatorBank>& banks, const Graph& graph, std::size_t sender,
                     std::span<const double> state) {
  if (sender >= graph.n_agents() || sender >= banks.size())
    throw TopologyError("broadcast from unknown agent " + std::to_string(sender + 1));
  banks[sender].estimates[sender].assign(state.begin(), state.end());
  for (std::size_t i : graph.neighbours(sender)) {
    auto it = banks[i].estimates.find(sender);
    if (it == banks[i].estimates.end())
      throw TopologyError("agent " + std::to_string(i + 1) + " does not track neighbour " +
                          std::to_string(sender + 1));
    it->second.assign(state.begin(), state.end());
  }
}

}  // namespace etcons
