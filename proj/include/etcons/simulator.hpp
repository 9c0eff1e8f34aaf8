#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "etcons/control.hpp"
#include "etcons/dynamics.hpp"
#include "etcons/errors.hpp"
#include "etcons/estimation.hpp"
#include "etcons/graph.hpp"
#include "etcons/integrator.hpp"

namespace etcons {

struct SimConfig {
  std::string model = "paper-sys";
  Vector theta;
  Vector theta_hat;
  std::size_t n_agents = 0;
  std::vector<Edge> edges;  // 1-based
  std::vector<Vector> initial_states;
  double step = 0.01;
  double duration = 10.0;
  Integrator integrator = Integrator::rk4;
  TriggerSettings trigger;
  CmfCertificate certificate;
  double chi = 0.1;
  bool dump_estimates = false;
  std::uint64_t seed = 0;  // reserved; runs are deterministic
};

// Everything a run needs, resolved and validated once.
struct Scenario {
  SimConfig config;
  SystemModel model;
  Graph graph;
  Laplacian laplacian;
  TriggerParams params;
};

// Validates every module invariant and derives the graph, model and trigger data.
// Throws ConfigError naming the field and the violated condition.
Scenario prepare(const SimConfig& config);

struct TriggerState {
  Vector last_event;                 // t_{i,p}; 0 after the initial synchronisation
  std::vector<std::size_t> counts;
  std::vector<Vector> e;             // eᵢ at the latest sample, before resets
  std::vector<Vector> w;             // wᵢ at the latest sample, before resets
  Vector delta;                      // δᵢ before resets
  Vector threshold;                  // σᵢwᵢᵀΘᵢwᵢ (+ ξ)
  std::vector<bool> fired;
  Vector delta_after;                // δᵢ after the batch of resets
  Vector w_norm_after;
};

struct WorldState {
  std::size_t step_index = 0;
  double t = 0.0;
  std::vector<Vector> x;
  std::vector<EstimatorBank> banks;
  TriggerState trigger;
};

WorldState initial_world(const Scenario& scenario);

// One zero-order-hold step: controls from current estimates, plant and
// estimators integrated over [t, t+h], CTCs evaluated at t+h, then all firing
// agents broadcast as one batch. Throws NumericsError when a state or a trigger
// quantity becomes non-finite.
WorldState step(const WorldState& world, const Scenario& scenario);

struct Event {
  double t = 0.0;
  std::size_t step = 0;
  std::size_t agent = 0;  // 0-based
};

// Per-agent CTC evaluation at one sample.
struct TriggerSample {
  double delta = 0.0;
  double threshold = 0.0;
  double delta_after = 0.0;
  double e_norm = 0.0;
  double e_norm_after = 0.0;
  double w_norm = 0.0;
  double w_norm_after = 0.0;
  bool fired = false;
};

struct RunRecord {
  std::size_t n_agents = 0;
  std::size_t state_dim = 0;
  double step = 0.0;
  std::vector<double> times;
  std::vector<Vector> states;          // per sample, agent-major flat N·n
  std::vector<Vector> self_estimates;  // per sample, x̂ᵢⁱ flat N·n
  std::vector<Event> events;
  std::vector<std::vector<TriggerSample>> trigger;  // per sample; sample 0 is all zeros
  Vector V;                            // Σ_{i≥2} rᵢᵀPrᵢ
  Vector distance_sq;                  // |x|²_𝒟
  Vector r_norm_sq_sum;                // Σᵢ |rᵢ|²
  std::vector<std::size_t> event_counts;
  bool estimator_synchrony = true;
  std::optional<std::string> error;

  std::size_t samples() const noexcept { return times.size(); }
  std::span<const double> state(std::size_t k, std::size_t i) const {
    return std::span<const double>(states[k]).subspan(i * state_dim, state_dim);
  }
  Vector r(std::size_t k, std::size_t i) const;
};

// Non-finite state during a run; carries the record up to the failing step.
class SimulationError : public NumericsError {
 public:
  SimulationError(const std::string& what, std::shared_ptr<RunRecord> partial)
      : NumericsError(what), partial_(std::move(partial)) {}
  const std::shared_ptr<RunRecord>& partial() const noexcept { return partial_; }

 private:
  std::shared_ptr<RunRecord> partial_;
};

std::size_t step_count(double duration, double h);

// Executes step_count(T, h) steps. Bit-identical for identical scenarios.
RunRecord run(const Scenario& scenario);

// |x|²_𝒟 = min_z Σᵢ |z − xᵢ|², the squared distance to the consensus manifold.
double consensus_distance_sq(std::span<const double> stacked, std::size_t n_agents, std::size_t state_dim);

struct AgentZenoReport {
  std::size_t events = 0;
  double min_inter_event = 0.0;  // +inf without events
  double tau = 0.0;
  double w_max = 0.0;
  double nu = 0.0;
  bool satisfied = false;
  bool envelope_ok = true;       // |eᵢ(t)| ≤ ν(e^{k(t−t_{i,p})} − 1) at every sample
  double worst_envelope_ratio = 0.0;
};

struct ZenoReport {
  LipschitzData lipschitz;
  std::vector<AgentZenoReport> agents;
  bool satisfied = false;
  bool envelope_ok = false;
};

// Grid over the bounding box of visited states and self-estimates, inflated 20%.
StateGrid run_operating_grid(const RunRecord& record, std::size_t points_per_axis = 101);

// Measured minimum inter-event time vs the closed-form τᵢ for every agent.
// Throws UsageError for records produced under the asymptotic CTC.
ZenoReport zeno_guard_report(const RunRecord& record, const TriggerParams& params, const LipschitzData& lipschitz);

}  // namespace etcons
