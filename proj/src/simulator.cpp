#include "etcons/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace etcons {

namespace {

std::string state_dump(const WorldState& w) {
  std::ostringstream os;
  os.precision(17);
  os << "t=" << w.t << " states:";
  for (std::size_t i = 0; i < w.x.size(); ++i) {
    os << " x" << i + 1 << "=(";
    for (std::size_t c = 0; c < w.x[i].size(); ++c) os << (c ? "," : "") << w.x[i][c];
    os << ")";
  }
  return os.str();
}

template <class Fn>
auto as_config_error(const std::string& field, Fn&& fn) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const Error& e) {
    throw ConfigError(field, e.what());
  }
}

}  // namespace

Scenario prepare(const SimConfig& config) {
  if (!(config.step > 0.0) || !std::isfinite(config.step)) throw ConfigError("step", "must be positive and finite");
  if (!(config.duration >= 0.0) || !std::isfinite(config.duration))
    throw ConfigError("duration", "must be finite and non-negative");
  if (config.n_agents < 2) throw ConfigError("graph.n_agents", "needs a leader and at least one follower");
  if (!(config.chi >= 0.0)) throw ConfigError("metrics.chi", "must be non-negative");

  SystemModel model = as_config_error("model", [&] { return make_model(config.model, config.theta, config.theta_hat); });
  const std::size_t n = model.state_dim;

  if (config.initial_states.size() != config.n_agents)
    throw ConfigError("initial_states", "expected " + std::to_string(config.n_agents) + " states");
  for (std::size_t i = 0; i < config.n_agents; ++i) {
    if (config.initial_states[i].size() != n)
      throw ConfigError("initial_states[" + std::to_string(i) + "]", "expected dimension " + std::to_string(n));
    if (!all_finite(config.initial_states[i]))
      throw ConfigError("initial_states[" + std::to_string(i) + "]", "must be finite");
  }

  Graph graph = as_config_error("graph.edges", [&] { return Graph::from_edges(config.n_agents, config.edges); });
  Laplacian lap = as_config_error("graph", [&] { return build_laplacian(graph); });

  const CmfCertificate& cert = config.certificate;
  if (cert.P.rows() != n || cert.P.cols() != n)
    throw ConfigError("certificate.P", "must be " + std::to_string(n) + "x" + std::to_string(n));
  if (!is_symmetric(cert.P)) throw ConfigError("certificate.P", "must be symmetric");
  if (!(lambda_min(cert.P) > 0.0)) throw ConfigError("certificate.P", "must be positive definite");
  if (!(cert.rho > 0.0)) throw ConfigError("certificate.rho", "must be positive");
  if (!(cert.q > 0.0)) throw ConfigError("certificate.q", "must be positive");

  check_gain_condition(config.trigger.kappa1, cert.rho, lap.mu);
  TriggerParams params = build_trigger_params(lap, model.B, cert.P, config.trigger);

  return Scenario{config, std::move(model), std::move(graph), std::move(lap), std::move(params)};
}

WorldState initial_world(const Scenario& s) {
  const std::size_t N = s.config.n_agents;
  const std::size_t n = s.model.state_dim;
  WorldState w;
  w.x = s.config.initial_states;
  w.banks = make_banks(s.graph, w.x, s.model.theta_hat);
  TriggerState& ts = w.trigger;
  ts.last_event.assign(N, 0.0);
  ts.counts.assign(N, 0);
  ts.e.assign(N, Vector(n, 0.0));
  ts.w.resize(N);
  for (std::size_t i = 0; i < N; ++i) ts.w[i] = compute_wi(i, w.banks[i], s.laplacian);
  ts.delta.assign(N, 0.0);
  ts.threshold.assign(N, 0.0);
  for (std::size_t i = 0; i < N; ++i) ts.threshold[i] = trigger_threshold(i, ts.w[i], s.params);
  ts.fired.assign(N, false);
  ts.delta_after.assign(N, 0.0);
  ts.w_norm_after.assign(N, 0.0);
  for (std::size_t i = 0; i < N; ++i) ts.w_norm_after[i] = norm2(ts.w[i]);
  return w;
}

WorldState step(const WorldState& world, const Scenario& s) {
  const std::size_t N = s.config.n_agents;
  const double h = s.config.step;
  const Integrator integrator = s.config.integrator;
  const std::span<const double> theta(s.model.theta_true);

  WorldState next;
  next.step_index = world.step_index + 1;
  next.t = static_cast<double>(next.step_index) * h;
  next.x.resize(N);

  // Leader: ẋ₁ = f(x₁, θ), never reads other agents.
  next.x[0] = integrate_step(integrator, [&](std::span<const double> x) { return s.model.f(x, theta); }, world.x[0], h);
  for (std::size_t i = 1; i < N; ++i) {
    const Vector u = control_input(i, world.banks[i], s.laplacian, s.params);
    const Vector bu = s.model.B * u;
    auto rhs = [&](std::span<const double> x) {
      Vector dx = s.model.f(x, theta);
      for (std::size_t c = 0; c < dx.size(); ++c) dx[c] += bu[c];
      return dx;
    };
    next.x[i] = integrate_step(integrator, rhs, world.x[i], h);
  }
  for (std::size_t i = 0; i < N; ++i)
    if (!all_finite(next.x[i]))
      throw NumericsError("state of agent " + std::to_string(i + 1) + " became non-finite; " + state_dump(next));

  next.banks.reserve(N);
  for (const EstimatorBank& bank : world.banks) next.banks.push_back(propagate(bank, s.model, h, integrator));

  TriggerState& ts = next.trigger;
  ts.last_event = world.trigger.last_event;
  ts.counts = world.trigger.counts;
  ts.e.resize(N);
  ts.w.resize(N);
  ts.delta.assign(N, 0.0);
  ts.threshold.assign(N, 0.0);
  ts.fired.assign(N, false);
  for (std::size_t i = 0; i < N; ++i) {
    ts.e[i] = subtract(next.x[i], next.banks[i].self());
    ts.w[i] = compute_wi(i, next.banks[i], s.laplacian);
    ts.delta[i] = compute_delta(i, ts.e[i], ts.w[i], s.params);
    ts.threshold[i] = trigger_threshold(i, ts.w[i], s.params);
    if (!std::isfinite(ts.delta[i]) || !std::isfinite(ts.threshold[i]))
      throw NumericsError("trigger quantities of agent " + std::to_string(i + 1) + " became non-finite; " +
                          state_dump(next));
    ts.fired[i] = ctc_fire(ts.delta[i], ts.w[i], s.params, i);
  }
  // Resets as one batch, after every agent has evaluated its CTC.
  for (std::size_t i = 0; i < N; ++i) {
    if (!ts.fired[i]) continue;
    apply_broadcast(next.banks, s.graph, i, next.x[i]);
    ts.last_event[i] = next.t;
    ++ts.counts[i];
  }
  ts.delta_after.assign(N, 0.0);
  ts.w_norm_after.assign(N, 0.0);
  for (std::size_t i = 0; i < N; ++i) {
    const Vector e = subtract(next.x[i], next.banks[i].self());
    const Vector w = compute_wi(i, next.banks[i], s.laplacian);
    ts.delta_after[i] = compute_delta(i, e, w, s.params);
    ts.w_norm_after[i] = norm2(w);
  }
  return next;
}

Vector RunRecord::r(std::size_t k, std::size_t i) const { return subtract(state(k, i), state(k, 0)); }

double consensus_distance_sq(std::span<const double> stacked, std::size_t n_agents, std::size_t state_dim) {
  Vector mean(state_dim, 0.0);
  for (std::size_t i = 0; i < n_agents; ++i)
    for (std::size_t c = 0; c < state_dim; ++c) mean[c] += stacked[i * state_dim + c];
  for (double& m : mean) m /= static_cast<double>(n_agents);
  double d = 0.0;
  for (std::size_t i = 0; i < n_agents; ++i)
    for (std::size_t c = 0; c < state_dim; ++c) {
      const double diff = stacked[i * state_dim + c] - mean[c];
      d += diff * diff;
    }
  return d;
}

std::size_t step_count(double duration, double h) {
  return static_cast<std::size_t>(std::floor(duration / h + 1e-9));
}

namespace {

bool synchronised(const std::vector<EstimatorBank>& banks) {
  for (const EstimatorBank& bank : banks)
    for (const auto& [j, xhat] : bank.estimates)
      if (j != bank.owner && xhat != banks[j].self()) return false;
  return true;
}

void append_sample(RunRecord& rec, const WorldState& w, const Matrix& P, bool initial) {
  const std::size_t N = rec.n_agents;
  const std::size_t n = rec.state_dim;
  rec.times.push_back(w.t);
  Vector flat, est;
  flat.reserve(N * n);
  est.reserve(N * n);
  for (std::size_t i = 0; i < N; ++i) {
    flat.insert(flat.end(), w.x[i].begin(), w.x[i].end());
    const Vector& self = w.banks[i].self();
    est.insert(est.end(), self.begin(), self.end());
  }
  double V = 0.0, rsq = 0.0;
  for (std::size_t i = 1; i < N; ++i) {
    const Vector r = subtract(w.x[i], w.x[0]);
    V += quadratic_form(r, P);
    rsq += squared_norm(r);
  }
  rec.V.push_back(V);
  rec.r_norm_sq_sum.push_back(rsq);
  rec.distance_sq.push_back(consensus_distance_sq(flat, N, n));
  rec.states.push_back(std::move(flat));
  rec.self_estimates.push_back(std::move(est));

  std::vector<TriggerSample> samples(N);
  const TriggerState& ts = w.trigger;
  for (std::size_t i = 0; i < N; ++i) {
    TriggerSample& smp = samples[i];
    smp.w_norm_after = ts.w_norm_after[i];
    if (initial) {
      smp.w_norm = ts.w_norm_after[i];
      smp.threshold = ts.threshold[i];
      continue;
    }
    smp.delta = ts.delta[i];
    smp.threshold = ts.threshold[i];
    smp.delta_after = ts.delta_after[i];
    smp.e_norm = norm2(ts.e[i]);
    smp.e_norm_after = norm2(subtract(w.x[i], w.banks[i].self()));
    smp.w_norm = norm2(ts.w[i]);
    smp.fired = ts.fired[i];
    if (smp.fired) rec.events.push_back({w.t, w.step_index, i});
  }
  rec.trigger.push_back(std::move(samples));
  if (!synchronised(w.banks)) rec.estimator_synchrony = false;
}

}  // namespace

RunRecord run(const Scenario& s) {
  auto rec = std::make_shared<RunRecord>();
  rec->n_agents = s.config.n_agents;
  rec->state_dim = s.model.state_dim;
  rec->step = s.config.step;
  const std::size_t K = step_count(s.config.duration, s.config.step);
  rec->times.reserve(K + 1);
  rec->states.reserve(K + 1);
  rec->self_estimates.reserve(K + 1);
  rec->trigger.reserve(K + 1);

  const Matrix& P = s.config.certificate.P;
  WorldState world = initial_world(s);
  append_sample(*rec, world, P, true);
  for (std::size_t k = 0; k < K; ++k) {
    try {
      world = step(world, s);
    } catch (const NumericsError& e) {
      rec->event_counts = world.trigger.counts;
      rec->error = e.what();
      throw SimulationError(e.what(), rec);
    }
    append_sample(*rec, world, P, false);
  }
  rec->event_counts = world.trigger.counts;
  return std::move(*rec);
}

StateGrid run_operating_grid(const RunRecord& record, std::size_t points_per_axis) {
  std::vector<Vector> points;
  const std::size_t n = record.state_dim;
  for (std::size_t k = 0; k < record.samples(); ++k)
    for (std::size_t i = 0; i < record.n_agents; ++i) {
      const double* xs = record.states[k].data() + i * n;
      const double* es = record.self_estimates[k].data() + i * n;
      points.emplace_back(xs, xs + n);
      points.emplace_back(es, es + n);
    }
  return StateGrid::bounding(points, 0.2, points_per_axis);
}

ZenoReport zeno_guard_report(const RunRecord& record, const TriggerParams& params, const LipschitzData& lipschitz) {
  if (params.variant != CtcVariant::practical)
    throw UsageError("zeno_guard_report: the asymptotic CTC carries no inter-event guarantee");
  const std::size_t N = record.n_agents;
  ZenoReport report;
  report.lipschitz = lipschitz;
  report.agents.resize(N);
  const double bbtp_norm = spectral_norm(params.BBtP);

  for (std::size_t i = 0; i < N; ++i) {
    AgentZenoReport& a = report.agents[i];
    for (std::size_t k = 0; k < record.samples(); ++k)
      a.w_max = std::max({a.w_max, record.trigger[k][i].w_norm, record.trigger[k][i].w_norm_after});

    double last = 0.0;
    a.min_inter_event = INFINITY;
    for (const Event& ev : record.events) {
      if (ev.agent != i) continue;
      ++a.events;
      a.min_inter_event = std::min(a.min_inter_event, ev.t - last);
      last = ev.t;
    }

    a.nu = error_growth_rate(lipschitz.k, params.kappa, bbtp_norm, a.w_max, lipschitz.delta);
    try {
      a.tau = tau_lower_bound(lipschitz.k, a.nu, spectral_norm(params.S[i]), spectral_norm(params.R[i]), a.w_max,
                              params.xi);
    } catch (const DegenerateError&) {
      a.tau = INFINITY;
    }
    a.satisfied = a.events == 0 || a.min_inter_event >= a.tau;

    // Error-growth envelope, restarted at every reset of agent i.
    double reset_time = 0.0;
    for (std::size_t k = 1; k < record.samples(); ++k) {
      const TriggerSample& smp = record.trigger[k][i];
      const double elapsed = record.times[k] - reset_time;
      const double bound = a.nu * std::expm1(lipschitz.k * elapsed);
      const double ratio = bound > 0.0 ? smp.e_norm / bound : (smp.e_norm > 0.0 ? INFINITY : 0.0);
      a.worst_envelope_ratio = std::max(a.worst_envelope_ratio, ratio);
      if (smp.e_norm > bound * (1.0 + 1e-9) + 1e-12) a.envelope_ok = false;
      if (smp.fired) reset_time = record.times[k];
    }
  }
  report.satisfied = std::all_of(report.agents.begin(), report.agents.end(), [](const auto& a) { return a.satisfied; });
  report.envelope_ok =
      std::all_of(report.agents.begin(), report.agents.end(), [](const auto& a) { return a.envelope_ok; });
  return report;
}

}  // namespace etcons
