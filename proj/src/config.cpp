#include "etcons/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace etcons {

using nlohmann::json;

namespace {

std::string join(const std::string& base, const std::string& key) { return base.empty() ? key : base + "." + key; }
std::string index(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

void reject_unknown(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(path, "expected an object");
  const std::set<std::string> keys(allowed.begin(), allowed.end());
  for (const auto& [k, v] : j.items())
    if (!keys.contains(k)) throw ConfigError(join(path, k), "unknown key");
}

const json& require(const json& j, const std::string& path, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw ConfigError(join(path, key), "is required");
  return *it;
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ConfigError(path, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw ConfigError(path, "must be finite");
  return d;
}

std::size_t as_count(const json& v, const std::string& path) {
  if (!v.is_number_integer() && !v.is_number_unsigned()) throw ConfigError(path, "expected a non-negative integer");
  const auto i = v.get<long long>();
  if (i < 0) throw ConfigError(path, "expected a non-negative integer");
  return static_cast<std::size_t>(i);
}

Vector as_vector(const json& v, const std::string& path) {
  if (v.is_number()) return {as_number(v, path)};  // scalar parameters may be written bare
  if (!v.is_array()) throw ConfigError(path, "expected an array of numbers");
  Vector out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_number(v[i], index(path, i)));
  return out;
}

Matrix as_matrix(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) throw ConfigError(path, "expected a non-empty array of rows");
  std::vector<Vector> rows;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_array()) throw ConfigError(index(path, i), "expected an array of numbers");
    rows.push_back(as_vector(v[i], index(path, i)));
    if (rows.back().size() != rows.front().size()) throw ConfigError(index(path, i), "ragged matrix row");
  }
  return Matrix::from_rows(rows);
}

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (const Vector& r : m.to_rows()) rows.push_back(r);
  return rows;
}

}  // namespace

SimConfig config_from_json(const json& j) {
  reject_unknown(j, "", {"model", "graph", "initial_states", "step", "duration", "integrator", "trigger",
                         "certificate", "metrics", "output", "seed"});
  SimConfig c;

  const json& model = require(j, "", "model");
  reject_unknown(model, "model", {"name", "theta", "theta_hat"});
  if (auto it = model.find("name"); it != model.end()) {
    if (!it->is_string()) throw ConfigError("model.name", "expected a string");
    c.model = it->get<std::string>();
  }
  c.theta = as_vector(require(model, "model", "theta"), "model.theta");
  c.theta_hat = as_vector(require(model, "model", "theta_hat"), "model.theta_hat");

  const json& graph = require(j, "", "graph");
  reject_unknown(graph, "graph", {"n_agents", "edges"});
  c.n_agents = as_count(require(graph, "graph", "n_agents"), "graph.n_agents");
  const json& edges = require(graph, "graph", "edges");
  if (!edges.is_array()) throw ConfigError("graph.edges", "expected an array of [i, j] or [i, j, weight]");
  for (std::size_t e = 0; e < edges.size(); ++e) {
    const std::string p = index("graph.edges", e);
    if (!edges[e].is_array() || edges[e].size() < 2 || edges[e].size() > 3)
      throw ConfigError(p, "expected [i, j] or [i, j, weight]");
    Edge edge{as_count(edges[e][0], p + "[0]"), as_count(edges[e][1], p + "[1]")};
    if (edges[e].size() == 3) edge.weight = as_number(edges[e][2], p + "[2]");
    c.edges.push_back(edge);
  }

  const json& x0 = require(j, "", "initial_states");
  if (!x0.is_array()) throw ConfigError("initial_states", "expected an array of state vectors");
  for (std::size_t i = 0; i < x0.size(); ++i) {
    if (!x0[i].is_array()) throw ConfigError(index("initial_states", i), "expected an array of numbers");
    c.initial_states.push_back(as_vector(x0[i], index("initial_states", i)));
  }

  if (auto it = j.find("step"); it != j.end()) c.step = as_number(*it, "step");
  if (auto it = j.find("duration"); it != j.end()) c.duration = as_number(*it, "duration");
  if (auto it = j.find("integrator"); it != j.end()) {
    if (!it->is_string()) throw ConfigError("integrator", "expected \"euler\" or \"rk4\"");
    c.integrator = parse_integrator(it->get<std::string>());
  }

  const json& trig = require(j, "", "trigger");
  reject_unknown(trig, "trigger", {"ctc", "kappa1", "kappa2", "sigma", "b", "epsilon", "xi"});
  if (auto it = trig.find("ctc"); it != trig.end()) {
    if (!it->is_string()) throw ConfigError("trigger.ctc", "expected \"asymptotic\" or \"practical\"");
    c.trigger.variant = parse_ctc(it->get<std::string>());
  }
  c.trigger.kappa1 = as_number(require(trig, "trigger", "kappa1"), "trigger.kappa1");
  c.trigger.kappa2 = as_number(require(trig, "trigger", "kappa2"), "trigger.kappa2");
  c.trigger.sigma = as_vector(require(trig, "trigger", "sigma"), "trigger.sigma");
  if (auto it = trig.find("b"); it != trig.end()) c.trigger.b = as_vector(*it, "trigger.b");
  if (auto it = trig.find("epsilon"); it != trig.end()) c.trigger.epsilon = as_number(*it, "trigger.epsilon");
  if (auto it = trig.find("xi"); it != trig.end()) c.trigger.xi = as_number(*it, "trigger.xi");

  const json& cert = require(j, "", "certificate");
  reject_unknown(cert, "certificate", {"P", "rho", "q"});
  c.certificate.P = as_matrix(require(cert, "certificate", "P"), "certificate.P");
  c.certificate.rho = as_number(require(cert, "certificate", "rho"), "certificate.rho");
  c.certificate.q = as_number(require(cert, "certificate", "q"), "certificate.q");

  if (auto it = j.find("metrics"); it != j.end()) {
    reject_unknown(*it, "metrics", {"chi"});
    if (auto chi = it->find("chi"); chi != it->end()) c.chi = as_number(*chi, "metrics.chi");
  }
  if (auto it = j.find("output"); it != j.end()) {
    reject_unknown(*it, "output", {"dump_estimates"});
    if (auto d = it->find("dump_estimates"); d != it->end()) {
      if (!d->is_boolean()) throw ConfigError("output.dump_estimates", "expected a boolean");
      c.dump_estimates = d->get<bool>();
    }
  }
  if (auto it = j.find("seed"); it != j.end()) c.seed = as_count(*it, "seed");
  return c;
}

json config_to_json(const SimConfig& c) {
  json edges = json::array();
  for (const Edge& e : c.edges) {
    if (e.weight == 1.0)
      edges.push_back({e.i, e.j});
    else
      edges.push_back({e.i, e.j, e.weight});
  }
  json trigger = {{"ctc", std::string(to_string(c.trigger.variant))},
                  {"kappa1", c.trigger.kappa1},
                  {"kappa2", c.trigger.kappa2},
                  {"sigma", c.trigger.sigma},
                  {"xi", c.trigger.xi}};
  if (c.trigger.b) trigger["b"] = *c.trigger.b;
  if (c.trigger.epsilon) trigger["epsilon"] = *c.trigger.epsilon;
  return {
      {"model", {{"name", c.model}, {"theta", c.theta}, {"theta_hat", c.theta_hat}}},
      {"graph", {{"n_agents", c.n_agents}, {"edges", edges}}},
      {"initial_states", c.initial_states},
      {"step", c.step},
      {"duration", c.duration},
      {"integrator", std::string(to_string(c.integrator))},
      {"trigger", trigger},
      {"certificate", {{"P", matrix_json(c.certificate.P)}, {"rho", c.certificate.rho}, {"q", c.certificate.q}}},
      {"metrics", {{"chi", c.chi}}},
      {"output", {{"dump_estimates", c.dump_estimates}}},
      {"seed", c.seed},
  };
}

void validate_config(const SimConfig& config) {
  prepare(config);
  if (config.duration < config.step) throw ConfigError("duration", "must be at least one step (duration >= step)");
}

SimConfig parse_and_validate(const json& j) {
  SimConfig c = config_from_json(j);
  validate_config(c);
  return c;
}

RunSpec load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("", "malformed JSON in '" + path + "': " + e.what());
  }
  RunSpec spec;
  spec.config = parse_and_validate(j);
  return spec;
}

std::vector<std::string> preset_names() {
  return {"paper-asym-040", "paper-asym-035", "paper-zeno-040", "paper-zeno-035"};
}

SimConfig preset(const std::string& name) {
  SimConfig c;
  c.model = "paper-sys";
  c.theta = {0.5};
  c.n_agents = 5;
  c.edges = {{1, 2}, {2, 3}, {2, 5}, {3, 4}};
  c.initial_states = {{0.95, 0.63}, {-0.70, -0.73}, {-0.33, -0.54}, {-0.25, 0.02}, {0.86, 0.01}};
  c.step = 0.01;
  c.integrator = Integrator::rk4;
  c.trigger.kappa1 = 0.1;
  c.trigger.kappa2 = 5.0;
  c.trigger.sigma = {0.8, 0.9, 0.9, 0.9, 0.9};
  c.certificate = {Matrix{{5.0, 2.0}, {2.0, 1.0}}, 0.02, 1.0};
  c.chi = 0.1;

  if (name == "paper-asym-040" || name == "paper-asym-035") {
    c.trigger.variant = CtcVariant::asymptotic;
    c.trigger.xi = 0.0;
    c.duration = 10.0;
  } else if (name == "paper-zeno-040" || name == "paper-zeno-035") {
    c.trigger.variant = CtcVariant::practical;
    c.trigger.xi = 20.0;
    c.duration = 30.0;
  } else {
    std::string known;
    for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("preset", "unknown preset '" + name + "' (known: " + known + ")");
  }
  c.theta_hat = {name.ends_with("040") ? 0.40 : 0.35};
  return c;
}

void apply_override(json& config, const std::string& path, const json& value) {
  if (path.empty()) {
    if (!value.is_object()) throw ConfigError("sweep", "a root override must be an object");
    config.merge_patch(value);
    return;
  }
  json* node = &config;
  std::size_t pos = 0;
  while (pos < path.size()) {
    std::size_t end = path.find_first_of(".[", pos);
    if (end == std::string::npos) end = path.size();
    const std::string key = path.substr(pos, end - pos);
    if (!key.empty()) {
      if (!node->is_object()) throw ConfigError(path, "cannot descend into a non-object");
      node = &(*node)[key];
    }
    pos = end;
    while (pos < path.size() && path[pos] == '[') {
      const std::size_t close = path.find(']', pos);
      if (close == std::string::npos) throw ConfigError(path, "unterminated index");
      std::size_t idx = 0;
      try {
        idx = std::stoul(path.substr(pos + 1, close - pos - 1));
      } catch (const std::exception&) {
        throw ConfigError(path, "bad index");
      }
      if (!node->is_array() || idx >= node->size()) throw ConfigError(path, "index out of range");
      node = &(*node)[idx];
      pos = close + 1;
    }
    if (pos < path.size() && path[pos] == '.') ++pos;
  }
  if (node->is_object() && value.is_object())
    node->merge_patch(value);
  else
    *node = value;
}

}  // namespace etcons
