#include "etcons/output.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "etcons/config.hpp"

namespace etcons {

using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

namespace {

bool is_scalar(const json& j) { return !j.is_array() && !j.is_object(); }

void write_scalar(std::ostream& os, const json& j) {
  if (j.is_number_float()) {
    const double v = j.get<double>();
    if (!std::isfinite(v)) {
      os << "null";
      return;
    }
    std::string s = format_double(v);
    // Keep floats recognisable as floats for readers that care.
    if (s.find_first_of(".e") == std::string::npos) s += ".0";
    os << s;
  } else {
    os << j.dump();
  }
}

void write_node(std::ostream& os, const json& j, int indent, int depth) {
  if (is_scalar(j)) {
    write_scalar(os, j);
    return;
  }
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string close_pad(static_cast<std::size_t>(indent * depth), ' ');
  if (j.is_array()) {
    if (j.empty()) {
      os << "[]";
      return;
    }
    bool flat = true;
    for (const json& e : j) flat = flat && is_scalar(e);
    if (flat) {
      os << "[";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) os << ", ";
        write_scalar(os, j[i]);
      }
      os << "]";
      return;
    }
    os << "[\n";
    for (std::size_t i = 0; i < j.size(); ++i) {
      os << pad;
      write_node(os, j[i], indent, depth + 1);
      os << (i + 1 < j.size() ? ",\n" : "\n");
    }
    os << close_pad << "]";
    return;
  }
  if (j.empty()) {
    os << "{}";
    return;
  }
  os << "{\n";
  std::size_t i = 0;
  for (const auto& [k, v] : j.items()) {
    os << pad << json(k).dump() << ": ";
    write_node(os, v, indent, depth + 1);
    os << (++i < j.size() ? ",\n" : "\n");
  }
  os << close_pad << "}";
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    out.push_back(cell);
  }
  return out;
}

double parse_cell(const std::string& s, const std::string& where) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw ConfigError(where, "not a number: '" + s + "'");
  return v;
}

}  // namespace

void write_json(std::ostream& os, const json& j, int indent) {
  write_node(os, j, indent, 0);
  os << "\n";
}

std::string dump_json(const json& j, int indent) {
  std::ostringstream os;
  write_json(os, j, indent);
  return os.str();
}

void write_states_csv(std::ostream& os, const RunRecord& rec, bool estimates) {
  os << "t";
  for (std::size_t i = 0; i < rec.n_agents; ++i)
    for (std::size_t c = 0; c < rec.state_dim; ++c) os << ",x" << i + 1 << "_" << c + 1;
  if (estimates)
    for (std::size_t i = 0; i < rec.n_agents; ++i)
      for (std::size_t c = 0; c < rec.state_dim; ++c) os << ",xhat" << i + 1 << "_" << c + 1;
  os << "\n";
  for (std::size_t k = 0; k < rec.samples(); ++k) {
    os << format_double(rec.times[k]);
    for (double v : rec.states[k]) os << "," << format_double(v);
    if (estimates)
      for (double v : rec.self_estimates[k]) os << "," << format_double(v);
    os << "\n";
  }
}

void write_events_csv(std::ostream& os, const RunRecord& rec) {
  os << "t,agent\n";
  for (const Event& e : rec.events) os << format_double(e.t) << "," << e.agent + 1 << "\n";
}

RunRecord read_record(std::istream& states, std::istream& events, const std::optional<Matrix>& P) {
  RunRecord rec;
  std::string line;
  if (!std::getline(states, line)) throw ConfigError("states.csv", "empty file");
  const auto header = split(line);
  if (header.empty() || header[0] != "t") throw ConfigError("states.csv", "first column must be 't'");
  std::size_t columns = 0;
  for (std::size_t c = 1; c < header.size(); ++c) {
    const std::string& h = header[c];
    if (h.size() < 4 || h[0] != 'x' || h.starts_with("xhat")) continue;
    const auto us = h.find('_');
    if (us == std::string::npos) throw ConfigError("states.csv", "bad column '" + h + "'");
    rec.n_agents = std::max<std::size_t>(rec.n_agents, std::stoul(h.substr(1, us - 1)));
    rec.state_dim = std::max<std::size_t>(rec.state_dim, std::stoul(h.substr(us + 1)));
    columns = c;
  }
  if (rec.n_agents == 0 || columns != rec.n_agents * rec.state_dim)
    throw ConfigError("states.csv", "expected columns x1_1 .. xN_n after 't'");

  std::size_t row = 1;
  while (std::getline(states, line)) {
    ++row;
    if (line.empty()) continue;
    const auto cells = split(line);
    const std::string where = "states.csv:" + std::to_string(row);
    if (cells.size() < columns + 1) throw ConfigError(where, "too few columns");
    rec.times.push_back(parse_cell(cells[0], where));
    Vector x(columns);
    for (std::size_t c = 0; c < columns; ++c) x[c] = parse_cell(cells[c + 1], where);
    rec.states.push_back(x);
    rec.self_estimates.push_back(std::move(x));
  }
  if (rec.times.size() >= 2) rec.step = rec.times[1] - rec.times[0];

  if (!std::getline(events, line)) line = "t,agent";  // an empty file means no events
  if (split(line) != std::vector<std::string>{"t", "agent"}) throw ConfigError("events.csv", "header must be 't,agent'");
  row = 1;
  rec.event_counts.assign(rec.n_agents, 0);
  while (std::getline(events, line)) {
    ++row;
    if (line.empty()) continue;
    const auto cells = split(line);
    const std::string where = "events.csv:" + std::to_string(row);
    if (cells.size() != 2) throw ConfigError(where, "expected t,agent");
    const double agent = parse_cell(cells[1], where);
    if (agent < 1 || agent > static_cast<double>(rec.n_agents) || agent != std::floor(agent))
      throw ConfigError(where, "agent out of range");
    const Event e{parse_cell(cells[0], where), 0, static_cast<std::size_t>(agent) - 1};
    rec.events.push_back(e);
    ++rec.event_counts[e.agent];
  }

  const Matrix weight = P ? *P : Matrix::identity(rec.state_dim);
  if (weight.rows() != rec.state_dim || weight.cols() != rec.state_dim)
    throw ConfigError("certificate.P", "dimension does not match states.csv");
  for (std::size_t k = 0; k < rec.samples(); ++k) {
    double V = 0.0, rsq = 0.0;
    for (std::size_t i = 1; i < rec.n_agents; ++i) {
      const Vector r = rec.r(k, i);
      V += quadratic_form(r, weight);
      rsq += squared_norm(r);
    }
    rec.V.push_back(V);
    rec.r_norm_sq_sum.push_back(rsq);
    rec.distance_sq.push_back(consensus_distance_sq(rec.states[k], rec.n_agents, rec.state_dim));
  }
  return rec;
}

json metrics_json(const MetricReport& m) {
  return {{"gamma", m.gamma},
          {"consensus_sum", m.consensus_sum},
          {"comm_count", m.comm_count},
          {"chi", m.chi},
          {"n_agents", m.n_agents},
          {"events_per_agent", m.events_per_agent},
          {"decay_rate", m.decay_rate}};
}

json zeno_json(const ZenoReport& z) {
  json agents = json::array();
  for (std::size_t i = 0; i < z.agents.size(); ++i) {
    const AgentZenoReport& a = z.agents[i];
    agents.push_back({{"agent", i + 1},
                      {"events", a.events},
                      {"min_inter_event", a.min_inter_event},
                      {"tau", a.tau},
                      {"w_max", a.w_max},
                      {"nu", a.nu},
                      {"satisfied", a.satisfied},
                      {"envelope_ok", a.envelope_ok},
                      {"worst_envelope_ratio", a.worst_envelope_ratio}});
  }
  return {{"lipschitz",
           {{"k", z.lipschitz.k},
            {"delta", z.lipschitz.delta},
            {"raw_k", z.lipschitz.raw_k},
            {"raw_delta", z.lipschitz.raw_delta}}},
          {"agents", agents},
          {"satisfied", z.satisfied},
          {"envelope_ok", z.envelope_ok}};
}

json cmf_json(const CmfReport& r) {
  return {{"holds", r.holds},
          {"worst_margin", r.worst_margin},
          {"worst_x", r.worst_x},
          {"worst_theta", r.worst_theta},
          {"points_checked", r.points_checked},
          {"kernel", r.kernel}};
}

namespace {

json matrix_json(const Matrix& m) {
  json rows = json::array();
  for (const Vector& r : m.to_rows()) rows.push_back(r);
  return rows;
}

}  // namespace

json summary_json(const Scenario& s, const RunRecord& rec, const MetricReport& m, const std::optional<ZenoReport>& zeno) {
  const Laplacian& lap = s.laplacian;
  const TriggerParams& p = s.params;
  const SimConfig& c = s.config;

  double tail_max = 0.0;
  const double tail_start = rec.times.empty() ? 0.0 : rec.times.back() - 5.0;
  for (std::size_t k = 0; k < rec.samples(); ++k)
    if (rec.times[k] >= tail_start - 1e-9) tail_max = std::max(tail_max, rec.distance_sq[k]);

  json bounds = {{"gain_condition_kappa1_min", c.certificate.rho / (2.0 * lap.mu)},
                 {"max_distance_sq_last_5s", tail_max}};
  if (p.variant == CtcVariant::practical)
    bounds["practical_consensus_bound"] = practical_consensus_bound(c.n_agents, p.xi, c.certificate.q, c.certificate.P);

  json derived = {{"laplacian", matrix_json(lap.L)},
                  {"mu", lap.mu},
                  {"lambda_max", lap.lambda_max},
                  {"epsilon", p.epsilon},
                  {"M", lap.M},
                  {"kappa", p.kappa},
                  {"b", p.b},
                  {"PBBtP", matrix_json(p.PBBtP)},
                  {"R_coeff", p.r_coeff},
                  {"Theta_coeff", p.theta_coeff},
                  {"S_coeff", p.s_coeff}};
  for (const char* key : {"R", "Theta", "S"}) derived[key] = json::array();
  for (std::size_t i = 0; i < p.n_agents(); ++i) {
    derived["R"].push_back(matrix_json(p.R[i]));
    derived["Theta"].push_back(matrix_json(p.Theta[i]));
    derived["S"].push_back(matrix_json(p.S[i]));
  }

  json run = {{"samples", rec.samples()},
              {"final_time", rec.times.empty() ? 0.0 : rec.times.back()},
              {"V_initial", rec.V.empty() ? 0.0 : rec.V.front()},
              {"V_final", rec.V.empty() ? 0.0 : rec.V.back()},
              {"estimator_synchrony", rec.estimator_synchrony}};
  if (rec.error) run["error"] = *rec.error;

  json out = {{"parameters", config_to_json(c)},
              {"derived", derived},
              {"bounds", bounds},
              {"metrics", metrics_json(m)},
              {"run", run}};
  if (zeno) out["zeno_guard"] = zeno_json(*zeno);
  return out;
}

RunResult run_and_report(const Scenario& s) {
  RunResult r;
  r.record = run(s);
  r.metrics = compute_metrics(r.record, s.config.chi);
  if (s.params.variant == CtcVariant::practical) {
    const LipschitzData lip = estimate_lipschitz(s.model, run_operating_grid(r.record));
    r.zeno = zeno_guard_report(r.record, s.params, lip);
  }
  r.summary = summary_json(s, r.record, r.metrics, r.zeno);
  return r;
}

void write_run(const std::string& dir, const Scenario& s, const RunRecord& rec, const json& summary) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  std::ofstream states(base / "states.csv");
  write_states_csv(states, rec, s.config.dump_estimates);
  std::ofstream events(base / "events.csv");
  write_events_csv(events, rec);
  std::ofstream sum(base / "summary.json");
  write_json(sum, summary);
  if (!states || !events || !sum) throw NumericsError("failed writing output files in '" + dir + "'");
}

void write_plotdata(const std::string& dir, const RunRecord& rec, std::size_t stride) {
  if (stride == 0) stride = 1;
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  std::ofstream series(base / "series.csv");
  series << "t";
  for (std::size_t i = 0; i < rec.n_agents; ++i)
    for (std::size_t c = 0; c < rec.state_dim; ++c) series << ",x" << i + 1 << "_" << c + 1;
  for (std::size_t i = 0; i < rec.n_agents; ++i) series << ",r" << i + 1;
  series << ",V,dist_sq\n";
  for (std::size_t k = 0; k < rec.samples(); ++k) {
    if (k % stride != 0 && k + 1 != rec.samples()) continue;
    series << format_double(rec.times[k]);
    for (double v : rec.states[k]) series << "," << format_double(v);
    for (std::size_t i = 0; i < rec.n_agents; ++i) series << "," << format_double(norm2(rec.r(k, i)));
    series << "," << format_double(rec.V[k]) << "," << format_double(rec.distance_sq[k]) << "\n";
  }
  std::ofstream raster(base / "raster.csv");
  write_events_csv(raster, rec);
}

}  // namespace etcons
