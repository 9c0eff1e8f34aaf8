// Command-line front end: run, sweep, check-cmf, metrics, plotdata.
#include <CLI11.hpp>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <mutex>
#include <numbers>
#include <thread>

#include "etcons/config.hpp"
#include "etcons/kernels.hpp"
#include "etcons/output.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace etcons;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerics = 3;
constexpr std::size_t kSweepLimit = 10000;

struct Source {
  std::string config;
  std::string preset;
  std::string integrator;
  double duration = -1.0;

  void attach(CLI::App* cmd) {
    auto* c = cmd->add_option("--config", config, "JSON scenario file");
    auto* p = cmd->add_option("--preset", preset, "built-in scenario")->check(CLI::IsMember(preset_names()));
    c->excludes(p);
    cmd->add_option("--integrator", integrator, "euler or rk4")->check(CLI::IsMember({"euler", "rk4"}));
    cmd->add_option("--duration", duration, "override the simulated time in seconds");
  }

  // The scenario as JSON, before validation, so sweeps can patch it.
  json document() const {
    json j;
    if (!config.empty()) {
      std::ifstream in(config);
      if (!in) throw ConfigError("", "cannot open config file '" + config + "'");
      try {
        j = json::parse(in);
      } catch (const json::exception& e) {
        throw ConfigError("", "malformed JSON in '" + config + "': " + e.what());
      }
    } else if (!preset.empty()) {
      j = config_to_json(etcons::preset(preset));
    } else {
      throw ConfigError("", "one of --config or --preset is required");
    }
    if (!integrator.empty()) j["integrator"] = integrator;
    if (duration >= 0.0) j["duration"] = duration;
    return j;
  }

  SimConfig load() const { return parse_and_validate(document()); }
};

void print_json(const json& j) { std::cout << dump_json(j); }

int cmd_run(const Source& src, const std::string& out) {
  const Scenario s = prepare(src.load());
  try {
    RunResult r = run_and_report(s);
    write_run(out, s, r.record, r.summary);
    print_json({{"out", out}, {"metrics", metrics_json(r.metrics)}});
    if (r.zeno) print_json({{"zeno_guard_satisfied", r.zeno->satisfied}});
    return kExitOk;
  } catch (const SimulationError& e) {
    const RunRecord& partial = *e.partial();
    const MetricReport m = compute_metrics(partial, s.config.chi);
    write_run(out, s, partial, summary_json(s, partial, m, std::nullopt));
    throw;
  }
}

struct Axis {
  std::string path;
  std::vector<json> values;
};

// "path=v1|v2|..." with JSON values; an empty path merge-patches objects into the root.
Axis parse_axis(const std::string& text) {
  const auto eq = text.find('=');
  if (eq == std::string::npos) throw ConfigError("--axis", "expected path=value|value|...");
  Axis a{text.substr(0, eq), {}};
  std::string rest = text.substr(eq + 1);
  std::size_t pos = 0;
  while (pos <= rest.size()) {
    const auto bar = rest.find('|', pos);
    const std::string item = rest.substr(pos, bar == std::string::npos ? std::string::npos : bar - pos);
    try {
      a.values.push_back(json::parse(item));
    } catch (const json::exception&) {
      a.values.push_back(item);  // bare words such as practical
    }
    if (bar == std::string::npos) break;
    pos = bar + 1;
  }
  return a;
}

// Four presets × {10 s, 30 s}: the full comparison grid.
std::vector<Axis> paper_grid_axes() {
  Axis cell{"", {}};
  for (const char* ctc : {"asymptotic", "practical"})
    for (double th : {0.40, 0.35}) {
      const bool asym = std::string(ctc) == "asymptotic";
      cell.values.push_back({{"model", {{"theta_hat", {th}}}}, {"trigger", {{"ctc", ctc}, {"xi", asym ? 0.0 : 20.0}}}});
    }
  return {cell, Axis{"duration", {10.0, 30.0}}};
}

json sweep_spec_axes(const std::string& path, std::vector<Axis>& axes) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--spec", "cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw ConfigError("--spec", e.what());
  }
  if (!j.contains("axes") || !j["axes"].is_array()) throw ConfigError("--spec.axes", "expected an array");
  for (std::size_t i = 0; i < j["axes"].size(); ++i) {
    const json& a = j["axes"][i];
    if (!a.contains("values") || !a["values"].is_array() || a["values"].empty())
      throw ConfigError("--spec.axes[" + std::to_string(i) + "].values", "expected a non-empty array");
    axes.push_back({a.value("path", std::string()), a["values"].get<std::vector<json>>()});
  }
  return j;
}

int cmd_sweep(const Source& src, const std::string& out, const std::vector<std::string>& axis_text,
              const std::string& spec, bool paper_grid, unsigned jobs, bool allow_large) {
  std::vector<Axis> axes;
  if (paper_grid) axes = paper_grid_axes();
  if (!spec.empty()) sweep_spec_axes(spec, axes);
  for (const auto& t : axis_text) axes.push_back(parse_axis(t));
  if (axes.empty()) throw ConfigError("sweep", "no axes given (use --axis, --spec or --paper-grid)");

  std::size_t total = 1;
  for (const Axis& a : axes) {
    if (a.values.empty()) throw ConfigError("sweep", "axis '" + a.path + "' has no values");
    if (total > kSweepLimit * 100 / a.values.size() + 1) {
      total = kSweepLimit * 100;  // saturate; far beyond the limit anyway
      continue;
    }
    total *= a.values.size();
  }
  if (total > kSweepLimit && !allow_large)
    throw ConfigError("sweep", std::to_string(total) + " points exceed the limit of " + std::to_string(kSweepLimit) +
                                   " (pass --allow-large to proceed)");

  // Build and validate every configuration before running any of them.
  const json base = src.document();
  std::vector<Scenario> scenarios;
  std::vector<json> overrides;
  for (std::size_t idx = 0; idx < total; ++idx) {
    json cfg = base;
    json applied = json::array();
    std::size_t rem = idx;
    for (std::size_t a = axes.size(); a-- > 0;) {
      const json& v = axes[a].values[rem % axes[a].values.size()];
      rem /= axes[a].values.size();
      applied.insert(applied.begin(), json{{"path", axes[a].path}, {"value", v}});
    }
    for (const json& o : applied) apply_override(cfg, o["path"].get<std::string>(), o["value"]);
    try {
      scenarios.push_back(prepare(parse_and_validate(cfg)));
    } catch (const ConfigError& e) {
      throw ConfigError("sweep point " + std::to_string(idx), e.what());
    }
    overrides.push_back(applied);
  }

  std::vector<std::optional<RunResult>> results(total);
  std::vector<std::string> errors(total);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < total; i = next++) {
      char name[32];
      std::snprintf(name, sizeof name, "point-%04zu", i);
      const std::string dir = (fs::path(out) / name).string();
      const Scenario& s = scenarios[i];
      try {
        RunResult r = run_and_report(s);
        write_run(dir, s, r.record, r.summary);
        results[i] = std::move(r);
      } catch (const SimulationError& e) {
        const RunRecord& p = *e.partial();
        write_run(dir, s, p, summary_json(s, p, compute_metrics(p, s.config.chi), std::nullopt));
        errors[i] = e.what();
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(total)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < jobs; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  json manifest = json::array();
  std::vector<TableCell> cells;
  bool failed = false;
  for (std::size_t i = 0; i < total; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "point-%04zu", i);
    json entry = {{"dir", name}, {"overrides", overrides[i]}};
    if (results[i]) {
      entry["metrics"] = metrics_json(results[i]->metrics);
      const SimConfig& c = scenarios[i].config;
      cells.push_back({std::string(to_string(c.trigger.variant)), c.theta_hat.empty() ? 0.0 : c.theta_hat[0],
                       c.duration, results[i]->metrics});
    } else {
      entry["error"] = errors[i];
      failed = true;
    }
    manifest.push_back(entry);
  }
  fs::create_directories(out);
  std::ofstream(fs::path(out) / "sweep.json") << dump_json({{"points", manifest}});
  std::ofstream(fs::path(out) / "tables.md") << tables_markdown(cells);
  std::cout << tables_markdown(cells);
  return failed ? kExitNumerics : kExitOk;
}

int cmd_check_cmf(const Source& src, double grid_step, std::optional<double> q, std::optional<double> rho,
                  std::optional<double> lower, std::optional<double> upper, const std::string& out, bool strict) {
  json doc = src.document();
  SimConfig c = config_from_json(doc);
  const SystemModel model = make_model(c.model, c.theta, c.theta_hat);
  CmfCertificate cert = c.certificate;
  if (q) cert.q = *q;
  if (rho) cert.rho = *rho;
  if (!(grid_step > 0.0)) throw ConfigError("--grid-step", "must be positive");
  const double lo = lower.value_or(-std::numbers::pi), hi = upper.value_or(std::numbers::pi);
  if (!(hi > lo)) throw ConfigError("--upper", "must exceed --lower");
  const StateGrid grid =
      StateGrid::stepped(Vector(model.state_dim, lo), Vector(model.state_dim, hi), grid_step);

  json report = {{"P", json::array()}, {"rho", cert.rho}, {"q", cert.q}, {"grid_step", grid_step},
                 {"lower", lo},         {"upper", hi},     {"cases", json::array()}};
  for (const Vector& r : cert.P.to_rows()) report["P"].push_back(r);
  bool all = true;
  std::vector<std::pair<std::string, Vector>> thetas = {{"theta", c.theta}, {"theta_hat", c.theta_hat}};
  for (const auto& [label, theta] : thetas) {
    const CmfReport r = check_cmf(model, cert, grid, {theta});
    json entry = cmf_json(r);
    entry["parameter"] = label;
    report["cases"].push_back(entry);
    all = all && r.holds;
  }
  report["holds"] = all;
  if (!out.empty()) std::ofstream(out) << dump_json(report);
  print_json(report);
  return strict && !all ? 1 : kExitOk;
}

std::optional<Matrix> summary_P(const fs::path& dir, double& chi) {
  std::ifstream in(dir / "summary.json");
  if (!in) return std::nullopt;
  try {
    const json s = json::parse(in);
    const SimConfig c = config_from_json(s.at("parameters"));
    chi = c.chi;
    return c.certificate.P;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

RunRecord read_dir(const fs::path& dir, double& chi, bool& used_P) {
  std::ifstream states(dir / "states.csv");
  if (!states) throw ConfigError("--dir", "no states.csv in '" + dir.string() + "'");
  std::ifstream events(dir / "events.csv");
  std::istringstream none;
  const std::optional<Matrix> P = summary_P(dir, chi);
  used_P = P.has_value();
  return read_record(states, events ? static_cast<std::istream&>(events) : none, P);
}

int cmd_metrics(const std::string& dir, std::optional<double> chi_opt) {
  double chi = 0.1;
  bool used_P = false;
  const RunRecord rec = read_dir(dir, chi, used_P);
  if (chi_opt) chi = *chi_opt;
  const MetricReport m = compute_metrics(rec, chi);
  json out = metrics_json(m);
  out["V_weight"] = used_P ? "certificate.P" : "identity";
  print_json(out);
  std::cout << "\n" << tables_markdown({{"run", 0.0, rec.times.empty() ? 0.0 : rec.times.back(), m}});
  return kExitOk;
}

int cmd_plotdata(const Source& src, const std::string& dir, const std::string& out, std::size_t stride) {
  if (!dir.empty()) {
    double chi = 0.1;
    bool used_P = false;
    write_plotdata(out, read_dir(dir, chi, used_P), stride);
  } else {
    const Scenario s = prepare(src.load());
    write_plotdata(out, run(s), stride);
  }
  print_json({{"out", out}, {"files", {"series.csv", "raster.csv"}}});
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Event-triggered leader-follower consensus simulator"};
  app.require_subcommand(1);

  Source src;
  std::string out = "out";

  auto* run = app.add_subcommand("run", "simulate one scenario and write states.csv, events.csv, summary.json");
  src.attach(run);
  run->add_option("--out", out, "output directory");

  auto* sweep = app.add_subcommand("sweep", "cartesian grid of overrides, one subdirectory per point");
  Source sweep_src;
  sweep_src.attach(sweep);
  std::string sweep_out = "sweep";
  std::vector<std::string> axes;
  std::string spec;
  bool paper_grid = false, allow_large = false;
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  sweep->add_option("--out", sweep_out, "output directory");
  sweep->add_option("--axis", axes, "path=v1|v2|... (JSON values)");
  sweep->add_option("--spec", spec, "JSON file with {\"axes\": [{\"path\", \"values\"}]}");
  sweep->add_flag("--paper-grid", paper_grid, "CTC x theta_hat x {10 s, 30 s}");
  sweep->add_option("--jobs", jobs, "parallel runs")->check(CLI::PositiveNumber);
  sweep->add_flag("--allow-large", allow_large, "permit more than 10^4 points");

  auto* cmf = app.add_subcommand("check-cmf", "verify the contraction certificate on a state grid");
  Source cmf_src;
  cmf_src.attach(cmf);
  double grid_step = 0.05;
  std::optional<double> q, rho, lower, upper;
  std::string cmf_out;
  bool strict = false;
  cmf->add_option("--grid-step", grid_step, "grid spacing per axis");
  cmf->add_option("--q", q, "override q");
  cmf->add_option("--rho", rho, "override rho");
  cmf->add_option("--lower", lower, "grid lower bound per axis (default -pi)");
  cmf->add_option("--upper", upper, "grid upper bound per axis (default pi)");
  cmf->add_option("--out", cmf_out, "also write the report here");
  cmf->add_flag("--strict", strict, "exit 1 when the condition fails");

  auto* metrics = app.add_subcommand("metrics", "recompute metrics from states.csv and events.csv");
  std::string metrics_dir = ".";
  std::optional<double> chi;
  metrics->add_option("--dir", metrics_dir, "run directory");
  metrics->add_option("--chi", chi, "communication weight (default from summary.json, else 0.1)");

  auto* plot = app.add_subcommand("plotdata", "downsampled series and event raster as CSV");
  Source plot_src;
  plot_src.attach(plot);
  std::string plot_dir, plot_out = "plot";
  std::size_t stride = 10;
  plot->add_option("--dir", plot_dir, "read an existing run instead of simulating");
  plot->add_option("--out", plot_out, "output directory");
  plot->add_option("--stride", stride, "keep every k-th sample")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run) return cmd_run(src, out);
    if (*sweep) return cmd_sweep(sweep_src, sweep_out, axes, spec, paper_grid, jobs, allow_large);
    if (*cmf) return cmd_check_cmf(cmf_src, grid_step, q, rho, lower, upper, cmf_out, strict);
    if (*metrics) return cmd_metrics(metrics_dir, chi);
    if (*plot) return cmd_plotdata(plot_src, plot_dir, plot_out, stride);
  } catch (const NumericsError& e) {
    std::cerr << "numerics error: " << e.what() << "\n";
    return kExitNumerics;
  } catch (const Error& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  }
  return kExitOk;
}
