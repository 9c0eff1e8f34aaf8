#pragma once

#include <json.hpp>
#include <iosfwd>
#include <optional>
#include <string>

#include "etcons/metrics.hpp"
#include "etcons/simulator.hpp"

namespace etcons {

// Shortest faithful text for a double: 17 significant digits, "%.17g" style.
std::string format_double(double v);

// JSON writer that prints every floating-point number with 17 significant digits.
void write_json(std::ostream& os, const nlohmann::json& j, int indent = 2);
std::string dump_json(const nlohmann::json& j, int indent = 2);

// t, x1_1, ..., xN_n; with `estimates`, xhat1_1, ..., xhatN_n follow.
void write_states_csv(std::ostream& os, const RunRecord& record, bool estimates = false);
// t, agent (1-based), one row per broadcast in time order.
void write_events_csv(std::ostream& os, const RunRecord& record);

// Rebuilds times, states and events from the two CSV files. V is recomputed with
// P when it is given. Throws ConfigError on malformed input.
RunRecord read_record(std::istream& states_csv, std::istream& events_csv, const std::optional<Matrix>& P);

nlohmann::json metrics_json(const MetricReport& m);
nlohmann::json zeno_json(const ZenoReport& z);
nlohmann::json cmf_json(const CmfReport& r);

// Parameters, derived matrices, bounds, metrics and (for practical runs) the Zeno report.
nlohmann::json summary_json(const Scenario& scenario, const RunRecord& record, const MetricReport& metrics,
                            const std::optional<ZenoReport>& zeno);

struct RunResult {
  RunRecord record;
  MetricReport metrics;
  std::optional<ZenoReport> zeno;  // practical CTC only
  nlohmann::json summary;
};

// run() plus metrics, the Zeno guard (practical CTC) and the summary document.
// A SimulationError still propagates; its partial record is left for the caller.
RunResult run_and_report(const Scenario& scenario);

// Writes states.csv, events.csv and summary.json into `dir` (created if missing).
void write_run(const std::string& dir, const Scenario& scenario, const RunRecord& record, const nlohmann::json& summary);

// Plot-ready series, keeping every `stride`-th sample plus the last:
//   series.csv   t, x1_1 ... xN_n, r1 ... rN (|rᵢ|), V, dist_sq
//   raster.csv   t, agent: one row per event
void write_plotdata(const std::string& dir, const RunRecord& record, std::size_t stride);

}  // namespace etcons
