#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "etcons/simulator.hpp"

namespace etcons {

struct MetricReport {
  double gamma = 0.0;
  double consensus_sum = 0.0;  // (1/N) Σₖ Σᵢ |rᵢ(k)|
  std::size_t comm_count = 0;  // Σₖ Σᵢ vᵢ(k)
  double chi = 0.0;
  std::size_t n_agents = 0;
  std::vector<std::size_t> events_per_agent;
  double decay_rate = 0.0;
};

// Γ = (1/N) Σₖ Σᵢ (|rᵢ(k)| + χ vᵢ(k)). Throws UsageError on an empty record.
MetricReport compute_metrics(const RunRecord& record, double chi);

// −slope of the least-squares line through (t, log V) over the first half of the
// samples, cut at the first V ≤ 0. Returns 0 when fewer than two points remain.
double fit_decay_rate(std::span<const double> times, std::span<const double> V);
double fit_decay_rate(const RunRecord& record);

// One cell of the comparison tables: CTC variant × θ̂ × duration.
struct TableCell {
  std::string ctc;  // "asymptotic" or "practical"
  double theta_hat = 0.0;
  double duration = 0.0;
  MetricReport report;
};

// Markdown rendering of the Γ, consensus-sum and communication-count tables.
// Rows are (CTC, θ̂), columns are durations; missing cells print as "-".
std::string tables_markdown(const std::vector<TableCell>& cells);

}  // namespace etcons
