#include "etcons/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>
#include <sstream>

namespace etcons {

MetricReport compute_metrics(const RunRecord& record, double chi) {
  if (record.samples() == 0 || record.n_agents == 0) throw UsageError("compute_metrics: empty record");
  MetricReport m;
  m.chi = chi;
  m.n_agents = record.n_agents;
  const double N = static_cast<double>(record.n_agents);

  double sum = 0.0;
  for (std::size_t k = 0; k < record.samples(); ++k)
    for (std::size_t i = 0; i < record.n_agents; ++i) sum += norm2(record.r(k, i));
  m.consensus_sum = sum / N;

  m.events_per_agent.assign(record.n_agents, 0);
  for (const Event& e : record.events) ++m.events_per_agent[e.agent];
  m.comm_count = record.events.size();
  m.gamma = m.consensus_sum + chi * static_cast<double>(m.comm_count) / N;
  m.decay_rate = fit_decay_rate(record);
  return m;
}

double fit_decay_rate(std::span<const double> times, std::span<const double> V) {
  const std::size_t total = std::min(times.size(), V.size());
  std::size_t len = (total + 1) / 2;
  for (std::size_t k = 0; k < len; ++k)
    if (!(V[k] > 0.0)) {
      len = k;
      break;
    }
  if (len < 2) return 0.0;

  // Work with log(V/V₀) so that a constant series gives an exact zero slope.
  const double log0 = std::log(V[0]);
  auto y = [&](std::size_t k) { return std::log(V[k]) - log0; };
  double mt = 0.0, my = 0.0;
  for (std::size_t k = 0; k < len; ++k) {
    mt += times[k];
    my += y(k);
  }
  mt /= static_cast<double>(len);
  my /= static_cast<double>(len);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t k = 0; k < len; ++k) {
    const double dt = times[k] - mt;
    sxy += dt * (y(k) - my);
    sxx += dt * dt;
  }
  if (sxx == 0.0) return 0.0;
  const double rate = -sxy / sxx;
  return rate == 0.0 ? 0.0 : rate;  // avoid printing -0
}

double fit_decay_rate(const RunRecord& record) { return fit_decay_rate(record.times, record.V); }

namespace {

std::string fmt(double v, int decimals) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
  return buf;
}

using Key = std::pair<std::string, double>;

std::string one_table(const std::string& title, const std::vector<TableCell>& cells, const std::set<double>& durations,
                      std::string (*value)(const MetricReport&)) {
  std::map<Key, std::map<double, const MetricReport*>> rows;
  for (const TableCell& c : cells) rows[{c.ctc, -c.theta_hat}][c.duration] = &c.report;

  std::ostringstream os;
  os << "### " << title << "\n\n| CTC | theta_hat |";
  for (double d : durations) os << " T = " << fmt(d, 0) << " s |";
  os << "\n|---|---|";
  for (std::size_t i = 0; i < durations.size(); ++i) os << "---|";
  os << "\n";
  for (const auto& [key, by_duration] : rows) {
    os << "| " << key.first << " | " << fmt(-key.second, 2) << " |";
    for (double d : durations) {
      auto it = by_duration.find(d);
      os << " " << (it == by_duration.end() ? std::string("-") : value(*it->second)) << " |";
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace

std::string tables_markdown(const std::vector<TableCell>& cells) {
  std::set<double> durations;
  for (const TableCell& c : cells) durations.insert(c.duration);
  std::ostringstream os;
  os << one_table("Performance index Gamma", cells, durations,
                  [](const MetricReport& m) { return fmt(m.gamma, 1); })
     << "\n"
     << one_table("Consensus error sum", cells, durations,
                  [](const MetricReport& m) { return fmt(m.consensus_sum, 1); })
     << "\n"
     << one_table("Communication count", cells, durations,
                  [](const MetricReport& m) { return std::to_string(m.comm_count); });
  return os.str();
}

}  // namespace etcons
