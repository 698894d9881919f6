#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "network.h"
#include "topology.h"

namespace acpsim {

// Configuration problem tied to a config line; line 0 means the config as a
// whole (cross-field validation).
struct ScenarioError : std::runtime_error {
  int line;
  ScenarioError(int line_, const std::string& msg);
};

struct IoError : std::runtime_error {
  explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

struct TrafficPhase {
  double active_from_s = 0.0;
  std::vector<std::pair<std::string, std::string>> pairs;  // directed initiator -> responder
  std::string generator;  // "four_hop_pairs" | "cross_left_right" | ""
  int line = 0;
};

struct NamedNode {
  std::string name;
  int line = 0;
};

struct ExplicitLink {
  std::string a, b;
  double length_km = 0.0;
  int line = 0;
};

struct ScenarioConfig {
  Strategy strategy = Strategy::kOdo;
  bool purification = false;
  SelectionPolicy selection = SelectionPolicy::kFreshest;
  double duration_s = 10.0;
  std::uint64_t seed = 1;
  double arrival_rate_hz = 1.0;
  double summary_window_s = 5.0;

  std::string topology_kind = "two_node";
  double link_distance_km = 10.0;
  std::uint64_t as_seed = 1;
  std::vector<NamedNode> explicit_nodes;
  std::vector<ExplicitLink> explicit_links;

  NetParams params;
  std::vector<TrafficPhase> traffic;
};

// Parses the ini-style config. Unknown sections or keys, malformed values,
// and inconsistent combinations are reported with their line number.
ScenarioConfig parse_scenario_text(const std::string& text);
ScenarioConfig parse_scenario_file(const std::string& path);

Graph build_topology(const ScenarioConfig& cfg);

struct RequestRow {
  std::uint64_t id = 0;
  std::string initiator, responder;
  double arrival_s = 0.0;
  double start_s = 0.0;
  bool served = false;
  double tts_ms = 0.0;
  double fidelity = 0.0;
  int path_hops = 0;
};

// Aggregates over requests bucketed by arrival time.
struct SummaryWindow {
  double window_start_s = 0.0;
  double window_end_s = 0.0;
  int arrivals = 0;
  int served = 0;
  double mean_tts_ms = 0.0;
  double mean_fidelity = 0.0;
  double served_fraction = 0.0;
};

struct ScenarioResult {
  Strategy strategy = Strategy::kOdo;
  std::vector<RequestRow> rows;  // ascending request id
  std::vector<SummaryWindow> windows;
  std::uint64_t generated = 0;
  std::uint64_t served_count = 0;
  double mean_tts_ms = 0.0;    // over served requests
  double mean_fidelity = 0.0;  // over served requests
  InvariantCounters invariants;
  EpAudit audit;
  std::uint64_t trace_digest = 0;
};

ScenarioResult run_scenario(const ScenarioConfig& cfg);

void write_requests_csv(const ScenarioResult& r, std::ostream& out);
void write_summary_csv(const ScenarioResult& r, std::ostream& out);

// One key=value entry per line: the effective run configuration.
std::string describe(const ScenarioConfig& cfg);

}  // namespace acpsim
