#include "scenario.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

namespace acpsim {

ScenarioError::ScenarioError(int line_, const std::string& msg)
    : std::runtime_error(line_ > 0 ? "line " + std::to_string(line_) + ": " + msg : msg),
      line(line_) {}

namespace {

std::string trim(const std::string& s) {
  std::size_t b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  std::size_t e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& v, int line) {
  try {
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ScenarioError(line, "expected a number, got '" + v + "'");
  }
}

std::uint64_t to_u64(const std::string& v, int line) {
  try {
    std::size_t pos = 0;
    unsigned long long u = std::stoull(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return u;
  } catch (const std::exception&) {
    throw ScenarioError(line, "expected a non-negative integer, got '" + v + "'");
  }
}

int to_count(const std::string& v, int line) {
  std::uint64_t u = to_u64(v, line);
  if (u > 1000000) throw ScenarioError(line, "value out of range: '" + v + "'");
  return static_cast<int>(u);
}

double to_positive(const std::string& v, int line) {
  double d = to_double(v, line);
  if (!(d > 0.0)) throw ScenarioError(line, "expected a positive number, got '" + v + "'");
  return d;
}

double to_unit(const std::string& v, int line) {
  double d = to_double(v, line);
  if (d < 0.0 || d > 1.0) throw ScenarioError(line, "expected a value in [0, 1], got '" + v + "'");
  return d;
}

bool to_on_off(const std::string& v, int line) {
  if (v == "on") return true;
  if (v == "off") return false;
  throw ScenarioError(line, "expected on or off, got '" + v + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

struct ParseState {
  ScenarioConfig cfg;
  int purification_line = 0;
  int pauli_line = 0;
  int duration_line = 0;
  int kind_line = 0;
};

void scenario_key(ParseState& st, const std::string& key, const std::string& value, int line) {
  ScenarioConfig& cfg = st.cfg;
  if (key == "strategy") {
    if (value == "odo")
      cfg.strategy = Strategy::kOdo;
    else if (value == "ucp")
      cfg.strategy = Strategy::kUcp;
    else if (value == "acp")
      cfg.strategy = Strategy::kAcp;
    else
      throw ScenarioError(line, "unknown strategy '" + value + "'");
  } else if (key == "purification") {
    cfg.purification = to_on_off(value, line);
    st.purification_line = line;
  } else if (key == "selection_policy") {
    if (value == "freshest")
      cfg.selection = SelectionPolicy::kFreshest;
    else if (value == "random")
      cfg.selection = SelectionPolicy::kRandom;
    else
      throw ScenarioError(line, "unknown selection_policy '" + value + "'");
  } else if (key == "duration_s") {
    cfg.duration_s = to_positive(value, line);
    st.duration_line = line;
  } else if (key == "seed") {
    cfg.seed = to_u64(value, line);
  } else if (key == "arrival_rate_hz") {
    cfg.arrival_rate_hz = to_positive(value, line);
  } else {
    throw ScenarioError(line, "unknown key '" + key + "' in [scenario]");
  }
}

void topology_key(ParseState& st, const std::string& key, const std::string& value, int line) {
  ScenarioConfig& cfg = st.cfg;
  if (key == "kind") {
    cfg.topology_kind = value;
    st.kind_line = line;
  } else if (key == "link_distance_km") {
    cfg.link_distance_km = to_positive(value, line);
  } else if (key == "as_seed") {
    cfg.as_seed = to_u64(value, line);
  } else if (key == "node") {
    cfg.explicit_nodes.push_back(NamedNode{value, line});
  } else if (key == "link") {
    std::vector<std::string> parts = split(value, ':');
    if (parts.size() != 3 || parts[0].empty() || parts[1].empty())
      throw ScenarioError(line, "expected link = a:b:length_km");
    cfg.explicit_links.push_back(
        ExplicitLink{parts[0], parts[1], to_positive(parts[2], line), line});
  } else {
    throw ScenarioError(line, "unknown key '" + key + "' in [topology]");
  }
}

void params_key(ParseState& st, const std::string& key, const std::string& value, int line) {
  NetParams& p = st.cfg.params;
  HardwareParams& hw = p.hw;
  if (key == "initial_fidelity") hw.initial_fidelity = to_unit(value, line);
  else if (key == "pauli_x") { hw.pauli.px = to_unit(value, line); st.pauli_line = line; }
  else if (key == "pauli_y") { hw.pauli.py = to_unit(value, line); st.pauli_line = line; }
  else if (key == "pauli_z") { hw.pauli.pz = to_unit(value, line); st.pauli_line = line; }
  else if (key == "coherence_time_s") hw.coherence_time_s = to_positive(value, line);
  else if (key == "memory_efficiency") hw.memory_efficiency = to_unit(value, line);
  else if (key == "detector_efficiency") hw.detector_efficiency = to_unit(value, line);
  else if (key == "bsm_success_rate") hw.bsm_success_rate = to_unit(value, line);
  else if (key == "fiber_attenuation_db_per_km") hw.fiber_attenuation_db_per_km = to_double(value, line);
  else if (key == "light_speed_m_per_s") hw.light_speed_m_per_s = to_positive(value, line);
  else if (key == "forward_delay_s") hw.forward_delay_s = to_double(value, line);
  else if (key == "end_process_delay_s") hw.end_process_delay_s = to_double(value, line);
  else if (key == "emission_period_s") hw.emission_period_s = to_positive(value, line);
  else if (key == "gate_fidelity") hw.noise.gate_fidelity = to_unit(value, line);
  else if (key == "measure_fidelity") hw.noise.measure_fidelity = to_unit(value, line);
  else if (key == "swap_success_rate") hw.swap_success_rate = to_unit(value, line);
  else if (key == "memories_per_node") p.memories_per_node = to_count(value, line);
  else if (key == "max_memory_acp") p.max_memory_acp = to_count(value, line);
  else if (key == "delta") p.delta = to_positive(value, line);
  else if (key == "sleep_base_s") p.sleep_base_s = to_positive(value, line);
  else if (key == "acp_ttl_s") p.acp_ttl_s = to_positive(value, line);
  else if (key == "acp_pending_timeout_s") p.acp_pending_timeout_s = to_positive(value, line);
  else if (key == "request_start_offset_s") p.request_start_offset_s = to_double(value, line);
  else if (key == "request_window_s") p.request_window_s = to_positive(value, line);
  else if (key == "summary_window_s") st.cfg.summary_window_s = to_positive(value, line);
  else throw ScenarioError(line, "unknown key '" + key + "' in [params]");
}

void traffic_key(TrafficPhase& ph, const std::string& key, const std::string& value, int line) {
  if (key == "active_from_s") {
    ph.active_from_s = to_double(value, line);
    if (ph.active_from_s < 0.0) throw ScenarioError(line, "active_from_s must be >= 0");
  } else if (key == "pairs") {
    for (const std::string& item : split(value, ',')) {
      std::vector<std::string> ends = split(item, ':');
      if (ends.size() != 2 || ends[0].empty() || ends[1].empty())
        throw ScenarioError(line, "expected pairs = a:b, c:d, ...");
      ph.pairs.emplace_back(ends[0], ends[1]);
    }
  } else if (key == "generator") {
    if (value != "four_hop_pairs" && value != "cross_left_right")
      throw ScenarioError(line, "unknown generator '" + value + "'");
    ph.generator = value;
  } else {
    throw ScenarioError(line, "unknown key '" + key + "' in [traffic]");
  }
}

void finalize(ParseState& st) {
  ScenarioConfig& cfg = st.cfg;
  if (cfg.strategy == Strategy::kOdo && cfg.purification)
    throw ScenarioError(st.purification_line,
                        "purification requires a continuous strategy (ucp or acp)");
  double psum = cfg.params.hw.pauli.px + cfg.params.hw.pauli.py + cfg.params.hw.pauli.pz;
  if (std::abs(psum - 1.0) > 1e-9)
    throw ScenarioError(st.pauli_line, "pauli_x + pauli_y + pauli_z must equal 1");
  if (cfg.params.memories_per_node < 1 || cfg.params.max_memory_acp < 0 ||
      cfg.params.max_memory_acp > cfg.params.memories_per_node)
    throw ScenarioError(0, "memory split is inconsistent");

  const std::string& kind = cfg.topology_kind;
  bool builtin = kind == "two_node" || kind == "bottleneck20" || kind == "as_graph";
  if (!builtin && kind != "explicit")
    throw ScenarioError(st.kind_line, "unknown topology kind '" + kind + "'");
  if (builtin && !cfg.explicit_nodes.empty())
    throw ScenarioError(cfg.explicit_nodes.front().line,
                        "node lists are only valid with kind = explicit");
  if (builtin && !cfg.explicit_links.empty())
    throw ScenarioError(cfg.explicit_links.front().line,
                        "link lists are only valid with kind = explicit");
  if (!builtin && (cfg.explicit_nodes.size() < 2 || cfg.explicit_links.empty()))
    throw ScenarioError(st.kind_line, "explicit topology needs nodes and links");

  if (cfg.traffic.empty()) throw ScenarioError(0, "at least one [traffic] section is required");
  std::stable_sort(cfg.traffic.begin(), cfg.traffic.end(),
                   [](const TrafficPhase& a, const TrafficPhase& b) {
                     return a.active_from_s < b.active_from_s;
                   });
  for (const TrafficPhase& ph : cfg.traffic) {
    bool has_pairs = !ph.pairs.empty();
    bool has_gen = !ph.generator.empty();
    if (has_pairs == has_gen)
      throw ScenarioError(ph.line, "a traffic section needs either pairs or generator");
    if (ph.generator == "cross_left_right" && kind != "bottleneck20")
      throw ScenarioError(ph.line, "cross_left_right only applies to bottleneck20");
  }
  if (cfg.traffic.front().active_from_s != 0.0)
    throw ScenarioError(cfg.traffic.front().line, "the first traffic matrix must start at 0");
  for (std::size_t i = 1; i < cfg.traffic.size(); ++i)
    if (cfg.traffic[i].active_from_s == cfg.traffic[i - 1].active_from_s)
      throw ScenarioError(cfg.traffic[i].line, "duplicate active_from_s");
}

}  // namespace

ScenarioConfig parse_scenario_text(const std::string& text) {
  ParseState st;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  std::string section;
  while (std::getline(in, raw)) {
    ++lineno;
    std::size_t hash = raw.find('#');
    if (hash != std::string::npos) raw.erase(hash);
    std::string line = trim(raw);
    if (line.empty() || line[0] == ';') continue;
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3)
        throw ScenarioError(lineno, "malformed section header");
      section = line.substr(1, line.size() - 2);
      if (section == "traffic") {
        st.cfg.traffic.emplace_back();
        st.cfg.traffic.back().line = lineno;
      } else if (section != "scenario" && section != "topology" && section != "params") {
        throw ScenarioError(lineno, "unknown section [" + section + "]");
      }
      continue;
    }
    std::size_t eq = line.find('=');
    if (eq == std::string::npos) throw ScenarioError(lineno, "expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw ScenarioError(lineno, "expected key = value");
    if (section.empty()) throw ScenarioError(lineno, "key outside any section");
    if (section == "scenario")
      scenario_key(st, key, value, lineno);
    else if (section == "topology")
      topology_key(st, key, value, lineno);
    else if (section == "params")
      params_key(st, key, value, lineno);
    else
      traffic_key(st.cfg.traffic.back(), key, value, lineno);
  }
  finalize(st);
  return st.cfg;
}

ScenarioConfig parse_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file: " + path);
  std::ostringstream body;
  body << in.rdbuf();
  return parse_scenario_text(body.str());
}

Graph build_topology(const ScenarioConfig& cfg) {
  if (cfg.topology_kind == "two_node") return build_two_node(cfg.link_distance_km);
  if (cfg.topology_kind == "bottleneck20") return build_bottleneck20(cfg.link_distance_km);
  if (cfg.topology_kind == "as_graph") return build_as_graph(cfg.as_seed, cfg.link_distance_km);
  Graph g;
  for (const NamedNode& n : cfg.explicit_nodes) {
    if (g.find_node(n.name) >= 0) throw ScenarioError(n.line, "duplicate node '" + n.name + "'");
    g.add_node(n.name);
  }
  for (const ExplicitLink& l : cfg.explicit_links) {
    int a = g.find_node(l.a);
    int b = g.find_node(l.b);
    if (a < 0) throw ScenarioError(l.line, "unknown node '" + l.a + "'");
    if (b < 0) throw ScenarioError(l.line, "unknown node '" + l.b + "'");
    if (a == b) throw ScenarioError(l.line, "a link needs two distinct ends");
    g.add_link(a, b, l.length_km);
  }
  return g;
}

namespace {

std::vector<std::pair<int, int>> resolve_phase(const Graph& g, const TrafficPhase& ph) {
  std::vector<std::pair<int, int>> out;
  if (ph.generator == "four_hop_pairs") {
    for (const auto& [a, b] : pairs_at_hops(g, 4)) {
      out.emplace_back(a, b);
      out.emplace_back(b, a);
    }
    if (out.empty()) throw ScenarioError(ph.line, "no node pairs at four intermediates");
  } else if (ph.generator == "cross_left_right") {
    for (int l = 0; l <= 8; ++l)
      for (int r = 11; r <= 19; ++r) {
        char lbuf[8], rbuf[8];
        std::snprintf(lbuf, sizeof(lbuf), "n%02d", l);
        std::snprintf(rbuf, sizeof(rbuf), "n%02d", r);
        out.emplace_back(g.find_node(lbuf), g.find_node(rbuf));
      }
  } else {
    for (const auto& [an, bn] : ph.pairs) {
      int a = g.find_node(an);
      int b = g.find_node(bn);
      if (a < 0) throw ScenarioError(ph.line, "unknown node '" + an + "'");
      if (b < 0) throw ScenarioError(ph.line, "unknown node '" + bn + "'");
      if (a == b) throw ScenarioError(ph.line, "a pair needs two distinct nodes");
      if (static_route(g, a, b).empty())
        throw ScenarioError(ph.line, "no route between '" + an + "' and '" + bn + "'");
      out.emplace_back(a, b);
    }
  }
  return out;
}

void format_cell(std::ostream& out, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  out << buf;
}

}  // namespace

ScenarioResult run_scenario(const ScenarioConfig& cfg) {
  Graph g = build_topology(cfg);
  struct Phase {
    double from_s;
    std::vector<std::pair<int, int>> pairs;
  };
  std::vector<Phase> phases;
  phases.reserve(cfg.traffic.size());
  for (const TrafficPhase& ph : cfg.traffic) phases.push_back({ph.active_from_s, resolve_phase(g, ph)});

  Network net(g, cfg.params, cfg.strategy, cfg.purification, cfg.selection, cfg.seed);
  ScenarioResult res;
  res.strategy = cfg.strategy;

  net.on_request_resolved = [&res](const RequestRecord& r) {
    RequestRow& row = res.rows[r.id - 1];
    row.served = r.served;
    row.path_hops = r.hops();
    if (r.served) {
      row.tts_ms = r.tts_ms();
      row.fidelity = r.mean_fidelity();
    }
  };

  RngStream traffic_rng(derive_seed(cfg.seed, "traffic"));
  for (std::uint64_t k = 1;; ++k) {
    double t = static_cast<double>(k) / cfg.arrival_rate_hz;
    if (t > cfg.duration_s) break;
    std::size_t active = 0;
    for (std::size_t i = 0; i < phases.size(); ++i)
      if (phases[i].from_s <= t) active = i;
    const auto& pair = phases[active].pairs[traffic_rng.uniform_index(phases[active].pairs.size())];
    RequestRow row;
    row.id = k;
    row.initiator = g.names[pair.first];
    row.responder = g.names[pair.second];
    row.arrival_s = t;
    row.start_s = t + cfg.params.request_start_offset_s;
    res.rows.push_back(std::move(row));
    net.submit_request(k, pair.first, pair.second, seconds_to_ps(t));
  }
  res.generated = res.rows.size();

  net.start();
  SimTime horizon = seconds_to_ps(cfg.duration_s + cfg.params.request_start_offset_s +
                                  cfg.params.request_window_s) +
                    kPsPerMillisecond;
  net.queue().run_until(horizon);
  net.finish();

  double tts_sum = 0.0;
  double fid_sum = 0.0;
  for (const RequestRow& row : res.rows) {
    if (!row.served) continue;
    res.served_count++;
    tts_sum += row.tts_ms;
    fid_sum += row.fidelity;
  }
  if (res.served_count > 0) {
    res.mean_tts_ms = tts_sum / static_cast<double>(res.served_count);
    res.mean_fidelity = fid_sum / static_cast<double>(res.served_count);
  }

  const double w = cfg.summary_window_s;
  int count = std::max(1, static_cast<int>(std::ceil(cfg.duration_s / w - 1e-9)));
  res.windows.resize(count);
  for (int i = 0; i < count; ++i) {
    res.windows[i].window_start_s = i * w;
    res.windows[i].window_end_s = std::min((i + 1) * w, cfg.duration_s);
  }
  for (const RequestRow& row : res.rows) {
    int idx = std::min(static_cast<int>(row.arrival_s / w), count - 1);
    SummaryWindow& win = res.windows[idx];
    win.arrivals++;
    if (row.served) {
      win.served++;
      win.mean_tts_ms += row.tts_ms;
      win.mean_fidelity += row.fidelity;
    }
  }
  for (SummaryWindow& win : res.windows) {
    if (win.served > 0) {
      win.mean_tts_ms /= win.served;
      win.mean_fidelity /= win.served;
    }
    if (win.arrivals > 0)
      win.served_fraction = static_cast<double>(win.served) / win.arrivals;
  }

  res.invariants = net.invariants();
  res.audit = net.audit();
  res.trace_digest = net.queue().trace_digest();
  return res;
}

void write_requests_csv(const ScenarioResult& r, std::ostream& out) {
  out << "request_id,initiator,responder,start_s,served,tts_ms,fidelity,path_hops,strategy\n";
  for (const RequestRow& row : r.rows) {
    out << row.id << ',' << row.initiator << ',' << row.responder << ',';
    format_cell(out, row.start_s);
    out << ',' << (row.served ? 1 : 0) << ',';
    if (row.served) format_cell(out, row.tts_ms);
    out << ',';
    if (row.served) format_cell(out, row.fidelity);
    out << ',' << row.path_hops << ',' << strategy_name(r.strategy) << '\n';
  }
}

void write_summary_csv(const ScenarioResult& r, std::ostream& out) {
  out << "window_start_s,window_end_s,mean_tts_ms,mean_fidelity,served_fraction\n";
  for (const SummaryWindow& win : r.windows) {
    format_cell(out, win.window_start_s);
    out << ',';
    format_cell(out, win.window_end_s);
    out << ',';
    format_cell(out, win.mean_tts_ms);
    out << ',';
    format_cell(out, win.mean_fidelity);
    out << ',';
    format_cell(out, win.served_fraction);
    out << '\n';
  }
}

std::string describe(const ScenarioConfig& cfg) {
  std::ostringstream out;
  char buf[64];
  auto num = [&buf](double v) {
    std::snprintf(buf, sizeof(buf), "%g", v);
    return std::string(buf);
  };
  out << "strategy=" << strategy_name(cfg.strategy) << '\n';
  out << "purification=" << (cfg.purification ? "on" : "off") << '\n';
  out << "selection_policy="
      << (cfg.selection == SelectionPolicy::kFreshest ? "freshest" : "random") << '\n';
  out << "duration_s=" << num(cfg.duration_s) << '\n';
  out << "seed=" << cfg.seed << '\n';
  out << "arrival_rate_hz=" << num(cfg.arrival_rate_hz) << '\n';
  out << "topology=" << cfg.topology_kind << '\n';
  if (cfg.topology_kind == "as_graph") out << "as_seed=" << cfg.as_seed << '\n';
  if (cfg.topology_kind != "explicit")
    out << "link_distance_km=" << num(cfg.link_distance_km) << '\n';
  const NetParams& p = cfg.params;
  const HardwareParams& hw = p.hw;
  out << "initial_fidelity=" << num(hw.initial_fidelity) << '\n';
  out << "pauli_x=" << num(hw.pauli.px) << " pauli_y=" << num(hw.pauli.py)
      << " pauli_z=" << num(hw.pauli.pz) << '\n';
  out << "coherence_time_s=" << num(hw.coherence_time_s) << '\n';
  out << "memory_efficiency=" << num(hw.memory_efficiency) << '\n';
  out << "detector_efficiency=" << num(hw.detector_efficiency) << '\n';
  out << "bsm_success_rate=" << num(hw.bsm_success_rate) << '\n';
  out << "fiber_attenuation_db_per_km=" << num(hw.fiber_attenuation_db_per_km) << '\n';
  out << "light_speed_m_per_s=" << num(hw.light_speed_m_per_s) << '\n';
  out << "forward_delay_s=" << num(hw.forward_delay_s) << '\n';
  out << "end_process_delay_s=" << num(hw.end_process_delay_s) << '\n';
  out << "emission_period_s=" << num(hw.emission_period_s) << '\n';
  out << "gate_fidelity=" << num(hw.noise.gate_fidelity) << '\n';
  out << "measure_fidelity=" << num(hw.noise.measure_fidelity) << '\n';
  out << "swap_success_rate=" << num(hw.swap_success_rate) << '\n';
  out << "memories_per_node=" << p.memories_per_node << '\n';
  out << "max_memory_acp=" << p.max_memory_acp << '\n';
  out << "delta=" << num(p.delta) << '\n';
  out << "sleep_base_s=" << num(p.sleep_base_s) << '\n';
  out << "acp_ttl_s=" << num(p.acp_ttl_s) << '\n';
  out << "acp_pending_timeout_s=" << num(p.acp_pending_timeout_s) << '\n';
  out << "request_start_offset_s=" << num(p.request_start_offset_s) << '\n';
  out << "request_window_s=" << num(p.request_window_s) << '\n';
  out << "summary_window_s=" << num(cfg.summary_window_s) << '\n';
  return out.str();
}

}  // namespace acpsim
