#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "acp.h"
#include "bds.h"
#include "hardware.h"
#include "kernel.h"
#include "topology.h"

namespace acpsim {

enum class Strategy { kOdo, kUcp, kAcp };
enum class SelectionPolicy { kFreshest, kRandom };

const char* strategy_name(Strategy s);

struct NetParams {
  HardwareParams hw;
  int memories_per_node = 10;
  int max_memory_acp = 5;
  double delta = 0.05;
  double sleep_base_s = 10e-3;
  double acp_ttl_s = 1.0;
  double acp_pending_timeout_s = 50e-3;
  double request_start_offset_s = 10e-3;
  double request_window_s = 95e-3;
};

enum class EpOrigin { kOnDemand, kAcp };

// Audit buckets: every record is eventually consumed by exactly one of these.
enum class ConsumeCause { kDelivery, kSwapInput, kPurifyInput, kExpiry };

struct EpRecord {
  std::uint64_t id = 0;
  int node_a = -1, mem_a = -1;
  int node_b = -1, mem_b = -1;
  BellDiagonalState state{};
  SimTime created_at = 0;
  SimTime last_touch = 0;
  SimTime known_a = -1, known_b = -1;  // when each endpoint learns of it; -1 = not yet
  EpOrigin origin = EpOrigin::kOnDemand;
  int link = -1;                  // originating link; meaningful for acp inventory
  std::uint64_t acp_flow = 0;     // owning flow while under ACP jurisdiction
  std::uint64_t request = 0;      // owning request once serving one
  bool alive = true;
  bool in_purification = false;
  bool reserved_for_reuse = false;
  ConsumeCause cause{};

  bool has_end(int node) const { return node == node_a || node == node_b; }
  SimTime known_at(int node) const { return node == node_a ? known_a : known_b; }
  int other_end(int node) const { return node == node_a ? node_b : node_a; }
  int mem_at(int node) const { return node == node_a ? mem_a : mem_b; }
};

struct MemorySlot {
  std::uint64_t ep = 0;           // live EP half stored here
  std::uint64_t lock = 0;         // protocol/grant token currently holding the slot
  std::uint64_t reserved_by = 0;  // request holding this reserved-class slot
  bool free() const { return ep == 0 && lock == 0 && reserved_by == 0; }
  bool physically_free() const { return ep == 0 && lock == 0; }
};

struct PendingQuery {
  int neighbor = -1;
  int mem = -1;
  SimTime expires = 0;
};

struct NodeState {
  int id = -1;
  std::string name;
  std::vector<MemorySlot> slots;
  int acp_counter = 0;
  ProbabilityTable table;
  std::map<std::uint64_t, PendingQuery> pending;  // flow token -> outstanding query
};

struct RequestRecord {
  std::uint64_t id = 0;
  int initiator = -1, responder = -1;
  std::vector<int> path;
  SimTime arrival = 0, start = 0, deadline = 0;
  int num_eps = 1;
  int delivered = 0;
  double fidelity_sum = 0.0;
  bool admitted = false;
  bool active = false;
  bool resolved = false;
  bool served = false;
  SimTime served_at = -1;
  // slot_map[i] = reserved slot indices at path[i]: one for each path link the
  // node touches (ends one entry, intermediates two: toward predecessor first).
  std::vector<std::vector<int>> slot_map;
  std::vector<std::uint64_t> live_eps;  // request-owned live EP ids

  int hops() const { return static_cast<int>(path.size()) - 2; }
  double tts_ms() const { return ps_to_ms(served_at - start); }
  double mean_fidelity() const { return delivered > 0 ? fidelity_sum / delivered : 0.0; }
};

struct InvariantCounters {
  std::uint64_t bad_state = 0;       // non-normalized/negative BDS weights
  std::uint64_t bad_table = 0;       // probability table off unity
  std::uint64_t counter_range = 0;   // acp counter out of [0, max]
  std::uint64_t acp_cap = 0;         // acp-class occupancy above max
  std::uint64_t double_consume = 0;  // EP consumed twice
  std::uint64_t slot_clash = 0;      // slot assigned while occupied
  std::uint64_t total() const {
    return bad_state + bad_table + counter_range + acp_cap + double_consume + slot_clash;
  }
};

struct EpAudit {
  std::uint64_t created = 0;
  std::uint64_t consumed[4] = {0, 0, 0, 0};  // indexed by ConsumeCause
  std::uint64_t live_at_end = 0;
  std::uint64_t photonic_attempts = 0;
  std::uint64_t reuse_deliveries = 0;
  std::uint64_t consumed_total() const {
    return consumed[0] + consumed[1] + consumed[2] + consumed[3];
  }
};

// Event-driven simulation of one network under one strategy.
class Network {
 public:
  Network(Graph graph, NetParams params, Strategy strategy, bool purification,
          SelectionPolicy policy, std::uint64_t seed);

  // Schedules a request's lifecycle events; ids must be unique.
  void submit_request(std::uint64_t id, int initiator, int responder, SimTime arrival,
                      int num_eps = 1);

  // Fired once per request when it resolves (served, window expired, or rejected).
  std::function<void(const RequestRecord&)> on_request_resolved;

  void start();   // schedules ACP ticks when the strategy calls for them
  void finish();  // folds leftover live EPs into the audit

  EventQueue& queue() { return queue_; }
  const Graph& graph() const { return graph_; }
  const NetParams& params() const { return params_; }
  Strategy strategy() const { return strategy_; }
  bool purification() const { return purification_; }
  const InvariantCounters& invariants() const { return inv_; }
  const EpAudit& audit() const { return audit_; }
  const NodeState& node(int id) const { return nodes_[id]; }
  const EpRecord* find_ep(std::uint64_t id) const;
  const std::vector<std::uint64_t>& acp_inventory(int link) const { return acp_inv_[link]; }
  int acp_occupied(int node) const;

  static constexpr double kFidelityThreshold = 0.5;

 private:
  struct GenRule {
    std::uint64_t request = 0;
    int link = -1;
    int primary = -1, other = -1;
    int slot_primary = -1, slot_other = -1;
    bool busy = false;  // generation or reuse handshake in flight
  };
  struct Generation {
    std::uint64_t token = 0;
    int link = -1;
    int initiator = -1, peer = -1;
    int slot_initiator = -1, slot_peer = -1;
    EpOrigin origin = EpOrigin::kOnDemand;
    std::uint64_t request = 0;  // owner when on-demand
    std::uint64_t flow = 0;     // owner when acp
    SimTime started = 0;
    int attempts = 0;
    bool done = false;
  };
  struct AcpFlow {
    std::uint64_t token = 0;
    int a = -1, x = -1;
    int link = -1;
    int slot_a = -1, slot_x = -1;
    bool granted = false;
    bool x_settled = false;  // x-side counter already returned
    bool a_settled = false;  // a-side counter already returned
    SimTime ttl_deadline = 0;
    std::uint64_t generation = 0;
    std::uint64_t ep = 0;
  };

  Graph graph_;
  NetParams params_;
  Strategy strategy_;
  bool purification_;
  SelectionPolicy policy_;
  EventQueue queue_;

  std::vector<NodeState> nodes_;
  std::map<std::uint64_t, EpRecord> eps_;
  std::map<std::uint64_t, RequestRecord> requests_;
  std::map<std::uint64_t, Generation> generations_;
  std::map<std::uint64_t, AcpFlow> flows_;
  std::map<std::uint64_t, std::vector<GenRule>> rules_;  // request id -> its gen rules
  std::vector<std::uint64_t> active_requests_;           // ascending id
  std::vector<std::vector<std::uint64_t>> acp_inv_;      // link -> live acp EP ids
  std::uint64_t next_ep_ = 1;
  std::uint64_t next_token_ = 1;
  InvariantCounters inv_;
  EpAudit audit_;
  bool rules_dirty_ = false;
  bool flushing_ = false;

  std::vector<RngStream> tick_rng_, gen_rng_, pump_rng_, select_rng_, swap_rng_;

  // wiring helpers
  int link_primary(int link) const;
  SimTime neighbor_latency(int link) const;
  SimTime path_latency(const std::vector<int>& path, int from_idx, int to_idx) const;

  // bookkeeping
  void check_state(const BellDiagonalState& s);
  void touch_ep(EpRecord& ep);
  void consume_ep(EpRecord& ep, ConsumeCause cause);
  void assign_slot(int node, int mem, std::uint64_t ep_id);
  void clear_slot_ep(int node, int mem);
  void bump_counter(int node, int by);
  void drop_from_inventory(const EpRecord& ep);
  EpRecord* live_ep(std::uint64_t id);

  // acp fsm
  void schedule_tick(int node);
  void do_tick(int node);
  void handle_query(std::uint64_t token, int x, int a, int mem_a);
  void handle_reply(std::uint64_t token, bool yes, int slot_x);
  void pending_expire(std::uint64_t token);
  void grant_guard(std::uint64_t token);
  void acp_ttl_expire(std::uint64_t token);
  void settle_flow_a(AcpFlow& f);
  void settle_flow_x(AcpFlow& f);
  void pump_on_new_link_ep(EpRecord& ep);
  void pump_complete(std::uint64_t keep_id, std::uint64_t meas_id);

  // generation
  std::uint64_t start_generation(int link, int initiator, int slot_i, int slot_p,
                                 EpOrigin origin, std::uint64_t request, std::uint64_t flow);
  void attempt_herald(std::uint64_t token, SimTime emission);
  void cancel_generation(std::uint64_t token);

  // reuse
  EpRecord* select_pregenerated(int link, int node);
  void reuse_complete(std::uint64_t request, int link, std::uint64_t ep_id);

  // requests
  void request_arrival(std::uint64_t id);
  void request_start(std::uint64_t id);
  void request_end(std::uint64_t id);
  bool admit(RequestRecord& req);
  void resolve(RequestRecord& req);
  void teardown(RequestRecord& req);
  void serve_update_tables(const RequestRecord& req);

  // rule engine
  void mark_dirty() { rules_dirty_ = true; }
  void flush_rules();
  bool try_serve(RequestRecord& req);
  bool try_swaps(RequestRecord& req);
  bool fire_gen_rules(RequestRecord& req);
  EpRecord* segment_ep(const RequestRecord& req, int a, int b, int known_to);
};

}  // namespace acpsim
