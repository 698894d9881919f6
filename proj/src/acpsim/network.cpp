#include "network.h"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace acpsim {

namespace {

// Applies a table update and counts any normalization drift against the run.
void update_table_checked(ProbabilityTable& t, const std::vector<int>& favored, double delta,
                          InvariantCounters& inv) {
  t.update(favored, delta);
  double sum = 0.0;
  for (double p : t.probabilities()) {
    sum += p;
    if (p < -1e-12) inv.bad_table++;
  }
  if (std::abs(sum - 1.0) > 1e-12) inv.bad_table++;
}

}  // namespace

const char* strategy_name(Strategy s) {
  switch (s) {
    case Strategy::kOdo: return "odo";
    case Strategy::kUcp: return "ucp";
    case Strategy::kAcp: return "acp";
  }
  return "?";
}

Network::Network(Graph graph, NetParams params, Strategy strategy, bool purification,
                 SelectionPolicy policy, std::uint64_t seed)
    : graph_(std::move(graph)),
      params_(params),
      strategy_(strategy),
      purification_(purification),
      policy_(policy) {
  if (strategy_ == Strategy::kOdo && purification_)
    throw std::invalid_argument("purification needs continuously generated pairs");
  if (params_.memories_per_node < 1 || params_.max_memory_acp < 0 ||
      params_.max_memory_acp > params_.memories_per_node)
    throw std::invalid_argument("memory split is inconsistent");

  int n = graph_.node_count();
  nodes_.resize(n);
  acp_inv_.resize(graph_.links.size());
  tick_rng_.reserve(n);
  gen_rng_.reserve(n);
  pump_rng_.reserve(n);
  select_rng_.reserve(n);
  swap_rng_.reserve(n);
  for (int i = 0; i < n; ++i) {
    NodeState& node = nodes_[i];
    node.id = i;
    node.name = graph_.names[i];
    node.slots.resize(params_.memories_per_node);
    std::vector<int> neighbors;
    neighbors.reserve(graph_.adj[i].size());
    for (const auto& [peer, link] : graph_.adj[i]) neighbors.push_back(peer);
    std::sort(neighbors.begin(), neighbors.end());
    node.table = ProbabilityTable(std::move(neighbors));
    tick_rng_.emplace_back(derive_seed(seed, node.name + "/tick"));
    gen_rng_.emplace_back(derive_seed(seed, node.name + "/gen"));
    pump_rng_.emplace_back(derive_seed(seed, node.name + "/pump"));
    select_rng_.emplace_back(derive_seed(seed, node.name + "/select"));
    swap_rng_.emplace_back(derive_seed(seed, node.name + "/swap"));
  }
}

void Network::start() {
  if (strategy_ == Strategy::kOdo) return;
  for (int i = 0; i < graph_.node_count(); ++i) schedule_tick(i);
}

void Network::finish() {
  audit_.live_at_end = 0;
  for (const auto& [id, ep] : eps_)
    if (ep.alive) audit_.live_at_end++;
}

const EpRecord* Network::find_ep(std::uint64_t id) const {
  auto it = eps_.find(id);
  return it == eps_.end() ? nullptr : &it->second;
}

int Network::acp_occupied(int node) const {
  int used = 0;
  for (int i = 0; i < params_.max_memory_acp; ++i) {
    const MemorySlot& s = nodes_[node].slots[i];
    if (s.ep != 0 || s.lock != 0) used++;
  }
  return used;
}

// ---------------------------------------------------------------------------
// wiring helpers

int Network::link_primary(int link) const {
  const LinkSpec& l = graph_.links[link];
  return graph_.names[l.a] < graph_.names[l.b] ? l.a : l.b;
}

SimTime Network::neighbor_latency(int link) const {
  return classical_latency_ps(params_.hw, graph_.links[link].length_km, 0);
}

SimTime Network::path_latency(const std::vector<int>& path, int from_idx, int to_idx) const {
  int lo = std::min(from_idx, to_idx);
  int hi = std::max(from_idx, to_idx);
  double km = 0.0;
  for (int i = lo; i < hi; ++i)
    km += graph_.links[graph_.link_between(path[i], path[i + 1])].length_km;
  return classical_latency_ps(params_.hw, km, hi - lo - 1);
}

// ---------------------------------------------------------------------------
// bookkeeping

void Network::check_state(const BellDiagonalState& s) {
  bool ok = s.is_normalized(1e-9);
  for (double w : s.w) ok = ok && w > -1e-9;
  if (!ok) inv_.bad_state++;
}

void Network::touch_ep(EpRecord& ep) {
  SimTime now = queue_.now();
  if (now <= ep.last_touch) return;
  ep.state = decohere(ep.state, ps_to_seconds(now - ep.last_touch), params_.hw.coherence_time_s,
                      params_.hw.pauli);
  check_state(ep.state);
  ep.last_touch = now;
}

void Network::consume_ep(EpRecord& ep, ConsumeCause cause) {
  if (!ep.alive) {
    inv_.double_consume++;
    return;
  }
  ep.alive = false;
  ep.cause = cause;
  audit_.consumed[static_cast<int>(cause)]++;
  if (ep.mem_a >= 0 && nodes_[ep.node_a].slots[ep.mem_a].ep == ep.id)
    nodes_[ep.node_a].slots[ep.mem_a].ep = 0;
  if (ep.mem_b >= 0 && nodes_[ep.node_b].slots[ep.mem_b].ep == ep.id)
    nodes_[ep.node_b].slots[ep.mem_b].ep = 0;
  drop_from_inventory(ep);
  if (ep.request != 0) {
    auto rit = requests_.find(ep.request);
    if (rit != requests_.end()) {
      auto& live = rit->second.live_eps;
      live.erase(std::remove(live.begin(), live.end(), ep.id), live.end());
    }
  } else if (ep.origin == EpOrigin::kAcp && ep.acp_flow != 0) {
    // Consumed while still under continuous-protocol jurisdiction: the
    // initiator's budget entry retires with the pair.
    auto fit = flows_.find(ep.acp_flow);
    if (fit != flows_.end()) settle_flow_a(fit->second);
  }
  mark_dirty();
}

void Network::assign_slot(int node, int mem, std::uint64_t ep_id) {
  MemorySlot& s = nodes_[node].slots[mem];
  if (s.ep != 0) inv_.slot_clash++;
  s.ep = ep_id;
}

void Network::clear_slot_ep(int node, int mem) { nodes_[node].slots[mem].ep = 0; }

void Network::bump_counter(int node, int by) {
  nodes_[node].acp_counter += by;
  if (nodes_[node].acp_counter < 0 || nodes_[node].acp_counter > params_.max_memory_acp)
    inv_.counter_range++;
}

void Network::drop_from_inventory(const EpRecord& ep) {
  if (ep.origin != EpOrigin::kAcp || ep.link < 0) return;
  auto& inv = acp_inv_[ep.link];
  inv.erase(std::remove(inv.begin(), inv.end(), ep.id), inv.end());
}

EpRecord* Network::live_ep(std::uint64_t id) {
  auto it = eps_.find(id);
  if (it == eps_.end() || !it->second.alive) return nullptr;
  return &it->second;
}

// ---------------------------------------------------------------------------
// continuous-generation control plane

void Network::schedule_tick(int node) {
  double tau = tick_rng_[node].uniform(0.5, 1.5) * params_.sleep_base_s;
  queue_.schedule(
      queue_.now() + seconds_to_ps(tau),
      [this, node] {
        do_tick(node);
        flush_rules();
      },
      "tick", static_cast<std::uint64_t>(node));
}

void Network::do_tick(int node) {
  NodeState& me = nodes_[node];
  if (me.acp_counter < params_.max_memory_acp) {
    int mem = -1;
    for (int i = 0; i < params_.max_memory_acp; ++i)
      if (me.slots[i].physically_free()) {
        mem = i;
        break;
      }
    if (mem >= 0) {
      bump_counter(node, +1);
      int target = me.table.roulette(tick_rng_[node]);
      if (target == ProbabilityTable::kIdle) {
        bump_counter(node, -1);
      } else {
        std::uint64_t token = next_token_++;
        AcpFlow f;
        f.token = token;
        f.a = node;
        f.x = target;
        f.link = graph_.link_between(node, target);
        f.slot_a = mem;
        flows_[token] = f;
        me.slots[mem].lock = token;
        if (acp_occupied(node) > params_.max_memory_acp) inv_.acp_cap++;
        SimTime timeout = seconds_to_ps(params_.acp_pending_timeout_s);
        me.pending[token] = PendingQuery{target, mem, queue_.now() + timeout};
        queue_.schedule(
            queue_.now() + neighbor_latency(f.link),
            [this, token, target, node, mem] {
              handle_query(token, target, node, mem);
              flush_rules();
            },
            "query", token);
        queue_.schedule(
            queue_.now() + timeout,
            [this, token] {
              pending_expire(token);
              flush_rules();
            },
            "pend", token);
      }
    }
  }
  schedule_tick(node);
}

void Network::handle_query(std::uint64_t token, int x, int a, int mem_a) {
  (void)a;
  (void)mem_a;
  AcpFlow& f = flows_[token];
  NodeState& me = nodes_[x];
  int mem = -1;
  if (me.acp_counter < params_.max_memory_acp) {
    for (int i = 0; i < params_.max_memory_acp; ++i)
      if (me.slots[i].physically_free()) {
        mem = i;
        break;
      }
  }
  bool yes = mem >= 0;
  if (yes) {
    bump_counter(x, +1);
    me.slots[mem].lock = token;
    if (acp_occupied(x) > params_.max_memory_acp) inv_.acp_cap++;
    f.granted = true;
    f.slot_x = mem;
    // If the initiator side walked away (its pending timer fired before the
    // generation can reach us), this guard returns the grant.
    queue_.schedule(
        queue_.now() + seconds_to_ps(params_.acp_pending_timeout_s),
        [this, token] {
          grant_guard(token);
          flush_rules();
        },
        "guard", token);
  }
  int slot_x = mem;
  queue_.schedule(
      queue_.now() + neighbor_latency(f.link),
      [this, token, yes, slot_x] {
        handle_reply(token, yes, slot_x);
        flush_rules();
      },
      "reply", token);
}

void Network::handle_reply(std::uint64_t token, bool yes, int slot_x) {
  (void)slot_x;
  AcpFlow& f = flows_[token];
  NodeState& me = nodes_[f.a];
  auto it = me.pending.find(token);
  if (it == me.pending.end()) return;  // query already timed out; stale reply
  me.pending.erase(it);
  if (!yes) {
    settle_flow_a(f);
    return;
  }
  f.ttl_deadline = queue_.now() + seconds_to_ps(params_.acp_ttl_s);
  queue_.schedule(
      f.ttl_deadline,
      [this, token] {
        acp_ttl_expire(token);
        flush_rules();
      },
      "acp_ttl", token);
  f.generation =
      start_generation(f.link, f.a, f.slot_a, f.slot_x, EpOrigin::kAcp, 0, token);
}

void Network::pending_expire(std::uint64_t token) {
  AcpFlow& f = flows_[token];
  auto it = nodes_[f.a].pending.find(token);
  if (it == nodes_[f.a].pending.end()) return;  // the reply won the race
  nodes_[f.a].pending.erase(it);
  settle_flow_a(f);
}

void Network::grant_guard(std::uint64_t token) {
  AcpFlow& f = flows_[token];
  if (f.x_settled || f.generation != 0) return;  // generation arrived; normal teardown applies
  settle_flow_x(f);
}

void Network::acp_ttl_expire(std::uint64_t token) {
  AcpFlow& f = flows_[token];
  if (f.generation != 0) {
    auto git = generations_.find(f.generation);
    if (git != generations_.end() && !git->second.done) cancel_generation(f.generation);
  }
  if (f.ep != 0) {
    EpRecord* ep = live_ep(f.ep);
    if (ep && ep->request == 0) {
      consume_ep(*ep, ConsumeCause::kExpiry);
      // The pair aged out without serving anyone: pre-generating here was
      // wasted effort, so the initiator shifts weight toward staying idle.
      // This is the counterpart of the serve-time reward; without it, nodes
      // outside the traffic pattern keep squatting on their neighbors' ACP
      // memories and the hot links starve.
      if (strategy_ == Strategy::kAcp)
        update_table_checked(nodes_[f.a].table, {ProbabilityTable::kIdle}, params_.delta,
                             inv_);
    }
  }
  settle_flow_a(f);
}

void Network::settle_flow_a(AcpFlow& f) {
  if (f.a_settled) return;
  f.a_settled = true;
  MemorySlot& s = nodes_[f.a].slots[f.slot_a];
  if (s.lock == f.token) s.lock = 0;
  bump_counter(f.a, -1);
}

void Network::settle_flow_x(AcpFlow& f) {
  if (!f.granted || f.x_settled) return;
  f.x_settled = true;
  MemorySlot& s = nodes_[f.x].slots[f.slot_x];
  if (s.lock == f.token) s.lock = 0;
  bump_counter(f.x, -1);
}

// ---------------------------------------------------------------------------
// entanglement pumping

void Network::pump_on_new_link_ep(EpRecord& ep) {
  if (!purification_) return;
  EpRecord* meas = nullptr;
  int candidates = 0;
  for (std::uint64_t id : acp_inv_[ep.link]) {
    if (id == ep.id) continue;
    EpRecord* cand = live_ep(id);
    if (!cand || cand->in_purification || cand->reserved_for_reuse || cand->request != 0)
      continue;
    ++candidates;
    if (!meas || cand->created_at < meas->created_at ||
        (cand->created_at == meas->created_at && cand->id < meas->id))
      meas = cand;
  }
  // A round ties up the fresh pair and the sacrificed one for a classical
  // round trip. Start it only while another stored pair stays deliverable,
  // so background pumping never blanks the shelf a request could draw from.
  // Exception: once the oldest pair has sat unclaimed for a quarter of its
  // TTL, holding it is worth less than refreshing it, so pump even when no
  // spare remains.
  const SimTime stale_age = seconds_to_ps(params_.acp_ttl_s * 0.25);
  const bool going_stale = meas && queue_.now() - meas->created_at > stale_age;
  if (candidates < 2 && !(candidates == 1 && going_stale)) return;
  ep.in_purification = true;
  meas->in_purification = true;
  SimTime rtt = link_rtt_ps(params_.hw, graph_.links[ep.link].length_km);
  std::uint64_t keep_id = ep.id;
  std::uint64_t meas_id = meas->id;
  queue_.schedule(
      queue_.now() + rtt,
      [this, keep_id, meas_id] {
        pump_complete(keep_id, meas_id);
        flush_rules();
      },
      "pump", keep_id);
}

void Network::pump_complete(std::uint64_t keep_id, std::uint64_t meas_id) {
  EpRecord* keep = live_ep(keep_id);
  EpRecord* meas = live_ep(meas_id);
  if (!keep || !meas || keep->request != 0 || meas->request != 0) {
    // One side vanished (expiry or reallocation) while the round was in
    // flight; whatever survives goes back to normal duty.
    if (keep) keep->in_purification = false;
    if (meas) meas->in_purification = false;
    return;
  }
  touch_ep(*keep);
  touch_ep(*meas);
  int primary = link_primary(keep->link);
  PurifyOutcome out = purify(keep->state, meas->state, params_.hw.noise, pump_rng_[primary]);
  consume_ep(*meas, ConsumeCause::kPurifyInput);
  if (out.success) {
    keep->state = werner_twirl(out.out);
    check_state(keep->state);
    keep->in_purification = false;
  } else {
    consume_ep(*keep, ConsumeCause::kPurifyInput);
  }
}

// ---------------------------------------------------------------------------
// link-level generation

std::uint64_t Network::start_generation(int link, int initiator, int slot_i, int slot_p,
                                        EpOrigin origin, std::uint64_t request,
                                        std::uint64_t flow) {
  std::uint64_t token = next_token_++;
  Generation g;
  g.token = token;
  g.link = link;
  g.initiator = initiator;
  g.peer = graph_.links[link].a == initiator ? graph_.links[link].b : graph_.links[link].a;
  g.slot_initiator = slot_i;
  g.slot_peer = slot_p;
  g.origin = origin;
  g.request = request;
  g.flow = flow;
  g.started = queue_.now();
  generations_[token] = g;
  nodes_[initiator].slots[slot_i].lock = token;
  nodes_[g.peer].slots[slot_p].lock = token;
  double km = graph_.links[link].length_km;
  SimTime emission = queue_.now() + attempt_emission_offset_ps(params_.hw, km);
  queue_.schedule(
      queue_.now() + attempt_herald_offset_ps(params_.hw, km),
      [this, token, emission] {
        attempt_herald(token, emission);
        flush_rules();
      },
      "herald", token);
  return token;
}

void Network::attempt_herald(std::uint64_t token, SimTime emission) {
  auto it = generations_.find(token);
  if (it == generations_.end() || it->second.done) return;
  Generation& g = it->second;
  g.attempts++;
  audit_.photonic_attempts++;
  double km = graph_.links[g.link].length_km;
  if (!gen_rng_[g.initiator].bernoulli(attempt_success_prob(params_.hw, km))) {
    SimTime base = g.started + static_cast<SimTime>(g.attempts) * attempt_cycle_ps(params_.hw, km);
    SimTime next_emission = base + attempt_emission_offset_ps(params_.hw, km);
    queue_.schedule(
        base + attempt_herald_offset_ps(params_.hw, km),
        [this, token, next_emission] {
          attempt_herald(token, next_emission);
          flush_rules();
        },
        "herald", token);
    return;
  }

  const LinkSpec& l = graph_.links[g.link];
  EpRecord ep;
  ep.id = next_ep_++;
  ep.node_a = l.a;
  ep.node_b = l.b;
  ep.mem_a = g.initiator == l.a ? g.slot_initiator : g.slot_peer;
  ep.mem_b = g.initiator == l.a ? g.slot_peer : g.slot_initiator;
  ep.state = initial_link_state(params_.hw.initial_fidelity, params_.hw.pauli);
  check_state(ep.state);
  // The memory starts aging at emission; both ends learn of the pair when the
  // heralded outcome reaches them, which is now.
  ep.created_at = emission;
  ep.last_touch = emission;
  ep.known_a = queue_.now();
  ep.known_b = queue_.now();
  ep.origin = g.origin;
  ep.link = g.link;
  ep.acp_flow = g.flow;
  ep.request = g.request;

  nodes_[g.initiator].slots[g.slot_initiator].lock = 0;
  nodes_[g.peer].slots[g.slot_peer].lock = 0;
  std::uint64_t flow = g.flow;
  std::uint64_t request = g.request;
  int link = g.link;
  generations_.erase(it);

  eps_[ep.id] = ep;
  audit_.created++;
  EpRecord& stored = eps_[ep.id];
  assign_slot(stored.node_a, stored.mem_a, stored.id);
  assign_slot(stored.node_b, stored.mem_b, stored.id);

  if (stored.origin == EpOrigin::kAcp) {
    acp_inv_[link].push_back(stored.id);
    if (acp_occupied(l.a) > params_.max_memory_acp) inv_.acp_cap++;
    if (acp_occupied(l.b) > params_.max_memory_acp) inv_.acp_cap++;
    auto fit = flows_.find(flow);
    if (fit != flows_.end()) {
      fit->second.ep = stored.id;
      settle_flow_x(fit->second);
    }
    pump_on_new_link_ep(stored);
  } else {
    auto rit = requests_.find(request);
    if (rit != requests_.end()) {
      rit->second.live_eps.push_back(stored.id);
      auto rules = rules_.find(request);
      if (rules != rules_.end())
        for (GenRule& rule : rules->second)
          if (rule.link == link) {
            rule.busy = false;
            break;
          }
    }
  }
  mark_dirty();
}

void Network::cancel_generation(std::uint64_t token) {
  auto it = generations_.find(token);
  if (it == generations_.end()) return;
  Generation& g = it->second;
  g.done = true;
  MemorySlot& si = nodes_[g.initiator].slots[g.slot_initiator];
  MemorySlot& sp = nodes_[g.peer].slots[g.slot_peer];
  if (si.lock == token) si.lock = 0;
  if (sp.lock == token) sp.lock = 0;
  if (g.origin == EpOrigin::kAcp) {
    auto fit = flows_.find(g.flow);
    if (fit != flows_.end()) settle_flow_x(fit->second);
  }
  generations_.erase(it);
}

// ---------------------------------------------------------------------------
// reuse of pre-generated pairs

EpRecord* Network::select_pregenerated(int link, int node) {
  std::vector<EpRecord*> candidates;
  for (std::uint64_t id : acp_inv_[link]) {
    EpRecord* ep = live_ep(id);
    if (!ep || ep->in_purification || ep->reserved_for_reuse || ep->request != 0) continue;
    SimTime known = ep->known_at(node);
    if (known < 0 || known > queue_.now()) continue;
    candidates.push_back(ep);
  }
  if (candidates.empty()) return nullptr;
  if (policy_ == SelectionPolicy::kRandom)
    return candidates[select_rng_[node].uniform_index(candidates.size())];
  EpRecord* best = nullptr;
  for (EpRecord* ep : candidates)
    if (!best || ep->created_at > best->created_at ||
        (ep->created_at == best->created_at && ep->id < best->id))
      best = ep;
  return best;
}

void Network::reuse_complete(std::uint64_t request, int link, std::uint64_t ep_id) {
  EpRecord* ep = live_ep(ep_id);
  auto rit = requests_.find(request);
  if (rit == requests_.end() || !rit->second.active) {
    if (ep) ep->reserved_for_reuse = false;
    mark_dirty();
    return;
  }
  RequestRecord& req = rit->second;
  GenRule* rule = nullptr;
  auto rules = rules_.find(request);
  if (rules != rules_.end())
    for (GenRule& r : rules->second)
      if (r.link == link) {
        rule = &r;
        break;
      }
  if (!rule) {
    if (ep) ep->reserved_for_reuse = false;
    return;
  }
  bool slots_ok = nodes_[rule->primary].slots[rule->slot_primary].physically_free() &&
                  nodes_[rule->other].slots[rule->slot_other].physically_free();
  if (!ep || ep->request != 0 || !slots_ok) {
    // The reserved pair is gone (expired mid-handshake); fall back to
    // generating from scratch, or re-arm the rule if the slots moved on.
    if (ep) ep->reserved_for_reuse = false;
    if (slots_ok) {
      start_generation(rule->link, rule->primary, rule->slot_primary, rule->slot_other,
                       EpOrigin::kOnDemand, request, 0);
    } else {
      rule->busy = false;
      mark_dirty();
    }
    return;
  }

  ep->reserved_for_reuse = false;
  clear_slot_ep(ep->node_a, ep->mem_a);
  clear_slot_ep(ep->node_b, ep->mem_b);
  drop_from_inventory(*ep);
  if (ep->acp_flow != 0) {
    auto fit = flows_.find(ep->acp_flow);
    if (fit != flows_.end()) settle_flow_a(fit->second);
  }
  ep->request = request;
  if (ep->node_a == rule->primary) {
    ep->mem_a = rule->slot_primary;
    ep->mem_b = rule->slot_other;
  } else {
    ep->mem_a = rule->slot_other;
    ep->mem_b = rule->slot_primary;
  }
  assign_slot(ep->node_a, ep->mem_a, ep->id);
  assign_slot(ep->node_b, ep->mem_b, ep->id);
  req.live_eps.push_back(ep->id);
  audit_.reuse_deliveries++;
  rule->busy = false;
  mark_dirty();
}

// ---------------------------------------------------------------------------
// requests

void Network::submit_request(std::uint64_t id, int initiator, int responder, SimTime arrival,
                             int num_eps) {
  if (requests_.count(id)) throw std::invalid_argument("duplicate request id");
  RequestRecord req;
  req.id = id;
  req.initiator = initiator;
  req.responder = responder;
  req.path = static_route(graph_, initiator, responder);
  if (req.path.size() < 2) throw std::invalid_argument("request endpoints are not connected");
  req.arrival = arrival;
  req.start = arrival + seconds_to_ps(params_.request_start_offset_s);
  req.deadline = req.start + seconds_to_ps(params_.request_window_s);
  req.num_eps = num_eps;
  requests_[id] = std::move(req);
  queue_.schedule(
      arrival,
      [this, id] {
        request_arrival(id);
        flush_rules();
      },
      "req_arrival", id);
}

void Network::request_arrival(std::uint64_t id) {
  RequestRecord& req = requests_[id];
  req.admitted = admit(req);
  if (!req.admitted) {
    resolve(req);
    return;
  }
  queue_.schedule(
      req.start,
      [this, id] {
        request_start(id);
        flush_rules();
      },
      "req_start", id);
  queue_.schedule(
      req.deadline,
      [this, id] {
        request_end(id);
        flush_rules();
      },
      "req_end", id);
}

bool Network::admit(RequestRecord& req) {
  int n = static_cast<int>(req.path.size());
  std::vector<std::vector<int>> picks(n);
  for (int i = 0; i < n; ++i) {
    int need = (i == 0 || i == n - 1) ? 1 : 2;
    NodeState& node = nodes_[req.path[i]];
    for (int s = params_.max_memory_acp;
         s < params_.memories_per_node && static_cast<int>(picks[i].size()) < need; ++s)
      if (node.slots[s].free()) picks[i].push_back(s);
    if (static_cast<int>(picks[i].size()) < need) return false;
  }
  for (int i = 0; i < n; ++i)
    for (int s : picks[i]) nodes_[req.path[i]].slots[s].reserved_by = req.id;
  req.slot_map = std::move(picks);
  return true;
}

void Network::request_start(std::uint64_t id) {
  RequestRecord& req = requests_[id];
  if (req.resolved) return;
  req.active = true;
  active_requests_.push_back(id);
  auto& rules = rules_[id];
  int n = static_cast<int>(req.path.size());
  for (int i = 0; i + 1 < n; ++i) {
    int u = req.path[i];
    int v = req.path[i + 1];
    int link = graph_.link_between(u, v);
    GenRule rule;
    rule.request = id;
    rule.link = link;
    rule.primary = link_primary(link);
    rule.other = rule.primary == u ? v : u;
    // Intermediates hold two granted slots: toward the predecessor first.
    int slot_u = i == 0 ? req.slot_map[0][0] : req.slot_map[i][1];
    int slot_v = i + 1 == n - 1 ? req.slot_map[n - 1][0] : req.slot_map[i + 1][0];
    rule.slot_primary = rule.primary == u ? slot_u : slot_v;
    rule.slot_other = rule.primary == u ? slot_v : slot_u;
    rules.push_back(rule);
  }
  mark_dirty();
}

void Network::request_end(std::uint64_t id) {
  RequestRecord& req = requests_[id];
  if (req.resolved) return;
  resolve(req);
}

void Network::resolve(RequestRecord& req) {
  req.resolved = true;
  bool was_active = req.active;
  req.active = false;
  teardown(req);
  if (was_active) {
    auto it = std::find(active_requests_.begin(), active_requests_.end(), req.id);
    if (it != active_requests_.end()) active_requests_.erase(it);
  }
  if (on_request_resolved) on_request_resolved(req);
}

void Network::teardown(RequestRecord& req) {
  std::vector<std::uint64_t> gens;
  for (const auto& [token, g] : generations_)
    if (g.origin == EpOrigin::kOnDemand && g.request == req.id) gens.push_back(token);
  for (std::uint64_t token : gens) cancel_generation(token);
  std::vector<std::uint64_t> live = req.live_eps;
  for (std::uint64_t id : live) {
    EpRecord* ep = live_ep(id);
    if (ep) consume_ep(*ep, ConsumeCause::kExpiry);
  }
  for (int node : req.path)
    for (MemorySlot& s : nodes_[node].slots)
      if (s.reserved_by == req.id) s.reserved_by = 0;
  rules_.erase(req.id);
  mark_dirty();
}

void Network::serve_update_tables(const RequestRecord& req) {
  const std::vector<int>& path = req.path;
  int n = static_cast<int>(path.size());
  update_table_checked(nodes_[path[0]].table, {path[1]}, params_.delta, inv_);
  update_table_checked(nodes_[path[n - 1]].table, {path[n - 2]}, params_.delta, inv_);
  for (int j = 1; j + 1 < n; ++j) {
    int m = path[j];
    int prev = path[j - 1];
    int next = path[j + 1];
    queue_.schedule(
        queue_.now() + path_latency(path, 0, j),
        [this, m, prev, next] {
          update_table_checked(nodes_[m].table, {prev, next}, params_.delta, inv_);
          flush_rules();
        },
        "path_notify", static_cast<std::uint64_t>(m));
  }
}

// ---------------------------------------------------------------------------
// rule engine

void Network::flush_rules() {
  if (flushing_) return;
  flushing_ = true;
  while (rules_dirty_) {
    rules_dirty_ = false;
    std::vector<std::uint64_t> ids = active_requests_;
    for (std::uint64_t id : ids) {
      auto it = requests_.find(id);
      if (it == requests_.end() || !it->second.active) continue;
      RequestRecord& req = it->second;
      if (try_serve(req)) continue;
      try_swaps(req);
      fire_gen_rules(req);
    }
  }
  flushing_ = false;
}

EpRecord* Network::segment_ep(const RequestRecord& req, int a, int b, int known_to) {
  for (std::uint64_t id : req.live_eps) {
    EpRecord* ep = live_ep(id);
    if (!ep || ep->in_purification || ep->reserved_for_reuse) continue;
    if (!ep->has_end(a) || !ep->has_end(b) || a == b) continue;
    SimTime known = ep->known_at(known_to);
    if (known < 0 || known > queue_.now()) continue;
    return ep;
  }
  return nullptr;
}

bool Network::try_serve(RequestRecord& req) {
  EpRecord* ep = segment_ep(req, req.initiator, req.responder, req.initiator);
  if (!ep) return false;
  touch_ep(*ep);
  double f = ep->state.fidelity();
  if (f < kFidelityThreshold) {
    // Below the delivery floor: discard and let the rules rebuild the path.
    consume_ep(*ep, ConsumeCause::kExpiry);
    return true;
  }
  consume_ep(*ep, ConsumeCause::kDelivery);
  req.delivered++;
  req.fidelity_sum += f;
  if (req.delivered >= req.num_eps) {
    req.served = true;
    req.served_at = queue_.now();
    if (strategy_ == Strategy::kAcp) serve_update_tables(req);
    resolve(req);
  }
  return true;
}

bool Network::try_swaps(RequestRecord& req) {
  const std::vector<int>& path = req.path;
  int n = static_cast<int>(path.size());
  auto position = [&path, n](int node) {
    for (int i = 0; i < n; ++i)
      if (path[i] == node) return i;
    return -1;
  };
  for (int i = 1; i + 1 < n; ++i) {
    int m = path[i];
    EpRecord* left = nullptr;
    EpRecord* right = nullptr;
    for (std::uint64_t id : req.live_eps) {
      EpRecord* ep = live_ep(id);
      if (!ep || !ep->has_end(m) || ep->in_purification || ep->reserved_for_reuse) continue;
      SimTime known = ep->known_at(m);
      if (known < 0 || known > queue_.now()) continue;
      int pos = position(ep->other_end(m));
      if (pos < 0) continue;
      if (pos < i && !left) left = ep;
      if (pos > i && !right) right = ep;
    }
    if (!left || !right) continue;

    touch_ep(*left);
    touch_ep(*right);
    int far_l = left->other_end(m);
    int far_r = right->other_end(m);
    int mem_l = left->mem_at(far_l);
    int mem_r = right->mem_at(far_r);
    BellDiagonalState sl = left->state;
    BellDiagonalState sr = right->state;
    consume_ep(*left, ConsumeCause::kSwapInput);
    consume_ep(*right, ConsumeCause::kSwapInput);
    if (!swap_rng_[m].bernoulli(params_.hw.swap_success_rate)) return true;

    EpRecord ep;
    ep.id = next_ep_++;
    ep.node_a = far_l;
    ep.mem_a = mem_l;
    ep.node_b = far_r;
    ep.mem_b = mem_r;
    ep.state = entanglement_swap(sl, sr, params_.hw.noise);
    check_state(ep.state);
    ep.created_at = queue_.now();
    ep.last_touch = queue_.now();
    // The far ends learn the swap outcome over the classical path.
    ep.known_a = queue_.now() + path_latency(path, i, position(far_l));
    ep.known_b = queue_.now() + path_latency(path, i, position(far_r));
    ep.origin = EpOrigin::kOnDemand;
    ep.link = -1;
    ep.request = req.id;
    eps_[ep.id] = ep;
    audit_.created++;
    req.live_eps.push_back(ep.id);
    assign_slot(far_l, mem_l, ep.id);
    assign_slot(far_r, mem_r, ep.id);
    for (SimTime at : {ep.known_a, ep.known_b})
      queue_.schedule(
          at, [this] { mark_dirty(); flush_rules(); }, "swap_result", ep.id);
    return true;  // state changed; the flush loop re-scans from the top
  }
  return false;
}

bool Network::fire_gen_rules(RequestRecord& req) {
  auto it = rules_.find(req.id);
  if (it == rules_.end()) return false;
  bool any = false;
  for (GenRule& rule : it->second) {
    if (rule.busy) continue;
    if (!nodes_[rule.primary].slots[rule.slot_primary].physically_free()) continue;
    if (!nodes_[rule.other].slots[rule.slot_other].physically_free()) continue;
    rule.busy = true;
    any = true;
    EpRecord* pick =
        strategy_ != Strategy::kOdo ? select_pregenerated(rule.link, rule.primary) : nullptr;
    if (pick) {
      pick->reserved_for_reuse = true;
      SimTime rtt = link_rtt_ps(params_.hw, graph_.links[rule.link].length_km);
      std::uint64_t request = req.id;
      int link = rule.link;
      std::uint64_t ep_id = pick->id;
      queue_.schedule(
          queue_.now() + rtt,
          [this, request, link, ep_id] {
            reuse_complete(request, link, ep_id);
            flush_rules();
          },
          "reuse", ep_id);
    } else {
      start_generation(rule.link, rule.primary, rule.slot_primary, rule.slot_other,
                       EpOrigin::kOnDemand, req.id, 0);
    }
  }
  return any;
}

}  // namespace acpsim
