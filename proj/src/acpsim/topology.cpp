#include "topology.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <queue>
#include <stdexcept>

#include "kernel.h"

namespace acpsim {

int Graph::add_node(std::string name) {
  names.push_back(std::move(name));
  adj.emplace_back();
  return node_count() - 1;
}

int Graph::add_link(int a, int b, double length_km) {
  if (a == b || a < 0 || b < 0 || a >= node_count() || b >= node_count()) {
    throw std::invalid_argument("bad link endpoints");
  }
  const int idx = static_cast<int>(links.size());
  links.push_back({a, b, length_km});
  adj[a].emplace_back(b, idx);
  adj[b].emplace_back(a, idx);
  return idx;
}

int Graph::find_node(const std::string& name) const {
  for (int i = 0; i < node_count(); ++i) {
    if (names[i] == name) return i;
  }
  return -1;
}

int Graph::link_between(int a, int b) const {
  for (const auto& [nbr, idx] : adj[a]) {
    if (nbr == b) return idx;
  }
  return -1;
}

namespace {

bool name_path_less(const Graph& g, const std::vector<int>& a, const std::vector<int>& b) {
  const size_t n = std::min(a.size(), b.size());
  for (size_t i = 0; i < n; ++i) {
    if (g.names[a[i]] != g.names[b[i]]) return g.names[a[i]] < g.names[b[i]];
  }
  return a.size() < b.size();
}

}  // namespace

std::vector<int> static_route(const Graph& g, int src, int dst) {
  constexpr double kInf = std::numeric_limits<double>::infinity();
  constexpr double kEps = 1e-9;
  std::vector<double> dist(g.node_count(), kInf);
  std::vector<std::vector<int>> path(g.node_count());
  dist[src] = 0.0;
  path[src] = {src};

  using QEntry = std::pair<double, int>;
  std::priority_queue<QEntry, std::vector<QEntry>, std::greater<>> pq;
  pq.push({0.0, src});
  while (!pq.empty()) {
    const auto [d, u] = pq.top();
    pq.pop();
    if (d > dist[u] + kEps) continue;
    for (const auto& [v, link] : g.adj[u]) {
      const double nd = dist[u] + g.links[link].length_km;
      std::vector<int> np = path[u];
      np.push_back(v);
      if (nd < dist[v] - kEps ||
          (std::abs(nd - dist[v]) <= kEps && name_path_less(g, np, path[v]))) {
        dist[v] = nd;
        path[v] = std::move(np);
        pq.push({nd, v});
      }
    }
  }
  return path[dst];
}

std::vector<std::pair<int, int>> pairs_at_hops(const Graph& g, int intermediates) {
  std::vector<std::pair<int, int>> out;
  for (int a = 0; a < g.node_count(); ++a) {
    for (int b = a + 1; b < g.node_count(); ++b) {
      const auto route = static_route(g, a, b);
      if (!route.empty() && static_cast<int>(route.size()) == intermediates + 2) {
        out.emplace_back(a, b);
      }
    }
  }
  return out;
}

Graph build_two_node(double link_km) {
  Graph g;
  const int a = g.add_node("n0");
  const int b = g.add_node("n1");
  g.add_link(a, b, link_km);
  return g;
}

Graph build_bottleneck20(double link_km) {
  Graph g;
  char buf[8];
  for (int i = 0; i < 20; ++i) {
    std::snprintf(buf, sizeof(buf), "n%02d", i);
    g.add_node(buf);
  }
  for (int i = 0; i <= 8; ++i) g.add_link(i, 9, link_km);
  g.add_link(9, 10, link_km);
  for (int i = 11; i <= 19; ++i) g.add_link(10, i, link_km);
  return g;
}

namespace {

// Weighted pick proportional to degree+1 among candidate nodes.
int preferential_pick(const Graph& g, const std::vector<int>& candidates, RngStream& rng) {
  double total = 0.0;
  for (int c : candidates) total += static_cast<double>(g.adj[c].size()) + 1.0;
  double r = rng.uniform01() * total;
  for (int c : candidates) {
    r -= static_cast<double>(g.adj[c].size()) + 1.0;
    if (r <= 0.0) return c;
  }
  return candidates.back();
}

}  // namespace

Graph build_as_graph(std::uint64_t as_seed, double link_km) {
  Graph g;
  RngStream rng(derive_seed(as_seed, "as_graph"));
  char buf[8];
  std::vector<int> core, gw, stub;
  for (int i = 0; i < 4; ++i) {
    std::snprintf(buf, sizeof(buf), "c%d", i);
    core.push_back(g.add_node(buf));
  }
  for (int i = 0; i < 12; ++i) {
    std::snprintf(buf, sizeof(buf), "g%02d", i);
    gw.push_back(g.add_node(buf));
  }
  for (int i = 0; i < 34; ++i) {
    std::snprintf(buf, sizeof(buf), "s%02d", i);
    stub.push_back(g.add_node(buf));
  }
  for (size_t i = 0; i < core.size(); ++i) {
    for (size_t j = i + 1; j < core.size(); ++j) g.add_link(core[i], core[j], link_km);
  }
  // Gateways draw their two core uplinks from a seed-shuffled rotation over
  // all six core pairs, so the tier stays diverse enough that distant stub
  // pairs exist at every seed.
  const std::pair<int, int> combos[6] = {{0, 1}, {2, 3}, {0, 2}, {1, 3}, {0, 3}, {1, 2}};
  int order[6] = {0, 1, 2, 3, 4, 5};
  for (int i = 5; i > 0; --i) {
    std::swap(order[i], order[rng.uniform_index(static_cast<std::uint64_t>(i) + 1)]);
  }
  for (size_t i = 0; i < gw.size(); ++i) {
    const auto& [x, y] = combos[order[i % 6]];
    g.add_link(gw[i], core[x], link_km);
    g.add_link(gw[i], core[y], link_km);
  }
  for (int n : stub) g.add_link(n, preferential_pick(g, gw, rng), link_km);
  int peers = 0;
  for (int attempt = 0; attempt < 100 && peers < 3; ++attempt) {
    const int a = gw[rng.uniform_index(gw.size())];
    const int b = gw[rng.uniform_index(gw.size())];
    if (a != b && g.link_between(a, b) < 0) {
      g.add_link(a, b, link_km);
      ++peers;
    }
  }
  return g;
}

}  // namespace acpsim
