#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace acpsim {

struct LinkSpec {
  int a = -1;
  int b = -1;
  double length_km = 0.0;
};

struct Graph {
  std::vector<std::string> names;
  std::vector<LinkSpec> links;
  // node -> list of (neighbor node, link index)
  std::vector<std::vector<std::pair<int, int>>> adj;

  int node_count() const { return static_cast<int>(names.size()); }
  int add_node(std::string name);
  int add_link(int a, int b, double length_km);
  int find_node(const std::string& name) const;
  int link_between(int a, int b) const;
};

// Shortest path by total length; among equal-length paths the one whose node
// name sequence compares lexicographically smallest wins, so routing is
// deterministic.  Returns node ids including both endpoints, empty if
// unreachable.
std::vector<int> static_route(const Graph& g, int src, int dst);

// All unordered pairs whose route has exactly `intermediates` in-between nodes.
std::vector<std::pair<int, int>> pairs_at_hops(const Graph& g, int intermediates);

Graph build_two_node(double link_km);
Graph build_bottleneck20(double link_km);
// Tiered autonomous-system style graph: a complete 4-node core, 12 gateways
// with two preferential uplinks each, 34 single-homed stubs, and a few
// gateway peer links.  Structure depends only on as_seed.
Graph build_as_graph(std::uint64_t as_seed, double link_km);

}  // namespace acpsim
