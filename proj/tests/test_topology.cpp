#include <set>

#include "acpsim/topology.h"
#include "doctest.h"

using namespace acpsim;

TEST_SUITE_BEGIN("topology");

TEST_CASE("two_node is a single link") {
  const auto g = build_two_node(10.0);
  CHECK(g.node_count() == 2);
  CHECK(g.links.size() == 1);
  CHECK(g.links[0].length_km == 10.0);
  const auto route = static_route(g, 0, 1);
  CHECK(route == std::vector<int>{0, 1});
}

TEST_CASE("route tie-break is lexicographic on node names") {
  Graph g;
  const int a = g.add_node("a");
  const int b = g.add_node("b");
  const int c = g.add_node("c");
  const int d = g.add_node("d");
  g.add_link(a, b, 1.0);
  g.add_link(b, d, 1.0);
  g.add_link(a, c, 1.0);
  g.add_link(c, d, 1.0);
  CHECK(static_route(g, a, d) == std::vector<int>{a, b, d});
  CHECK(static_route(g, d, a) == std::vector<int>{d, b, a});
}

TEST_CASE("shorter path beats lexicographically smaller one") {
  Graph g;
  const int a = g.add_node("a");
  const int b = g.add_node("b");
  const int z = g.add_node("z");
  g.add_link(a, b, 3.0);
  g.add_link(b, z, 3.0);
  g.add_link(a, z, 5.0);
  CHECK(static_route(g, a, z) == std::vector<int>{a, z});
}

TEST_CASE("unreachable nodes give an empty route") {
  Graph g;
  g.add_node("a");
  g.add_node("b");
  CHECK(static_route(g, 0, 1).empty());
}

TEST_CASE("bottleneck20 shape and routes") {
  const auto g = build_bottleneck20(10.0);
  CHECK(g.node_count() == 20);
  CHECK(g.links.size() == 19);
  const int n00 = g.find_node("n00");
  const int n08 = g.find_node("n08");
  const int n09 = g.find_node("n09");
  const int n10 = g.find_node("n10");
  const int n11 = g.find_node("n11");
  CHECK(static_route(g, n00, n11) == std::vector<int>{n00, n09, n10, n11});
  CHECK(static_route(g, n00, n08) == std::vector<int>{n00, n09, n08});
  // Every cross pair routes through the bottleneck: 9*9 pairs at 2 intermediates.
  CHECK(pairs_at_hops(g, 2).size() == 81);
}

TEST_CASE("as_graph is deterministic in its seed and well formed") {
  const auto g = build_as_graph(1, 10.0);
  CHECK(g.node_count() == 50);
  const auto g2 = build_as_graph(1, 10.0);
  REQUIRE(g.links.size() == g2.links.size());
  for (size_t i = 0; i < g.links.size(); ++i) {
    CHECK(g.links[i].a == g2.links[i].a);
    CHECK(g.links[i].b == g2.links[i].b);
  }
  // Fully connected: every node reaches node 0.
  for (int v = 1; v < g.node_count(); ++v) CHECK(!static_route(g, 0, v).empty());
  // Stubs are single-homed.
  for (int v = 0; v < g.node_count(); ++v) {
    if (g.names[v][0] == 's') CHECK(g.adj[v].size() == 1);
  }
}

TEST_CASE("as_graph offers stub pairs four intermediates apart") {
  const auto g = build_as_graph(1, 10.0);
  const auto pairs = pairs_at_hops(g, 4);
  CHECK(!pairs.empty());
  int stub_pairs = 0;
  for (const auto& [a, b] : pairs) {
    if (g.names[a][0] == 's' && g.names[b][0] == 's') ++stub_pairs;
  }
  CHECK(stub_pairs > 0);
}

TEST_SUITE_END();
