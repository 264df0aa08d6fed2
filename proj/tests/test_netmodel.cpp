#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <set>
#include <vector>

#include "rowbench/net/allocation.hpp"
#include "rowbench/net/io.hpp"
#include "rowbench/net/layout.hpp"
#include "rowbench/net/routing.hpp"
#include "rowbench/net/types.hpp"
#include "rowbench/net/validate.hpp"
#include "rowbench/rng.hpp"

using namespace rowbench;
using net::DirectedEdge;
using net::Node;
using net::StreetNetwork;

namespace {

DirectedEdge make_edge(std::string id, std::string from, std::string to, double length = 100.0,
                       double width = 14.0) {
  DirectedEdge e;
  e.id = std::move(id);
  e.from_node = std::move(from);
  e.to_node = std::move(to);
  e.length_m = length;
  e.width_m = width;
  e.beta_faci = 0.1;
  return e;
}

StreetNetwork two_edge_pair() {
  return StreetNetwork("pair", {{"n1", 0, 0}, {"n2", 100, 0}},
                       {make_edge("e1_2", "n1", "n2"), make_edge("e2_1", "n2", "n1")});
}

// 3x3 grid of nodes, every street bidirectional, uniform geometry.
StreetNetwork grid3x3() {
  std::vector<Node> nodes;
  for (int i = 1; i <= 9; ++i)
    nodes.push_back({"n" + std::to_string(i), double((i - 1) % 3), double((i - 1) / 3)});
  const std::pair<int, int> streets[] = {{1, 2}, {2, 3}, {4, 5}, {5, 6}, {7, 8}, {8, 9},
                                         {1, 4}, {2, 5}, {3, 6}, {4, 7}, {5, 8}, {6, 9}};
  std::vector<DirectedEdge> edges;
  for (auto [i, j] : streets) {
    auto a = "n" + std::to_string(i), b = "n" + std::to_string(j);
    edges.push_back(make_edge("e" + std::to_string(i) + "_" + std::to_string(j), a, b));
    edges.push_back(make_edge("e" + std::to_string(j) + "_" + std::to_string(i), b, a));
  }
  return StreetNetwork("grid3x3", nodes, edges);
}

// Node-simple walks from `cur` node to `goal` node; a shortest edge path is
// origin + such a walk + dest, so enumerating them is a complete oracle.
void enumerate_walks(const StreetNetwork& netw, const std::string& cur, const std::string& goal,
                     std::set<std::string>& visited_nodes, std::vector<std::size_t>& walk,
                     std::vector<std::vector<std::size_t>>& out) {
  if (cur == goal) {
    out.push_back(walk);
    return;
  }
  for (std::size_t nxt : netw.outgoing(cur)) {
    const auto& e = netw.edge(nxt);
    if (visited_nodes.count(e.to_node)) continue;
    visited_nodes.insert(e.to_node);
    walk.push_back(nxt);
    enumerate_walks(netw, e.to_node, goal, visited_nodes, walk, out);
    walk.pop_back();
    visited_nodes.erase(e.to_node);
  }
}

std::vector<std::string> brute_force_route(const StreetNetwork& netw, const std::string& origin,
                                           const std::string& dest) {
  const std::size_t o = *netw.edge_index(origin), d = *netw.edge_index(dest);
  if (o == d) return {origin};
  std::vector<std::vector<std::size_t>> all;
  std::set<std::string> visited{netw.edge(o).to_node};
  std::vector<std::size_t> walk;
  enumerate_walks(netw, netw.edge(o).to_node, netw.edge(d).from_node, visited, walk, all);
  for (auto& w : all) {
    w.insert(w.begin(), o);
    w.push_back(d);
  }
  REQUIRE(!all.empty());
  auto cost = [&](const std::vector<std::size_t>& p) {
    double c = 0.0;
    for (std::size_t e : p) c += net::free_flow_time_s(netw.edge(e), net::TravelMode::vehicle);
    return c;
  };
  auto ids = [&](const std::vector<std::size_t>& p) {
    std::vector<std::string> v;
    for (std::size_t e : p) v.push_back(netw.edge(e).id);
    return v;
  };
  double best = cost(all[0]);
  for (const auto& p : all) best = std::min(best, cost(p));
  std::vector<std::string> best_ids;
  for (const auto& p : all) {
    if (cost(p) > best + 1e-9) continue;
    auto v = ids(p);
    if (best_ids.empty() || v < best_ids) best_ids = v;
  }
  return best_ids;
}

}  // namespace

TEST_CASE("validate_network accepts a minimal bidirectional pair") {
  CHECK(net::validate_network(two_edge_pair()).empty());
}

TEST_CASE("validate_network reports missing nodes by id") {
  StreetNetwork bad("bad", {{"n1", 0, 0}, {"n2", 0, 0}},
                    {make_edge("e1_2", "n1", "n2"), make_edge("e2_1", "n2", "n99")});
  const auto v = net::validate_network(bad);
  REQUIRE(!v.empty());
  bool mentions_n99 = false;
  for (const auto& viol : v) mentions_n99 |= viol.reason.find("n99") != std::string::npos;
  CHECK(mentions_n99);
}

TEST_CASE("validate_network reports duplicate edge ids") {
  StreetNetwork bad("bad", {{"n1", 0, 0}, {"n2", 0, 0}},
                    {make_edge("e1_2", "n1", "n2"), make_edge("e1_2", "n2", "n1")});
  const auto v = net::validate_network(bad);
  bool dup = false;
  for (const auto& viol : v)
    dup |= viol.subject == "e1_2" && viol.reason.find("duplicate") != std::string::npos;
  CHECK(dup);
}

TEST_CASE("validate_network flags broken connectivity") {
  // One-way edge pair that cannot return.
  StreetNetwork bad("bad", {{"n1", 0, 0}, {"n2", 0, 0}, {"n3", 0, 0}},
                    {make_edge("e1_2", "n1", "n2"), make_edge("e3_2", "n3", "n2")});
  const auto v = net::validate_network(bad);
  bool conn = false;
  for (const auto& viol : v) conn |= viol.reason.find("connected") != std::string::npos;
  CHECK(conn);
}

TEST_CASE("project_action splits the residual evenly for symmetric inputs") {
  const auto a = net::project_action({0.0, 0.0, 0.0}, 0.1, net::ProjectionConfig{0.0, 0.0, 0.0});
  CHECK(a.beta_sidewalk == Catch::Approx(0.3).margin(1e-12));
  CHECK(a.beta_veh == Catch::Approx(0.3).margin(1e-12));
  CHECK(a.beta_park == Catch::Approx(0.3).margin(1e-12));
  CHECK(a.beta_faci == Catch::Approx(0.1).margin(1e-12));
}

TEST_CASE("project_action saturates toward the dominant component") {
  const auto a =
      net::project_action({50.0, 0.0, 0.0}, 0.1, net::ProjectionConfig{0.05, 0.05, 0.0});
  CHECK(a.beta_sidewalk == Catch::Approx(0.85).margin(1e-6));
  CHECK(a.beta_veh == Catch::Approx(0.05).margin(1e-6));
  CHECK(a.beta_park == Catch::Approx(0.0).margin(1e-6));
  CHECK(a.beta_faci == Catch::Approx(0.1).margin(1e-12));
}

TEST_CASE("project_action matches the closed-form evaluation") {
  // 0.9 * (e^1, e^0, e^-1) / (e^1 + e^0 + e^-1), evaluated independently.
  const auto a = net::project_action({1.0, 0.0, -1.0}, 0.1, net::ProjectionConfig{0.0, 0.0, 0.0});
  CHECK(a.beta_sidewalk == Catch::Approx(0.5987168601973397).margin(1e-12));
  CHECK(a.beta_veh == Catch::Approx(0.2202556239493179).margin(1e-12));
  CHECK(a.beta_park == Catch::Approx(0.08102751585334242).margin(1e-12));
}

TEST_CASE("project_action rejects bad inputs") {
  CHECK_THROWS_AS(net::project_action({std::nan(""), 0.0, 0.0}, 0.1), std::invalid_argument);
  CHECK_THROWS_AS(
      net::project_action({0.0, 0.0, 0.0}, 0.5, net::ProjectionConfig{0.3, 0.2, 0.1}),
      std::invalid_argument);
}

TEST_CASE("project_action properties: simplex, minima, shift invariance") {
  SplitMix64 rng(20240811);
  const net::ProjectionConfig cfg{0.05, 0.0, 0.0};
  for (int trial = 0; trial < 200; ++trial) {
    std::array<double, 3> raw{rng.uniform(-30, 30), rng.uniform(-30, 30), rng.uniform(-30, 30)};
    const double faci = rng.uniform(0.0, 0.4);
    const auto a = net::project_action(raw, faci, cfg);
    CHECK(std::abs(a.sum() - 1.0) <= 1e-9);
    CHECK(a.beta_sidewalk >= cfg.min_sidewalk_frac - 1e-12);
    CHECK(a.beta_veh >= -1e-12);
    CHECK(a.beta_park >= -1e-12);
    CHECK(net::allocation_valid(a, cfg));

    const double c = rng.uniform(-15, 15);
    const auto b = net::project_action({raw[0] + c, raw[1] + c, raw[2] + c}, faci, cfg);
    CHECK(std::abs(a.beta_sidewalk - b.beta_sidewalk) <= 1e-9);
    CHECK(std::abs(a.beta_veh - b.beta_veh) <= 1e-9);
    CHECK(std::abs(a.beta_park - b.beta_park) <= 1e-9);
  }
}

TEST_CASE("quantize_layout floors lanes and gates the parking strip") {
  DirectedEdge e = make_edge("e1_2", "n1", "n2", 120.0, 20.0);
  net::QuantizationConfig geom;  // 3.0 / 2.0 / 6.0

  net::RowAllocation a{0.4, 0.3, 0.1, 0.2};
  auto layout = net::quantize_layout(a, e, geom);
  CHECK(layout.n_lanes == 2);  // floor(0.3 * 20 / 3)
  CHECK(layout.parking_strip_active);
  CHECK(layout.parking_capacity == 20);  // floor(120 / 6), strip 4 m >= 2 m
  CHECK(layout.sidewalk_width_m == Catch::Approx(8.0));

  // Strip below threshold: 1.9 m < 2.0 m.
  net::RowAllocation b{0.505, 0.3, 0.1, 0.095};
  layout = net::quantize_layout(b, e, geom);
  CHECK_FALSE(layout.parking_strip_active);
  CHECK(layout.parking_capacity == 0);
}

TEST_CASE("quantize_layout is monotone in beta_veh and beta_park") {
  DirectedEdge e = make_edge("e1_2", "n1", "n2", 137.0, 16.0);
  SplitMix64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    double v1 = rng.uniform(0.0, 0.6), v2 = rng.uniform(0.0, 0.6);
    if (v1 > v2) std::swap(v1, v2);
    double p1 = rng.uniform(0.0, 0.4), p2 = rng.uniform(0.0, 0.4);
    if (p1 > p2) std::swap(p1, p2);
    const auto la = net::quantize_layout({0.2, v1, 0.1, p1}, e);
    const auto lb = net::quantize_layout({0.2, v2, 0.1, p2}, e);
    CHECK(la.n_lanes <= lb.n_lanes);
    CHECK(la.parking_capacity <= lb.parking_capacity);
  }
}

TEST_CASE("shortest_route identity and chain") {
  const auto netw = two_edge_pair();
  CHECK(net::shortest_route(netw, "e1_2", "e1_2") == std::vector<std::string>{"e1_2"});

  StreetNetwork chain("chain", {{"n1", 0, 0}, {"n2", 0, 0}, {"n3", 0, 0}},
                      {make_edge("eA", "n1", "n2"), make_edge("eB", "n2", "n3"),
                       make_edge("eBack", "n3", "n1")});
  CHECK(net::shortest_route(chain, "eA", "eB") == std::vector<std::string>{"eA", "eB"});
}

TEST_CASE("shortest_route matches brute force on the 3x3 grid, corner to corner") {
  const auto netw = grid3x3();
  const auto got = net::shortest_route(netw, "e1_2", "e6_9");
  const auto want = brute_force_route(netw, "e1_2", "e6_9");
  CHECK(got == want);
  CHECK(got.size() == 4);  // minimal edge count under uniform weights
}

TEST_CASE("shortest_route matches brute force on random ring-and-chord graphs") {
  SplitMix64 rng(99);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 5 + static_cast<int>(rng.uniform_index(3));  // 5..7 nodes
    std::vector<Node> nodes;
    for (int i = 1; i <= n; ++i) nodes.push_back({"n" + std::to_string(i), 0, 0});
    std::vector<DirectedEdge> edges;
    auto add = [&](int i, int j) {
      const std::string id = "e" + std::to_string(i) + "_" + std::to_string(j);
      for (const auto& e : edges)
        if (e.id == id) return;
      auto e = make_edge(id, "n" + std::to_string(i), "n" + std::to_string(j),
                         50.0 + 10.0 * static_cast<double>(rng.uniform_index(20)));
      edges.push_back(e);
    };
    for (int i = 1; i <= n; ++i) add(i, i % n + 1);  // directed ring keeps it connected
    for (int c = 0; c < 3; ++c) {
      int i = 1 + static_cast<int>(rng.uniform_index(n));
      int j = 1 + static_cast<int>(rng.uniform_index(n));
      if (i != j) add(i, j);
    }
    StreetNetwork netw("rand", nodes, edges);
    REQUIRE(net::validate_network(netw).empty());
    const std::size_t o = rng.uniform_index(netw.edge_count());
    const std::size_t d = rng.uniform_index(netw.edge_count());
    const auto got = net::shortest_route(netw, netw.edge(o).id, netw.edge(d).id);
    const auto want = brute_force_route(netw, netw.edge(o).id, netw.edge(d).id);
    CHECK(got == want);
  }
}

TEST_CASE("shortest_route reports unreachable destinations") {
  StreetNetwork netw("pair", {{"n1", 0, 0}, {"n2", 0, 0}},
                     {make_edge("e1_2", "n1", "n2"), make_edge("e2_1", "n2", "n1")});
  std::vector<char> closed{0, 1};
  CHECK_THROWS_AS(net::shortest_route(netw, "e1_2", "e2_1", net::TravelMode::vehicle, &closed),
                  net::RouteError);
}

TEST_CASE("bundled networks load and validate") {
  for (const char* name : {"grid4", "kensington12", "kensington58"}) {
    const auto netw = net::load_network(std::string(ROWBENCH_DATA_DIR) + "/" + name + ".json");
    CAPTURE(name);
    CHECK(net::validate_network(netw).empty());
  }
  const auto k58 = net::load_network(std::string(ROWBENCH_DATA_DIR) + "/kensington58.json");
  CHECK(k58.edge_count() == 58);
  CHECK(k58.edge_index("e12_13").has_value());
  std::size_t exhibition = 0;
  for (const auto& e : k58.edges()) exhibition += e.has_tag("exhibition") ? 1 : 0;
  CHECK(exhibition == 6);
}

TEST_CASE("network json round-trips") {
  const auto netw = grid3x3();
  const auto j = net::network_to_json(netw);
  const auto back = net::network_from_json(j);
  REQUIRE(back.edge_count() == netw.edge_count());
  for (std::size_t i = 0; i < netw.edge_count(); ++i) {
    CHECK(back.edge(i).id == netw.edge(i).id);
    CHECK(back.edge(i).length_m == netw.edge(i).length_m);
  }
}
