// Shortest-route queries over the edge graph.
//
// Paths are sequences of edge ids; two edges chain when the head node of one
// is the tail node of the next. Path cost is the sum of free-flow transit
// times of every edge in the sequence, endpoints included. Among equal-cost
// paths the lexicographically smallest edge-id sequence is returned, so
// routing is fully deterministic.

#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <vector>

#include "rowbench/net/types.hpp"

namespace rowbench::net {

struct RouteError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class TravelMode { vehicle, pedestrian };

inline double free_flow_time_s(const DirectedEdge& e, TravelMode mode) {
  return e.length_m / (mode == TravelMode::vehicle ? e.v_max_veh : e.v_max_ped);
}

// `closed[i] != 0` removes edge i from the graph (used for zero-lane edges).
inline std::vector<std::size_t> shortest_route_indexes(
    const StreetNetwork& net, std::size_t origin, std::size_t dest,
    TravelMode mode = TravelMode::vehicle, const std::vector<char>* closed = nullptr) {
  const std::size_t n = net.edge_count();
  if (origin >= n || dest >= n) throw RouteError("shortest_route: edge index out of range");
  auto is_closed = [&](std::size_t i) { return closed != nullptr && (*closed)[i] != 0; };
  if (is_closed(origin) || is_closed(dest))
    throw RouteError("shortest_route: origin or destination is closed");
  if (origin == dest) return {origin};

  std::vector<double> weight(n);
  for (std::size_t i = 0; i < n; ++i) weight[i] = free_flow_time_s(net.edge(i), mode);

  constexpr double kInf = std::numeric_limits<double>::infinity();
  using Item = std::pair<double, std::size_t>;

  auto dijkstra = [&](std::size_t source, bool forward) {
    std::vector<double> dist(n, kInf);
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    // Backward pass runs over reversed adjacency.
    std::vector<std::vector<std::size_t>> pred;
    if (!forward) {
      pred.resize(n);
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t s : net.successors(i)) pred[s].push_back(i);
    }
    dist[source] = weight[source];
    heap.push({dist[source], source});
    while (!heap.empty()) {
      auto [d, cur] = heap.top();
      heap.pop();
      if (d > dist[cur]) continue;
      const auto& next = forward ? net.successors(cur) : pred[cur];
      for (std::size_t nxt : next) {
        if (is_closed(nxt)) continue;
        double cand = d + weight[nxt];
        if (cand < dist[nxt]) {
          dist[nxt] = cand;
          heap.push({cand, nxt});
        }
      }
    }
    return dist;
  };

  const std::vector<double> dist_from = dijkstra(origin, true);
  if (dist_from[dest] == kInf)
    throw RouteError("shortest_route: destination " + net.edge(dest).id + " unreachable from " +
                     net.edge(origin).id);
  const std::vector<double> dist_to = dijkstra(dest, false);

  const double best = dist_from[dest];
  const double eps = 1e-9 * (1.0 + std::abs(best));
  auto on_shortest = [&](std::size_t e) {
    return dist_from[e] < kInf && dist_to[e] < kInf &&
           std::abs(dist_from[e] + dist_to[e] - weight[e] - best) <= eps;
  };

  // Greedy forward walk: at each step take the smallest-id successor that
  // still lies on a shortest path. This realizes the lexicographic tie-break.
  std::vector<std::size_t> path{origin};
  std::size_t cur = origin;
  while (cur != dest) {
    std::size_t pick = n;
    const std::string* pick_id = nullptr;
    for (std::size_t s : net.successors(cur)) {
      if (is_closed(s)) continue;
      if (std::abs(dist_from[cur] + weight[s] - dist_from[s]) > eps) continue;
      if (!on_shortest(s)) continue;
      if (pick == n || net.edge(s).id < *pick_id) {
        pick = s;
        pick_id = &net.edge(s).id;
      }
    }
    if (pick == n) throw RouteError("shortest_route: reconstruction failed");  // unreachable
    path.push_back(pick);
    cur = pick;
  }
  return path;
}

inline std::vector<std::string> shortest_route(const StreetNetwork& net,
                                               const std::string& origin_edge,
                                               const std::string& dest_edge,
                                               TravelMode mode = TravelMode::vehicle,
                                               const std::vector<char>* closed = nullptr) {
  auto o = net.edge_index(origin_edge);
  auto d = net.edge_index(dest_edge);
  if (!o) throw RouteError("shortest_route: unknown origin edge " + origin_edge);
  if (!d) throw RouteError("shortest_route: unknown destination edge " + dest_edge);
  std::vector<std::string> ids;
  for (std::size_t i : shortest_route_indexes(net, *o, *d, mode, closed))
    ids.push_back(net.edge(i).id);
  return ids;
}

}  // namespace rowbench::net
