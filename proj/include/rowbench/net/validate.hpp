#pragma once

#include <map>
#include <queue>
#include <sstream>
#include <string>
#include <vector>

#include "rowbench/net/types.hpp"

namespace rowbench::net {

// A violation is data, not a failure: collecting them lets a caller report
// every problem in a file at once.
struct Violation {
  std::string subject;  // edge or node id
  std::string reason;
};

namespace detail {

// Every edge reachable from every other edge, walking head-to-tail.
inline bool strongly_connected_over_edges(const StreetNetwork& net) {
  const std::size_t n = net.edge_count();
  if (n <= 1) return true;

  // Forward reachability from edge 0 plus backward reachability to edge 0
  // covering all edges means all edges live in one strongly connected
  // component.
  auto sweep = [&](bool forward) {
    std::vector<char> seen(n, 0);
    std::queue<std::size_t> frontier;
    seen[0] = 1;
    frontier.push(0);
    // Backward adjacency: predecessors of an edge are edges ending at its tail.
    std::map<std::string, std::vector<std::size_t>> incoming;
    if (!forward) {
      for (std::size_t i = 0; i < n; ++i) incoming[net.edge(i).to_node].push_back(i);
    }
    while (!frontier.empty()) {
      std::size_t cur = frontier.front();
      frontier.pop();
      const std::vector<std::size_t>* next_edges;
      if (forward) {
        next_edges = &net.successors(cur);
      } else {
        auto it = incoming.find(net.edge(cur).from_node);
        static const std::vector<std::size_t> kEmpty;
        next_edges = it == incoming.end() ? &kEmpty : &it->second;
      }
      for (std::size_t nxt : *next_edges) {
        if (!seen[nxt]) {
          seen[nxt] = 1;
          frontier.push(nxt);
        }
      }
    }
    for (char s : seen)
      if (!s) return false;
    return true;
  };

  return sweep(true) && sweep(false);
}

}  // namespace detail

// Checks every structural invariant of the network and its edges. An empty
// result means the network is valid.
inline std::vector<Violation> validate_network(const StreetNetwork& net) {
  std::vector<Violation> out;

  std::map<std::string, int> node_ids;
  for (const auto& node : net.nodes()) {
    if (++node_ids[node.id] == 2) out.push_back({node.id, "duplicate node id"});
  }

  std::map<std::string, int> edge_ids;
  for (const auto& e : net.edges()) {
    if (++edge_ids[e.id] == 2) out.push_back({e.id, "duplicate edge id"});
    if (!(e.length_m > 0.0)) out.push_back({e.id, "length_m must be > 0"});
    if (!(e.width_m > 0.0)) out.push_back({e.id, "width_m must be > 0"});
    if (e.beta_faci < 0.0 || e.beta_faci > 0.5)
      out.push_back({e.id, "beta_faci must lie in [0, 0.5]"});
    if (!(e.v_max_veh > 0.0)) out.push_back({e.id, "v_max_veh must be > 0"});
    if (!(e.v_max_ped > 0.0)) out.push_back({e.id, "v_max_ped must be > 0"});
    if (node_ids.find(e.from_node) == node_ids.end())
      out.push_back({e.id, "from_node references missing node " + e.from_node});
    if (node_ids.find(e.to_node) == node_ids.end())
      out.push_back({e.id, "to_node references missing node " + e.to_node});
  }

  // Structural checks only make sense once the basics hold.
  if (out.empty() && net.edge_count() > 0 && !detail::strongly_connected_over_edges(net)) {
    out.push_back({net.name().empty() ? std::string("network") : net.name(),
                   "edge graph is not strongly connected"});
  }
  return out;
}

inline std::string describe(const std::vector<Violation>& violations) {
  std::ostringstream os;
  for (const auto& v : violations) os << v.subject << ": " << v.reason << "\n";
  return os.str();
}

}  // namespace rowbench::net
