// Street network model: nodes, directed edges, per-edge geometry.
//
// Edge ids follow the `e{i}_{j}` convention (directed from node i to node j);
// a two-way street is a pair of directed edges with distinct ids. All values
// are immutable after construction and safe to share across threads.

#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace rowbench::net {

struct Node {
  std::string id;
  double x = 0.0;
  double y = 0.0;
};

struct DirectedEdge {
  std::string id;
  std::string from_node;
  std::string to_node;
  double length_m = 0.0;
  double width_m = 0.0;      // total right-of-way width w
  double beta_faci = 0.0;    // fixed facility-belt fraction
  double v_max_veh = 13.0;   // m/s
  double v_max_ped = 1.2;    // m/s
  std::set<std::string> tags;

  bool has_tag(const std::string& t) const { return tags.count(t) > 0; }
};

class StreetNetwork {
 public:
  StreetNetwork() = default;
  StreetNetwork(std::string name, std::vector<Node> nodes, std::vector<DirectedEdge> edges)
      : name_(std::move(name)), nodes_(std::move(nodes)), edges_(std::move(edges)) {
    rebuild_indexes();
  }

  const std::string& name() const { return name_; }
  const std::vector<Node>& nodes() const { return nodes_; }
  const std::vector<DirectedEdge>& edges() const { return edges_; }
  std::size_t edge_count() const { return edges_.size(); }

  const DirectedEdge& edge(std::size_t index) const { return edges_.at(index); }

  std::optional<std::size_t> edge_index(const std::string& id) const {
    auto it = edge_by_id_.find(id);
    if (it == edge_by_id_.end()) return std::nullopt;
    return it->second;
  }

  const DirectedEdge& edge_by_id(const std::string& id) const {
    auto idx = edge_index(id);
    if (!idx) throw std::out_of_range("unknown edge id: " + id);
    return edges_[*idx];
  }

  bool has_node(const std::string& id) const { return node_by_id_.count(id) > 0; }

  // Outgoing edge indexes of a node, in file order.
  const std::vector<std::size_t>& outgoing(const std::string& node_id) const {
    static const std::vector<std::size_t> kEmpty;
    auto it = outgoing_.find(node_id);
    return it == outgoing_.end() ? kEmpty : it->second;
  }

  // Successors of an edge: edges departing from its head node.
  const std::vector<std::size_t>& successors(std::size_t edge_index) const {
    return outgoing(edges_.at(edge_index).to_node);
  }

  // Edges sharing a node with `edge_index`, excluding itself. Sorted by id.
  // This is the agent neighborhood used by non-local critics.
  std::vector<std::size_t> adjacent_edges(std::size_t edge_index) const {
    const auto& e = edges_.at(edge_index);
    std::set<std::pair<std::string, std::size_t>> found;
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      if (i == edge_index) continue;
      const auto& o = edges_[i];
      if (o.from_node == e.from_node || o.from_node == e.to_node ||
          o.to_node == e.from_node || o.to_node == e.to_node) {
        found.insert({o.id, i});
      }
    }
    std::vector<std::size_t> out;
    out.reserve(found.size());
    for (const auto& [id, i] : found) out.push_back(i);
    return out;
  }

  std::vector<std::string> edge_ids() const {
    std::vector<std::string> ids;
    ids.reserve(edges_.size());
    for (const auto& e : edges_) ids.push_back(e.id);
    return ids;
  }

 private:
  void rebuild_indexes() {
    edge_by_id_.clear();
    node_by_id_.clear();
    outgoing_.clear();
    for (std::size_t i = 0; i < nodes_.size(); ++i) node_by_id_.emplace(nodes_[i].id, i);
    for (std::size_t i = 0; i < edges_.size(); ++i) {
      edge_by_id_.emplace(edges_[i].id, i);
      outgoing_[edges_[i].from_node].push_back(i);
    }
  }

  std::string name_;
  std::vector<Node> nodes_;
  std::vector<DirectedEdge> edges_;
  std::map<std::string, std::size_t> edge_by_id_;
  std::map<std::string, std::size_t> node_by_id_;
  std::map<std::string, std::vector<std::size_t>> outgoing_;
};

}  // namespace rowbench::net
