// Network file format (JSON):
//
//   { "name": "grid4",
//     "nodes": [ {"id": "n1", "x": 0, "y": 0}, ... ],
//     "edges": [ {"id": "e1_2", "from": "n1", "to": "n2",
//                 "length_m": 150, "width_m": 14, "beta_faci": 0.1,
//                 "v_max_veh": 13.0, "v_max_ped": 1.2,
//                 "tags": ["exhibition"]}, ... ] }

#pragma once

#include <fstream>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "rowbench/net/types.hpp"

namespace rowbench::net {

inline StreetNetwork network_from_json(const nlohmann::json& j) {
  std::vector<Node> nodes;
  for (const auto& n : j.at("nodes")) {
    nodes.push_back({n.at("id").get<std::string>(), n.value("x", 0.0), n.value("y", 0.0)});
  }
  std::vector<DirectedEdge> edges;
  for (const auto& e : j.at("edges")) {
    DirectedEdge d;
    d.id = e.at("id").get<std::string>();
    d.from_node = e.at("from").get<std::string>();
    d.to_node = e.at("to").get<std::string>();
    d.length_m = e.at("length_m").get<double>();
    d.width_m = e.at("width_m").get<double>();
    d.beta_faci = e.value("beta_faci", 0.1);
    d.v_max_veh = e.value("v_max_veh", 13.0);
    d.v_max_ped = e.value("v_max_ped", 1.2);
    if (e.contains("tags"))
      for (const auto& t : e.at("tags")) d.tags.insert(t.get<std::string>());
    edges.push_back(std::move(d));
  }
  return StreetNetwork(j.value("name", ""), std::move(nodes), std::move(edges));
}

inline nlohmann::json network_to_json(const StreetNetwork& net) {
  nlohmann::json j;
  j["name"] = net.name();
  j["nodes"] = nlohmann::json::array();
  for (const auto& n : net.nodes()) j["nodes"].push_back({{"id", n.id}, {"x", n.x}, {"y", n.y}});
  j["edges"] = nlohmann::json::array();
  for (const auto& e : net.edges()) {
    nlohmann::json je{{"id", e.id},           {"from", e.from_node},
                      {"to", e.to_node},      {"length_m", e.length_m},
                      {"width_m", e.width_m}, {"beta_faci", e.beta_faci},
                      {"v_max_veh", e.v_max_veh}, {"v_max_ped", e.v_max_ped}};
    if (!e.tags.empty()) je["tags"] = e.tags;
    j["edges"].push_back(std::move(je));
  }
  return j;
}

inline StreetNetwork load_network(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open network file: " + path);
  nlohmann::json j;
  in >> j;
  return network_from_json(j);
}

inline void save_network(const StreetNetwork& net, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write network file: " + path);
  out << network_to_json(net).dump(2) << "\n";
}

}  // namespace rowbench::net
