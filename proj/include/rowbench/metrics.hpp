// Run metrics schemas and CSV serialization.
//
// metrics.csv      one row per episode (schema v1, stable column order)
// edge_metrics.csv one row per (episode, edge): per-edge sums the analysis
//                  stage turns into phase comparisons
//
// Formatting is deterministic, so identical runs produce byte-identical
// files.

#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "rowbench/rl/train.hpp"

namespace rowbench::metrics {

inline std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.10g", v);
  return buf;
}

inline constexpr const char* kMetricsHeader =
    "episode,scenario,seed,total_reward,r_sidewalk_sum,r_ped_sum,r_veh_sum,r_park_sum,"
    "mean_beta_sidewalk,mean_beta_veh,mean_beta_park,buffer_restorations,"
    "expired_parking_requests";

inline constexpr const char* kEdgeMetricsHeader =
    "episode,edge_id,r_sidewalk_sum,r_ped_sum,r_veh_sum,r_park_sum,total,k_dem_sum,"
    "k_park_mean,beta_sidewalk_mean,beta_veh_mean,beta_park_mean";

inline std::string to_csv_row(const rl::EpisodeMetrics& m) {
  std::ostringstream os;
  os << m.episode << ',' << m.scenario_id << ',' << m.seed << ',' << fmt(m.total_reward) << ','
     << fmt(m.r_sidewalk_sum) << ',' << fmt(m.r_ped_sum) << ',' << fmt(m.r_veh_sum) << ','
     << fmt(m.r_park_sum) << ',' << fmt(m.mean_beta_sidewalk) << ',' << fmt(m.mean_beta_veh)
     << ',' << fmt(m.mean_beta_park) << ',' << m.buffer_restorations << ','
     << m.expired_parking_requests;
  return os.str();
}

inline std::string to_csv_row(int episode, const rl::EdgeEpisodeMetrics& m) {
  std::ostringstream os;
  os << episode << ',' << m.edge_id << ',' << fmt(m.r_sidewalk_sum) << ',' << fmt(m.r_ped_sum)
     << ',' << fmt(m.r_veh_sum) << ',' << fmt(m.r_park_sum) << ',' << fmt(m.total) << ','
     << fmt(m.k_dem_sum) << ',' << fmt(m.k_park_mean) << ',' << fmt(m.beta_sidewalk_mean) << ','
     << fmt(m.beta_veh_mean) << ',' << fmt(m.beta_park_mean);
  return os.str();
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  return out;
}

inline std::vector<rl::EpisodeMetrics> read_metrics_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open metrics file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty metrics file: " + path);
  if (line != kMetricsHeader)
    throw std::runtime_error("unexpected metrics header in " + path);
  std::vector<rl::EpisodeMetrics> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 13) throw std::runtime_error("bad metrics row in " + path);
    rl::EpisodeMetrics m;
    m.episode = std::stoi(f[0]);
    m.scenario_id = std::stoi(f[1]);
    m.seed = std::stoull(f[2]);
    m.total_reward = std::stod(f[3]);
    m.r_sidewalk_sum = std::stod(f[4]);
    m.r_ped_sum = std::stod(f[5]);
    m.r_veh_sum = std::stod(f[6]);
    m.r_park_sum = std::stod(f[7]);
    m.mean_beta_sidewalk = std::stod(f[8]);
    m.mean_beta_veh = std::stod(f[9]);
    m.mean_beta_park = std::stod(f[10]);
    m.buffer_restorations = std::stoll(f[11]);
    m.expired_parking_requests = std::stoll(f[12]);
    rows.push_back(m);
  }
  return rows;
}

struct EdgeRow {
  int episode = 0;
  rl::EdgeEpisodeMetrics values;
};

inline std::vector<EdgeRow> read_edge_metrics_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open edge metrics file: " + path);
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("empty edge metrics file: " + path);
  if (line != kEdgeMetricsHeader)
    throw std::runtime_error("unexpected edge metrics header in " + path);
  std::vector<EdgeRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv_line(line);
    if (f.size() != 12) throw std::runtime_error("bad edge metrics row in " + path);
    EdgeRow r;
    r.episode = std::stoi(f[0]);
    r.values.edge_id = f[1];
    r.values.r_sidewalk_sum = std::stod(f[2]);
    r.values.r_ped_sum = std::stod(f[3]);
    r.values.r_veh_sum = std::stod(f[4]);
    r.values.r_park_sum = std::stod(f[5]);
    r.values.total = std::stod(f[6]);
    r.values.k_dem_sum = std::stod(f[7]);
    r.values.k_park_mean = std::stod(f[8]);
    r.values.beta_sidewalk_mean = std::stod(f[9]);
    r.values.beta_veh_mean = std::stod(f[10]);
    r.values.beta_park_mean = std::stod(f[11]);
    rows.push_back(std::move(r));
  }
  return rows;
}

}  // namespace rowbench::metrics
