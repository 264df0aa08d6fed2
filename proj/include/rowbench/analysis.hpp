// Post-hoc evaluation of a completed run: per-edge phase comparisons between
// early and late training episodes, three-way classification of the change,
// learning-curve extraction, and a plain-text run summary.

#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "rowbench/metrics.hpp"

namespace rowbench::analysis {

enum class Category { improved, worsened, unchanged };

inline const char* to_string(Category c) {
  switch (c) {
    case Category::improved: return "improved";
    case Category::worsened: return "worsened";
    case Category::unchanged: return "unchanged";
  }
  return "?";
}

struct EpisodeWindow {
  int lo = 0;
  int hi = 0;  // inclusive

  int length() const { return hi - lo + 1; }
};

struct PhaseStats {
  double early = 0.0;
  double late = 0.0;
  double delta = 0.0;
};

struct Classified {
  Category category = Category::unchanged;
  double relative_magnitude = 0.0;
};

// The canonical comparison windows: episodes 0-49 vs 100-149 when the run is
// long enough, otherwise first third vs last third.
inline std::pair<EpisodeWindow, EpisodeWindow> phase_windows(int episodes, bool* scaled = nullptr) {
  if (episodes >= 150) {
    if (scaled) *scaled = false;
    return {{0, 49}, {100, 149}};
  }
  if (episodes < 1) throw std::invalid_argument("phase_windows: no episodes");
  const int third = std::max(1, episodes / 3);
  if (scaled) *scaled = true;
  return {{0, third - 1}, {episodes - third, episodes - 1}};
}

// Arithmetic means of each edge's series over the two inclusive windows.
inline std::vector<PhaseStats> phase_means(const std::vector<std::vector<double>>& series_per_edge,
                                           EpisodeWindow early, EpisodeWindow late) {
  std::vector<PhaseStats> out;
  out.reserve(series_per_edge.size());
  for (const auto& series : series_per_edge) {
    if (early.lo < 0 || late.hi >= static_cast<int>(series.size()) || early.hi < early.lo ||
        late.hi < late.lo)
      throw std::invalid_argument("phase_means: window exceeds available episodes");
    PhaseStats s;
    for (int e = early.lo; e <= early.hi; ++e) s.early += series[e];
    for (int e = late.lo; e <= late.hi; ++e) s.late += series[e];
    s.early /= early.length();
    s.late /= late.length();
    s.delta = s.late - s.early;
    out.push_back(s);
  }
  return out;
}

// improved if delta > eps, worsened if delta < -eps, else unchanged.
// relative_magnitude = |delta| / mean over edges of |delta|; all zero when
// every delta sits inside the epsilon band.
inline std::vector<Classified> classify_edges(const std::vector<double>& deltas, double epsilon) {
  if (epsilon < 0.0) throw std::invalid_argument("classify_edges: epsilon must be >= 0");
  std::vector<Classified> out(deltas.size());
  bool any_outside = false;
  double mean_abs = 0.0;
  for (double d : deltas) {
    mean_abs += std::abs(d);
    if (std::abs(d) > epsilon) any_outside = true;
  }
  if (!deltas.empty()) mean_abs /= static_cast<double>(deltas.size());
  for (std::size_t i = 0; i < deltas.size(); ++i) {
    const double d = deltas[i];
    out[i].category =
        d > epsilon ? Category::improved : (d < -epsilon ? Category::worsened : Category::unchanged);
    out[i].relative_magnitude = (!any_outside || mean_abs == 0.0) ? 0.0 : std::abs(d) / mean_abs;
  }
  return out;
}

// Default unchanged-band: 1% of the cross-edge standard deviation of the
// early-phase means.
inline double default_epsilon(const std::vector<PhaseStats>& stats) {
  if (stats.empty()) return 0.0;
  double mean = 0.0;
  for (const auto& s : stats) mean += s.early;
  mean /= static_cast<double>(stats.size());
  double var = 0.0;
  for (const auto& s : stats) var += (s.early - mean) * (s.early - mean);
  var /= static_cast<double>(stats.size());
  return 0.01 * std::sqrt(var);
}

struct RunSummary {
  int episodes = 0;
  int scenario = 0;
  std::uint64_t seed = 0;
  double initial_total = 0.0;   // episode 0 cumulative reward
  double optimum_total = 0.0;   // best episode
  double increase = 0.0;        // optimum - initial
  double mean_step_increase = 0.0;  // (last - first) / (episodes - 1)
  double mean_r_sidewalk = 0.0, mean_r_ped = 0.0, mean_r_veh = 0.0, mean_r_park = 0.0;
  EpisodeWindow early, late;
  bool scaled_windows = false;
  // Late-phase minus early-phase means of the per-episode mean fractions.
  double beta_sidewalk_shift = 0.0;
  double beta_veh_shift = 0.0;
  double beta_park_shift = 0.0;
};

inline int sign_of(double v) { return v > 0.0 ? 1 : (v < 0.0 ? -1 : 0); }

inline RunSummary summarize_run(const std::vector<rl::EpisodeMetrics>& rows) {
  if (rows.empty()) throw std::invalid_argument("summarize_run: metrics are empty");
  RunSummary s;
  s.episodes = static_cast<int>(rows.size());
  s.scenario = rows.front().scenario_id;
  s.seed = rows.front().seed;
  s.initial_total = rows.front().total_reward;
  s.optimum_total = rows.front().total_reward;
  for (const auto& r : rows) s.optimum_total = std::max(s.optimum_total, r.total_reward);
  s.increase = s.optimum_total - s.initial_total;
  s.mean_step_increase =
      rows.size() > 1
          ? (rows.back().total_reward - rows.front().total_reward) / (rows.size() - 1.0)
          : 0.0;
  for (const auto& r : rows) {
    s.mean_r_sidewalk += r.r_sidewalk_sum;
    s.mean_r_ped += r.r_ped_sum;
    s.mean_r_veh += r.r_veh_sum;
    s.mean_r_park += r.r_park_sum;
  }
  s.mean_r_sidewalk /= s.episodes;
  s.mean_r_ped /= s.episodes;
  s.mean_r_veh /= s.episodes;
  s.mean_r_park /= s.episodes;

  auto [early, late] = phase_windows(s.episodes, &s.scaled_windows);
  s.early = early;
  s.late = late;
  auto window_mean = [&](auto getter, EpisodeWindow w) {
    double acc = 0.0;
    for (int e = w.lo; e <= w.hi; ++e) acc += getter(rows[e]);
    return acc / w.length();
  };
  auto bs = [](const rl::EpisodeMetrics& r) { return r.mean_beta_sidewalk; };
  auto bv = [](const rl::EpisodeMetrics& r) { return r.mean_beta_veh; };
  auto bp = [](const rl::EpisodeMetrics& r) { return r.mean_beta_park; };
  s.beta_sidewalk_shift = window_mean(bs, late) - window_mean(bs, early);
  s.beta_veh_shift = window_mean(bv, late) - window_mean(bv, early);
  s.beta_park_shift = window_mean(bp, late) - window_mean(bp, early);
  return s;
}

inline std::string summary_text(const RunSummary& s) {
  std::ostringstream os;
  os << "episodes: " << s.episodes << "\n";
  os << "scenario: " << s.scenario << "\n";
  os << "seed: " << s.seed << "\n";
  os << "initial cumulative reward (episode 0 sum over edges and slots): "
     << metrics::fmt(s.initial_total) << "\n";
  os << "optimum cumulative reward: " << metrics::fmt(s.optimum_total) << "\n";
  os << "increase (optimum - initial): " << metrics::fmt(s.increase) << "\n";
  os << "mean per-episode step increase: " << metrics::fmt(s.mean_step_increase) << "\n";
  os << "mean episode sub-reward sums: sidewalk " << metrics::fmt(s.mean_r_sidewalk) << ", ped "
     << metrics::fmt(s.mean_r_ped) << ", veh " << metrics::fmt(s.mean_r_veh) << ", park "
     << metrics::fmt(s.mean_r_park) << "\n";
  os << "phase windows: early Ep." << s.early.lo << "-Ep." << s.early.hi << ", late Ep."
     << s.late.lo << "-Ep." << s.late.hi << (s.scaled_windows ? " (scaled to run length)" : "")
     << "\n";
  os << "mean ROW fraction shifts (late phase mean - early phase mean, per edge-slot):\n";
  os << "  beta_sidewalk: " << metrics::fmt(s.beta_sidewalk_shift)
     << " (sign " << sign_of(s.beta_sidewalk_shift) << ")\n";
  os << "  beta_veh: " << metrics::fmt(s.beta_veh_shift) << " (sign " << sign_of(s.beta_veh_shift)
     << ")\n";
  os << "  beta_park: " << metrics::fmt(s.beta_park_shift) << " (sign "
     << sign_of(s.beta_park_shift) << ")\n";
  return os.str();
}

// --- run-directory analysis ---

struct EdgeSeries {
  std::vector<std::string> edge_ids;
  std::vector<std::vector<double>> values;  // [edge][episode]
};

inline EdgeSeries edge_series(const std::vector<metrics::EdgeRow>& rows,
                              double rl::EdgeEpisodeMetrics::*field) {
  std::map<std::string, std::vector<std::pair<int, double>>> per_edge;
  for (const auto& r : rows) per_edge[r.values.edge_id].push_back({r.episode, r.values.*field});
  EdgeSeries out;
  for (auto& [id, series] : per_edge) {
    std::sort(series.begin(), series.end());
    out.edge_ids.push_back(id);
    std::vector<double> v;
    v.reserve(series.size());
    for (const auto& [ep, val] : series) v.push_back(val);
    out.values.push_back(std::move(v));
  }
  return out;
}

// Writes edges_<metric>.csv, curves.csv, and summary.txt into out_dir.
// Pure function of the metrics: re-running produces identical artifacts.
inline void write_analysis_artifacts(const std::vector<rl::EpisodeMetrics>& episode_rows,
                                     const std::vector<metrics::EdgeRow>& edge_rows,
                                     const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  const RunSummary summary = summarize_run(episode_rows);
  {
    std::ofstream out(out_dir + "/summary.txt");
    out << summary_text(summary);
  }
  {
    std::ofstream out(out_dir + "/curves.csv");
    out << "episode,scenario,total,r_sidewalk,r_ped,r_veh,r_park\n";
    for (const auto& r : episode_rows) {
      out << r.episode << ',' << r.scenario_id << ',' << metrics::fmt(r.total_reward) << ','
          << metrics::fmt(r.r_sidewalk_sum) << ',' << metrics::fmt(r.r_ped_sum) << ','
          << metrics::fmt(r.r_veh_sum) << ',' << metrics::fmt(r.r_park_sum) << '\n';
    }
  }

  const std::pair<const char*, double rl::EdgeEpisodeMetrics::*> metrics_to_map[] = {
      {"r_ped", &rl::EdgeEpisodeMetrics::r_ped_sum},
      {"r_veh", &rl::EdgeEpisodeMetrics::r_veh_sum},
      {"k_dem", &rl::EdgeEpisodeMetrics::k_dem_sum},
      {"k_park", &rl::EdgeEpisodeMetrics::k_park_mean},
      {"beta_sidewalk", &rl::EdgeEpisodeMetrics::beta_sidewalk_mean},
      {"beta_veh", &rl::EdgeEpisodeMetrics::beta_veh_mean},
      {"beta_park", &rl::EdgeEpisodeMetrics::beta_park_mean},
  };
  for (const auto& [name, field] : metrics_to_map) {
    const EdgeSeries series = edge_series(edge_rows, field);
    if (series.values.empty()) continue;
    const auto stats = phase_means(series.values, summary.early, summary.late);
    std::vector<double> deltas;
    deltas.reserve(stats.size());
    for (const auto& s : stats) deltas.push_back(s.delta);
    const auto classes = classify_edges(deltas, default_epsilon(stats));
    std::ofstream out(out_dir + "/edges_" + name + ".csv");
    out << "edge_id,early,late,delta,category,relative_magnitude\n";
    for (std::size_t i = 0; i < stats.size(); ++i) {
      out << series.edge_ids[i] << ',' << metrics::fmt(stats[i].early) << ','
          << metrics::fmt(stats[i].late) << ',' << metrics::fmt(stats[i].delta) << ','
          << to_string(classes[i].category) << ',' << metrics::fmt(classes[i].relative_magnitude)
          << '\n';
    }
  }
}

}  // namespace rowbench::analysis
