// Mesoscopic slot simulator.
//
// One call to run_slot advances the world by one slot (default 1,800 s) in
// fixed ticks. Vehicles and pedestrians move along precomputed edge routes
// at the prevailing edge speed from the speed-density relations; vehicles
// carry accel/decel inertia and a per-vehicle max-speed factor. Parking is
// a per-edge bay pool: on entering an edge a parking-seeking vehicle may
// request a bay (sigmoid in current occupancy); rejected requests count as
// expired demand and the vehicle keeps driving.
//
// Rules the rest of the system relies on:
//  - Zero-lane edges are closed to entering vehicles. Trips reroute around
//    them at injection and at edge transitions; with no alternative the
//    vehicle waits at the end of its current edge. Vehicles already on a
//    closed edge crawl out using a one-lane density.
//  - Vehicles enter an edge at its prevailing speed (they arrive moving);
//    acceleration bounds apply to subsequent changes.
//  - Parked vehicles do not count toward driving density and are invisible
//    to the speed observations; they occupy bays until their departure time.
//  - When a new layout shrinks capacity below current occupancy, the excess
//    parked vehicles are evicted back into traffic at slot start (latest
//    departure time first, ties by trip id).
//  - At slot end every non-done trip moves into the outgoing buffer;
//    restoring them in the next slot increments the cumulative
//    restoration_count carried by the buffer.

#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "rowbench/net/layout.hpp"
#include "rowbench/net/routing.hpp"
#include "rowbench/net/types.hpp"
#include "rowbench/rng.hpp"
#include "rowbench/sim/observation.hpp"
#include "rowbench/sim/params.hpp"
#include "rowbench/sim/speed.hpp"
#include "rowbench/sim/trip.hpp"

namespace rowbench::sim {

enum class ParkOutcome { parked, expired };

// Probability sigma(bias + gain * (1 - occupancy_ratio)); exactly one draw.
inline bool decide_park(const ActiveTrip& trip, double edge_occupancy_ratio, const SimParams& p,
                        SplitMix64& rng) {
  (void)trip;
  const double z = p.park_sigmoid_bias + p.park_sigmoid_gain * (1.0 - edge_occupancy_ratio);
  const double prob = 1.0 / (1.0 + std::exp(-z));
  return rng.uniform01() < prob;
}

// Grants a bay if one is free; otherwise the request expires and the vehicle
// continues. `occupied` is the edge's current bay occupancy and is updated
// in place on success.
inline ParkOutcome handle_parking_request(ActiveTrip& trip, const net::DiscreteLayout& layout,
                                          int& occupied, double now_s, const SimParams& p,
                                          SplitMix64& rng) {
  if (occupied < layout.parking_capacity) {
    ++occupied;
    trip.state = TripState::parked;
    trip.speed_mps = 0.0;
    trip.parked_until_s = now_s + rng.exponential(p.park_duration_mean_s);
    return ParkOutcome::parked;
  }
  return ParkOutcome::expired;
}

struct SlotOutput {
  std::vector<SlotObservation> obs;  // indexed by edge
  TripBuffer buffer_out;
  std::vector<std::string> completed;  // trip ids finished within the slot
  std::int64_t restored_now = 0;       // trips restored from buffer_in
};

namespace detail {

struct TripRuntime {
  SplitMix64 rng{0};
  std::vector<std::uint32_t> observed_edges;  // edges already counted this slot
};

class SlotSim {
 public:
  SlotSim(const net::StreetNetwork& net, const std::vector<net::DiscreteLayout>& layouts,
          const SimParams& params, std::uint64_t seed, int slot_index)
      : net_(net),
        layouts_(layouts),
        params_(params),
        slot_index_(slot_index),
        slot_key_(RngKey(seed).with("slot").with(static_cast<std::uint64_t>(slot_index))) {
    const std::size_t n = net.edge_count();
    if (layouts.size() != n)
      throw std::invalid_argument("run_slot: layouts must cover every edge");
    moving_veh_.assign(n, 0);
    peds_.assign(n, 0);
    occupied_.assign(n, 0);
    closed_.assign(n, 0);
    for (std::size_t e = 0; e < n; ++e) closed_[e] = layouts[e].n_lanes == 0 ? 1 : 0;
    veh_speed_.assign(n, 0.0);
    ped_speed_.assign(n, 0.0);
    rel_sum_veh_.assign(n, 0.0);
    rel_cnt_veh_.assign(n, 0);
    rel_sum_ped_.assign(n, 0.0);
    rel_cnt_ped_.assign(n, 0);
    occupied_sum_.assign(n, 0.0);
    k_dem_.assign(n, 0);
    expired_.assign(n, 0);
    slot_start_s_ = slot_index * params.slot_length_s;
  }

  SlotOutput run(std::vector<TripRequest> due, const TripBuffer& buffer_in) {
    validate_due(due);
    SlotOutput out;
    out.restored_now = restore(buffer_in);

    const int ticks = params_.ticks_per_slot();
    const int obs_every = static_cast<int>(params_.obs_interval_s / params_.tick_s);
    std::size_t due_next = 0;
    int snapshots = 0;

    for (int k = 0; k < ticks; ++k) {
      const double t = slot_start_s_ + k * params_.tick_s;
      while (due_next < due.size() && due[due_next].depart_s <= t + 1e-9) {
        inject(due[due_next]);
        ++due_next;
      }
      compute_edge_speeds();
      wake_parked(t + params_.tick_s);
      advance(t);
      if ((k + 1) % obs_every == 0) {
        sample_snapshot();
        ++snapshots;
      }
    }
    while (due_next < due.size()) {  // departures in the final tick window
      inject(due[due_next]);
      ++due_next;
    }

    out.obs = finalize_observations(snapshots);
    out.completed = std::move(completed_);
    out.buffer_out = make_buffer(buffer_in.restoration_count + out.restored_now);
    return out;
  }

 private:
  void validate_due(const std::vector<TripRequest>& due) const {
    const double lo = slot_start_s_;
    const double hi = slot_start_s_ + params_.slot_length_s;
    double prev = lo;
    for (const auto& r : due) {
      if (r.depart_s < lo || r.depart_s >= hi)
        throw std::invalid_argument("run_slot: trip " + r.id + " departs outside the slot window");
      if (r.depart_s < prev)
        throw std::invalid_argument("run_slot: due list not sorted by depart_s");
      prev = r.depart_s;
    }
  }

  std::int64_t restore(const TripBuffer& buffer_in) {
    std::int64_t restored = 0;
    for (const auto& carried : buffer_in.carried) {
      for (const auto& eid : carried.route) {
        if (!net_.edge_index(eid))
          throw std::runtime_error("restore_trips: edge " + eid + " not in network");
      }
      std::size_t idx = add_trip(carried);
      ActiveTrip& t = trips_[idx];
      const std::size_t e = edge_of(t);
      if (t.state == TripState::parked) {
        parked_on_edge_[e].push_back(idx);
      } else {
        enter_counts(e, t);
      }
      ++restored;
    }
    evict_over_capacity();
    for (std::size_t i = 0; i < trips_.size(); ++i) {
      if (trips_[i].state == TripState::parked)
        parked_heap_.push({-*trips_[i].parked_until_s, i});
    }
    return restored;
  }

  // Deterministic eviction when a new layout lost bays: drop the latest
  // departure times first so freed bays serve near-term turnover.
  void evict_over_capacity() {
    for (std::size_t e = 0; e < net_.edge_count(); ++e) {
      auto& parked = parked_on_edge_[e];
      std::sort(parked.begin(), parked.end(), [&](std::size_t a, std::size_t b) {
        const double ua = *trips_[a].parked_until_s, ub = *trips_[b].parked_until_s;
        if (ua != ub) return ua > ub;
        return trips_[a].request.id > trips_[b].request.id;
      });
      const int cap = layouts_[e].parking_capacity;
      std::size_t keep = parked.size();
      while (keep > static_cast<std::size_t>(cap)) {
        std::size_t idx = parked[parked.size() - keep];
        ActiveTrip& t = trips_[idx];
        t.state = TripState::driving;
        t.parked_until_s.reset();
        t.speed_mps = 0.0;
        enter_counts(e, t);
        active_.push_back(idx);
        --keep;
      }
      occupied_[e] = static_cast<int>(keep);
    }
  }

  std::size_t add_trip(const ActiveTrip& t) {
    trips_.push_back(t);
    runtime_.push_back(TripRuntime{trip_stream(t.request.id), {}});
    std::size_t idx = trips_.size() - 1;
    if (t.state != TripState::parked && t.state != TripState::done) active_.push_back(idx);
    return idx;
  }

  SplitMix64 trip_stream(const std::string& id) const {
    return slot_key_.with("trip").with(id).stream();
  }

  void inject(const TripRequest& req) {
    ActiveTrip t;
    t.request = req;
    t.route = plan_route(req);
    t.route_index = 0;
    t.position_m = 0.0;
    t.state = req.mode == TripMode::vehicle
                  ? (req.wants_parking ? TripState::seeking_parking : TripState::driving)
                  : TripState::walking;
    if (req.mode == TripMode::vehicle) {
      SplitMix64 sf = slot_key_.with("sf").with(req.id).stream();
      t.speed_factor = 1.0 + params_.veh_speed_factor * (2.0 * sf.uniform01() - 1.0);
    }
    std::size_t idx = add_trip(t);
    ActiveTrip& trip = trips_[idx];
    const std::size_t e = edge_of(trip);
    enter_counts(e, trip);
    trip.speed_mps = entry_speed(e, trip);
    ++injected_;
    on_edge_entered(idx, e);
    if (trips_[idx].state == TripState::parked) active_.pop_back();  // parked at the kerb already
  }

  std::vector<std::string> plan_route(const TripRequest& req) const {
    if (req.mode == TripMode::pedestrian) {
      if (!req.route.empty()) return req.route;
      return net::shortest_route(net_, req.origin_edge, req.dest_edge,
                                 net::TravelMode::pedestrian);
    }
    // Vehicles route around closed edges when possible; otherwise fall back
    // to the static free-flow route and queue at closures.
    const bool any_closed = std::any_of(closed_.begin(), closed_.end(), [](char c) { return c; });
    if (!any_closed && !req.route.empty()) return req.route;
    try {
      return net::shortest_route(net_, req.origin_edge, req.dest_edge, net::TravelMode::vehicle,
                                 any_closed ? &closed_ : nullptr);
    } catch (const net::RouteError&) {
      if (!req.route.empty()) return req.route;
      return net::shortest_route(net_, req.origin_edge, req.dest_edge, net::TravelMode::vehicle);
    }
  }

  std::size_t edge_of(const ActiveTrip& t) const {
    auto idx = net_.edge_index(t.route.at(t.route_index));
    if (!idx) throw std::runtime_error("trip references unknown edge " + t.route[t.route_index]);
    return *idx;
  }

  void enter_counts(std::size_t e, const ActiveTrip& t) {
    if (t.request.mode == TripMode::vehicle)
      ++moving_veh_[e];
    else
      ++peds_[e];
  }

  void leave_counts(std::size_t e, const ActiveTrip& t) {
    if (t.request.mode == TripMode::vehicle)
      --moving_veh_[e];
    else
      --peds_[e];
  }

  double entry_speed(std::size_t e, const ActiveTrip& t) const {
    if (t.request.mode == TripMode::pedestrian) return current_ped_speed(e);
    return std::min(current_veh_speed(e), t.speed_factor * net_.edge(e).v_max_veh);
  }

  double current_veh_speed(std::size_t e) const {
    const auto& edge = net_.edge(e);
    const int lanes = std::max(layouts_[e].n_lanes, 1);
    const double density = static_cast<double>(moving_veh_[e]) / (edge.length_m * lanes);
    return veh_edge_speed(density, params_, edge.v_max_veh);
  }

  double current_ped_speed(std::size_t e) const {
    const auto& edge = net_.edge(e);
    const double width = std::max(layouts_[e].sidewalk_width_m, params_.ped_body_width_m);
    const double density = static_cast<double>(peds_[e]) / (edge.length_m * width);
    return ped_edge_speed(density, layouts_[e].sidewalk_width_m, params_);
  }

  void compute_edge_speeds() {
    for (std::size_t e = 0; e < net_.edge_count(); ++e) {
      veh_speed_[e] = current_veh_speed(e);
      ped_speed_[e] = current_ped_speed(e);
    }
  }

  void wake_parked(double until) {
    while (!parked_heap_.empty() && -parked_heap_.top().first <= until) {
      auto [neg_until, idx] = parked_heap_.top();
      parked_heap_.pop();
      ActiveTrip& t = trips_[idx];
      if (t.state != TripState::parked) continue;  // stale entry
      const std::size_t e = edge_of(t);
      t.state = TripState::driving;
      t.parked_until_s.reset();
      t.speed_mps = 0.0;
      --occupied_[e];
      enter_counts(e, t);
      active_.push_back(idx);
    }
  }

  void advance(double t_now) {
    const double dt = params_.tick_s;
    for (std::size_t a = 0; a < active_.size();) {
      const std::size_t idx = active_[a];
      ActiveTrip& t = trips_[idx];
      std::size_t e = edge_of(t);

      double target, v;
      if (t.request.mode == TripMode::pedestrian) {
        v = ped_speed_[e];  // no inertia
      } else {
        target = std::min(veh_speed_[e], t.speed_factor * net_.edge(e).v_max_veh);
        v = std::clamp(target, t.speed_mps - params_.veh_decel_mps2 * dt,
                       t.speed_mps + params_.veh_accel_mps2 * dt);
        v = std::max(v, 0.0);
      }
      t.speed_mps = v;
      t.position_m += v * dt;

      bool removed = false;
      while (t.position_m >= net_.edge(e).length_m) {
        if (t.route_index + 1 >= t.route.size()) {  // destination reached
          t.position_m = net_.edge(e).length_m;
          t.state = TripState::done;
          leave_counts(e, t);
          completed_.push_back(t.request.id);
          ++completed_count_;
          active_[a] = active_.back();
          active_.pop_back();
          removed = true;
          break;
        }
        std::size_t next = *net_.edge_index(t.route[t.route_index + 1]);
        if (t.request.mode == TripMode::vehicle && closed_[next]) {
          bool stuck = !try_reroute(t, e);
          if (!stuck) {
            next = *net_.edge_index(t.route[t.route_index + 1]);
            stuck = closed_[next];
          }
          if (stuck) {
            // Queue at the closure. The closure set is fixed for the rest of
            // the slot, so the vehicle goes dormant: it keeps occupying the
            // edge (density, observations) but is not advanced again until
            // the next slot restores it.
            t.position_m = net_.edge(e).length_m;
            t.speed_mps = 0.0;
            blocked_.push_back(idx);
            active_[a] = active_.back();
            active_.pop_back();
            removed = true;
            break;
          }
        }
        const double overshoot = t.position_m - net_.edge(e).length_m;
        leave_counts(e, t);
        ++t.route_index;
        e = next;
        t.position_m = std::min(overshoot, net_.edge(e).length_m);
        enter_counts(e, t);
        if (t.request.mode == TripMode::vehicle)
          t.speed_mps = std::min(entry_speed(e, t), t.speed_mps + params_.veh_accel_mps2 * dt);
        on_edge_entered(idx, e, t_now + dt);
        if (t.state == TripState::parked) {
          active_[a] = active_.back();
          active_.pop_back();
          removed = true;
          break;
        }
      }
      if (!removed) ++a;
    }
  }

  // Parking request on entering an edge (including the origin edge at
  // injection, where t_now is the departure time).
  void on_edge_entered(std::size_t idx, std::size_t e, double t_now = -1.0) {
    ActiveTrip& t = trips_[idx];
    if (t.request.mode != TripMode::vehicle || !t.request.wants_parking) return;
    if (t.parked_once || t.state == TripState::parked) return;
    if (t_now < 0.0) t_now = t.request.depart_s;

    const int cap = layouts_[e].parking_capacity;
    const double occupancy_ratio =
        cap > 0 ? static_cast<double>(occupied_[e]) / cap : 1.0;
    if (!decide_park(t, occupancy_ratio, params_, runtime_[idx].rng)) return;

    ++k_dem_[e];
    const ParkOutcome outcome =
        handle_parking_request(t, layouts_[e], occupied_[e], t_now, params_, runtime_[idx].rng);
    if (outcome == ParkOutcome::parked) {
      t.parked_once = true;
      leave_counts(e, t);
      parked_heap_.push({-*t.parked_until_s, idx});
    } else {
      ++expired_[e];
    }
  }

  bool try_reroute(ActiveTrip& t, std::size_t current_edge) {
    const std::size_t dest = *net_.edge_index(t.request.dest_edge);
    const auto key = std::make_pair(current_edge, dest);
    auto it = reroute_cache_.find(key);
    if (it == reroute_cache_.end()) {
      try {
        auto fresh = net::shortest_route_indexes(net_, current_edge, dest,
                                                 net::TravelMode::vehicle, &closed_);
        it = reroute_cache_.emplace(key, std::move(fresh)).first;
      } catch (const net::RouteError&) {
        it = reroute_cache_.emplace(key, std::vector<std::size_t>{}).first;
      }
    }
    const auto& alt = it->second;
    if (alt.size() < 2) return false;  // no open continuation exists
    std::vector<std::string> route(t.route.begin(), t.route.begin() + t.route_index + 1);
    for (std::size_t i = 1; i < alt.size(); ++i) route.push_back(net_.edge(alt[i]).id);
    t.route = std::move(route);
    return true;
  }

  void observe_trip(std::size_t idx) {
    const ActiveTrip& t = trips_[idx];
    const std::size_t e = edge_of(t);
    const auto& edge = net_.edge(e);
    if (t.request.mode == TripMode::vehicle) {
      rel_sum_veh_[e] += t.speed_mps / edge.v_max_veh;
      ++rel_cnt_veh_[e];
    } else {
      rel_sum_ped_[e] += t.speed_mps / edge.v_max_ped;
      ++rel_cnt_ped_[e];
    }
    auto& seen = runtime_[idx].observed_edges;
    const auto e32 = static_cast<std::uint32_t>(e);
    if (std::find(seen.begin(), seen.end(), e32) == seen.end()) {
      seen.push_back(e32);
      if (t.request.mode == TripMode::vehicle)
        ++nv_distinct_[e];
      else
        ++np_distinct_[e];
    }
  }

  void sample_snapshot() {
    for (std::size_t a = 0; a < active_.size(); ++a) observe_trip(active_[a]);
    // Queued-at-closure vehicles are still traffic on their edge.
    for (std::size_t idx : blocked_) observe_trip(idx);
    for (std::size_t e = 0; e < net_.edge_count(); ++e) occupied_sum_[e] += occupied_[e];
  }

  std::vector<SlotObservation> finalize_observations(int snapshots) {
    std::vector<SlotObservation> obs(net_.edge_count());
    for (std::size_t e = 0; e < net_.edge_count(); ++e) {
      SlotObservation& o = obs[e];
      o.np = np_distinct_.count(e) ? np_distinct_[e] : 0;
      o.nv = nv_distinct_.count(e) ? nv_distinct_[e] : 0;
      o.mean_rel_ped_speed = rel_cnt_ped_[e] > 0 ? rel_sum_ped_[e] / rel_cnt_ped_[e] : 0.0;
      o.mean_rel_veh_speed = rel_cnt_veh_[e] > 0 ? rel_sum_veh_[e] / rel_cnt_veh_[e] : 0.0;
      o.k_dem = k_dem_[e];
      o.k_park = layouts_[e].parking_capacity;
      o.k_occupied_mean = snapshots > 0 ? occupied_sum_[e] / snapshots : 0.0;
      o.expired_requests = expired_[e];
    }
    return obs;
  }

  TripBuffer make_buffer(std::int64_t cumulative_restorations) {
    TripBuffer out;
    out.restoration_count = cumulative_restorations;
    for (const auto& t : trips_) {
      if (t.state != TripState::done) out.carried.push_back(t);
    }
    return out;
  }

 public:
  std::int64_t injected_ = 0;
  std::int64_t completed_count_ = 0;

 private:
  const net::StreetNetwork& net_;
  const std::vector<net::DiscreteLayout>& layouts_;
  const SimParams& params_;
  int slot_index_;
  RngKey slot_key_;
  double slot_start_s_ = 0.0;

  std::vector<ActiveTrip> trips_;
  std::vector<TripRuntime> runtime_;
  std::vector<std::size_t> active_;  // indexes of moving trips
  std::priority_queue<std::pair<double, std::size_t>> parked_heap_;  // (-until, idx)

  std::vector<int> moving_veh_, peds_, occupied_;
  std::vector<char> closed_;
  std::vector<double> veh_speed_, ped_speed_;
  std::vector<double> rel_sum_veh_, rel_sum_ped_;
  std::vector<std::int64_t> rel_cnt_veh_, rel_cnt_ped_;
  std::vector<double> occupied_sum_;
  std::vector<std::int64_t> k_dem_, expired_;
  std::map<std::size_t, std::int64_t> np_distinct_, nv_distinct_;
  std::map<std::size_t, std::vector<std::size_t>> parked_on_edge_;
  std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> reroute_cache_;
  std::vector<std::string> completed_;
};

}  // namespace detail

// Advances the world by one slot. Identical inputs and seed give
// bit-identical outputs. `slot_index` fixes the absolute time window
// [slot_index * slot_length, +slot_length).
inline SlotOutput run_slot(const net::StreetNetwork& net,
                           const std::vector<net::DiscreteLayout>& layouts,
                           std::vector<TripRequest> due, const TripBuffer& buffer_in,
                           const SimParams& params, std::uint64_t seed, int slot_index) {
  detail::SlotSim sim(net, layouts, params, seed, slot_index);
  return sim.run(std::move(due), buffer_in);
}

// Buffer round-trip helpers. run_slot already buffers internally; these
// exist for snapshot/restore at a higher level (checkpointing, tests).
inline TripBuffer buffer_unfinished(const SlotOutput& slot_end) { return slot_end.buffer_out; }

// Day-level orchestration: feeds each slot's layouts and due trips, carries
// the buffer across boundaries, and tracks the conservation identity
//   injected == completed + buffered
// which must hold exactly at every slot boundary.
class DayRunner {
 public:
  DayRunner(const net::StreetNetwork& net, const SimParams& params, std::uint64_t seed)
      : net_(net), params_(params), seed_(seed) {}

  SlotOutput step(int slot_index, const std::vector<net::DiscreteLayout>& layouts,
                  std::vector<TripRequest> due) {
    injected_ += static_cast<std::int64_t>(due.size());
    detail::SlotSim sim(net_, layouts, params_, seed_, slot_index);
    SlotOutput out = sim.run(std::move(due), buffer_);
    completed_ += static_cast<std::int64_t>(out.completed.size());
    buffer_ = out.buffer_out;
    restorations_ = buffer_.restoration_count;
    return out;
  }

  bool conservation_holds() const {
    return injected_ == completed_ + static_cast<std::int64_t>(buffer_.size());
  }

  std::int64_t injected() const { return injected_; }
  std::int64_t completed() const { return completed_; }
  std::int64_t restorations() const { return restorations_; }
  const TripBuffer& buffer() const { return buffer_; }

 private:
  const net::StreetNetwork& net_;
  SimParams params_;
  std::uint64_t seed_;
  TripBuffer buffer_;
  std::int64_t injected_ = 0;
  std::int64_t completed_ = 0;
  std::int64_t restorations_ = 0;
};

}  // namespace rowbench::sim
