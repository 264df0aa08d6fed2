#pragma once

#include <stdexcept>

namespace rowbench::sim {

// Physical and cadence parameters of the mesoscopic simulator. The movement
// constants are fixed vehicle/pedestrian characteristics; the parking fields
// shape the behavioural model. All strictly positive unless noted.
struct SimParams {
  // Pedestrian movement
  double ped_following_gap_m = 2.50;
  double ped_max_speed_mps = 1.20;
  double ped_body_width_m = 1.00;
  // Pedestrians squeezed off a too-narrow sidewalk keep moving on the
  // carriageway at this fraction of free-flow speed.
  double ped_spill_speed_frac = 0.40;

  // Vehicle operation
  double veh_accel_mps2 = 2.60;
  double veh_decel_mps2 = 4.50;
  double veh_max_speed_mps = 13.00;
  double veh_headway_s = 0.60;
  double veh_imperfection = 0.00;  // may be zero
  double veh_speed_factor = 0.05;  // per-vehicle max-speed spread, +/- fraction
  double veh_length_m = 4.00;
  // Speed used to convert the time headway into a jam spacing.
  double k_jam_nominal_speed_mps = 13.00;

  // Cadence
  double tick_s = 1.0;
  double obs_interval_s = 36.0;
  double slot_length_s = 1800.0;
  int slots_per_day = 48;

  // Parking behaviour: request probability sigma(bias + gain * (1 - occupancy)),
  // stay duration exponential with the given mean.
  double park_sigmoid_bias = -1.0;
  double park_sigmoid_gain = 2.0;
  double park_duration_mean_s = 900.0;

  double day_length_s() const { return slot_length_s * slots_per_day; }
  int ticks_per_slot() const { return static_cast<int>(slot_length_s / tick_s); }

  void validate() const {
    auto positive = [](double v, const char* what) {
      if (!(v > 0.0)) throw std::invalid_argument(std::string("SimParams: ") + what + " must be > 0");
    };
    positive(ped_following_gap_m, "ped_following_gap_m");
    positive(ped_max_speed_mps, "ped_max_speed_mps");
    positive(ped_body_width_m, "ped_body_width_m");
    positive(veh_accel_mps2, "veh_accel_mps2");
    positive(veh_decel_mps2, "veh_decel_mps2");
    positive(veh_max_speed_mps, "veh_max_speed_mps");
    positive(veh_headway_s, "veh_headway_s");
    positive(veh_length_m, "veh_length_m");
    positive(k_jam_nominal_speed_mps, "k_jam_nominal_speed_mps");
    positive(tick_s, "tick_s");
    positive(obs_interval_s, "obs_interval_s");
    positive(slot_length_s, "slot_length_s");
    positive(park_duration_mean_s, "park_duration_mean_s");
    if (slots_per_day <= 0) throw std::invalid_argument("SimParams: slots_per_day must be > 0");
    if (veh_imperfection < 0.0 || veh_speed_factor < 0.0)
      throw std::invalid_argument("SimParams: imperfection and speed factor must be >= 0");
    auto divides = [](double outer, double inner) {
      double q = outer / inner;
      return std::abs(q - static_cast<long long>(q + 0.5)) < 1e-9;
    };
    if (!divides(slot_length_s, obs_interval_s))
      throw std::invalid_argument("SimParams: slot_length_s must be divisible by obs_interval_s");
    if (!divides(obs_interval_s, tick_s))
      throw std::invalid_argument("SimParams: obs_interval_s must be divisible by tick_s");
  }
};

}  // namespace rowbench::sim
