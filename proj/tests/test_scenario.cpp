#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <string>
#include <vector>

#include "rowbench/net/io.hpp"
#include "rowbench/scenario.hpp"

using namespace rowbench;

namespace {

net::StreetNetwork kensington12() {
  return net::load_network(std::string(ROWBENCH_DATA_DIR) + "/kensington12.json");
}

}  // namespace

TEST_CASE("build_scenario pins the scaled peak targets") {
  const auto netw = kensington12();
  const double scale = 12.0 / 58.0;

  const auto s1 = scenario::build_scenario(1, netw);
  CHECK(s1.veh_peak_target == Catch::Approx(63.0 * scale));
  CHECK(s1.ped_peak_target == Catch::Approx(53.0 * scale));

  const auto s2 = scenario::build_scenario(2, netw);
  CHECK(s2.veh_peak_target == Catch::Approx(118.0 * scale));
  CHECK(s2.ped_peak_target == Catch::Approx(102.0 * scale));

  const auto s3 = scenario::build_scenario(3, netw);
  CHECK(s3.veh_peak_target == Catch::Approx(121.0 * scale));
  CHECK(s3.ped_peak_target == Catch::Approx(169.0 * scale));
  CHECK(s3.ped_boost_min == 1.5);
  CHECK(s3.ped_boost_max == 2.5);

  CHECK_THROWS_AS(scenario::build_scenario(0, netw), std::invalid_argument);
  CHECK_THROWS_AS(scenario::build_scenario(4, netw), std::invalid_argument);
}

TEST_CASE("scenario 3 requires exhibition-tagged edges") {
  net::DirectedEdge a;
  a.id = "e1_2";
  a.from_node = "n1";
  a.to_node = "n2";
  a.length_m = 100;
  a.width_m = 12;
  net::DirectedEdge b = a;
  b.id = "e2_1";
  b.from_node = "n2";
  b.to_node = "n1";
  net::StreetNetwork bare("bare", {{"n1", 0, 0}, {"n2", 0, 0}}, {a, b});
  CHECK_THROWS_AS(scenario::build_scenario(3, bare), std::invalid_argument);
  CHECK_NOTHROW(scenario::build_scenario(1, bare));
}

TEST_CASE("diurnal shape peaks at one inside the 18:00 window") {
  const auto s = scenario::build_scenario(1, kensington12());
  REQUIRE(s.diurnal_shape.size() == 48);
  double max_w = 0.0;
  for (double w : s.diurnal_shape) {
    CHECK(w >= 0.0);
    CHECK(w <= 1.0);
    max_w = std::max(max_w, w);
  }
  CHECK(max_w == 1.0);
  CHECK(s.diurnal_shape[36] == 1.0);  // 18:00
  CHECK(s.diurnal_shape[37] == 1.0);  // 18:30
  CHECK(s.diurnal_shape[0] < 0.3);    // night
}

TEST_CASE("identical (spec, slot, seed) give identical request lists") {
  const auto netw = kensington12();
  const auto spec = scenario::build_scenario(3, netw);
  const auto a = scenario::sample_slot_demand(spec, 36, netw, 12345);
  const auto b = scenario::sample_slot_demand(spec, 36, netw, 12345);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].id == b[i].id);
    CHECK(a[i].depart_s == b[i].depart_s);
    CHECK(a[i].origin_edge == b[i].origin_edge);
    CHECK(a[i].dest_edge == b[i].dest_edge);
    CHECK(a[i].wants_parking == b[i].wants_parking);
  }
}

TEST_CASE("zero diurnal weight yields an empty slot") {
  const auto netw = kensington12();
  auto spec = scenario::build_scenario(1, netw);
  spec.diurnal_shape[5] = 0.0;
  CHECK(scenario::sample_slot_demand(spec, 5, netw, 1).empty());
}

TEST_CASE("every depart time lies inside its slot window; lists are sorted") {
  const auto netw = kensington12();
  const auto spec = scenario::build_scenario(2, netw);
  for (int slot : {0, 17, 36, 47}) {
    const auto trips = scenario::sample_slot_demand(spec, slot, netw, 77);
    double prev = slot * 1800.0;
    for (const auto& t : trips) {
      CHECK(t.depart_s >= slot * 1800.0);
      CHECK(t.depart_s < (slot + 1) * 1800.0);
      CHECK(t.depart_s >= prev);
      prev = t.depart_s;
      REQUIRE(!t.route.empty());
      CHECK(t.route.front() == t.origin_edge);
      CHECK(t.route.back() == t.dest_edge);
    }
  }
}

TEST_CASE("peak-slot sample mean matches the calibrated injection rate") {
  const auto netw = kensington12();
  const auto spec = scenario::build_scenario(1, netw);
  const double expected = spec.veh_peak_rate_per_s * 1800.0;  // shape = 1 at slot 36
  double total = 0.0;
  const int draws = 1000;
  for (int k = 0; k < draws; ++k) {
    const auto trips = scenario::sample_slot_demand(spec, 36, netw, 9000 + k);
    for (const auto& t : trips) total += t.mode == sim::TripMode::vehicle ? 1.0 : 0.0;
  }
  const double mean = total / draws;
  const double se = std::sqrt(expected / draws);  // Poisson variance = mean
  CHECK(std::abs(mean - expected) <= 3.0 * se);
}

TEST_CASE("scenarios 2 and 3 share the vehicle process under paired seeds") {
  const auto netw = kensington12();
  const auto s2 = scenario::build_scenario(2, netw);
  const auto s3 = scenario::build_scenario(3, netw);
  for (int slot : {10, 36, 45}) {
    const auto a = scenario::sample_slot_demand(s2, slot, netw, 321);
    const auto b = scenario::sample_slot_demand(s3, slot, netw, 321);
    std::vector<std::string> veh_a, veh_b;
    for (const auto& t : a)
      if (t.mode == sim::TripMode::vehicle)
        veh_a.push_back(t.id + "|" + t.origin_edge + ">" + t.dest_edge + "@" +
                        std::to_string(t.depart_s) + (t.wants_parking ? "P" : ""));
    for (const auto& t : b)
      if (t.mode == sim::TripMode::vehicle)
        veh_b.push_back(t.id + "|" + t.origin_edge + ">" + t.dest_edge + "@" +
                        std::to_string(t.depart_s) + (t.wants_parking ? "P" : ""));
    CHECK(veh_a == veh_b);
  }
}

TEST_CASE("non-exhibition pedestrian arrivals are identical between scenarios 2 and 3") {
  const auto netw = kensington12();
  const auto s2 = scenario::build_scenario(2, netw);
  const auto s3 = scenario::build_scenario(3, netw);
  for (int slot : {12, 36}) {
    std::map<std::string, int> arrivals2, arrivals3;
    for (int k = 0; k < 40; ++k) {
      for (const auto& t : scenario::sample_slot_demand(s2, slot, netw, 5000 + k))
        if (t.mode == sim::TripMode::pedestrian) ++arrivals2[t.dest_edge];
      for (const auto& t : scenario::sample_slot_demand(s3, slot, netw, 5000 + k))
        if (t.mode == sim::TripMode::pedestrian) ++arrivals3[t.dest_edge];
    }
    for (const auto& e : netw.edges()) {
      if (e.has_tag("exhibition")) continue;
      CHECK(arrivals2[e.id] == arrivals3[e.id]);
    }
  }
}

TEST_CASE("exhibition-edge pedestrian arrival mean sits inside the boost band") {
  const auto netw = kensington12();
  const auto s2 = scenario::build_scenario(2, netw);
  const auto s3 = scenario::build_scenario(3, netw);
  double ex2 = 0.0, ex3 = 0.0;
  const int draws = 400;
  for (int k = 0; k < draws; ++k) {
    for (const auto& t : scenario::sample_slot_demand(s2, 36, netw, 40000 + k))
      if (t.mode == sim::TripMode::pedestrian && netw.edge_by_id(t.dest_edge).has_tag("exhibition"))
        ex2 += 1.0;
    for (const auto& t : scenario::sample_slot_demand(s3, 36, netw, 40000 + k))
      if (t.mode == sim::TripMode::pedestrian && netw.edge_by_id(t.dest_edge).has_tag("exhibition"))
        ex3 += 1.0;
  }
  ex2 /= draws;
  ex3 /= draws;
  REQUIRE(ex2 > 0.0);
  const double ratio = ex3 / ex2;
  // Mean multiplier is E[U(1.5, 2.5)] = 2; sampling noise keeps the estimate
  // inside the band.
  CHECK(ratio >= 1.5);
  CHECK(ratio <= 2.5);
}

TEST_CASE("scenario spec round-trips through json") {
  const auto spec = scenario::build_scenario(3, kensington12());
  const auto j = scenario::to_json(spec);
  const auto back = scenario::scenario_from_json(j);
  CHECK(back.id == spec.id);
  CHECK(back.veh_peak_rate_per_s == spec.veh_peak_rate_per_s);
  CHECK(back.ped_peak_rate_per_s == spec.ped_peak_rate_per_s);
  CHECK(back.diurnal_shape == spec.diurnal_shape);
  CHECK(back.exhibition_edges == spec.exhibition_edges);
  CHECK(back.parking_propensity == spec.parking_propensity);
}
