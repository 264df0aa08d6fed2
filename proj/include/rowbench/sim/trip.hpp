#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

namespace rowbench::sim {

enum class TripMode { vehicle, pedestrian };

inline const char* to_string(TripMode m) { return m == TripMode::vehicle ? "vehicle" : "pedestrian"; }
inline TripMode trip_mode_from_string(const std::string& s) {
  if (s == "vehicle") return TripMode::vehicle;
  if (s == "pedestrian") return TripMode::pedestrian;
  throw std::invalid_argument("unknown trip mode: " + s);
}

struct TripRequest {
  std::string id;
  TripMode mode = TripMode::vehicle;
  std::string origin_edge;
  std::string dest_edge;
  double depart_s = 0.0;  // absolute seconds within the day
  std::vector<std::string> route;
  bool wants_parking = false;  // vehicles only
};

enum class TripState { driving, walking, seeking_parking, parked, done };

inline const char* to_string(TripState s) {
  switch (s) {
    case TripState::driving: return "driving";
    case TripState::walking: return "walking";
    case TripState::seeking_parking: return "seeking_parking";
    case TripState::parked: return "parked";
    case TripState::done: return "done";
  }
  return "?";
}

// Runtime state of a journey. `route` here is the effective route (it may
// have been recomputed around closed edges at injection).
struct ActiveTrip {
  TripRequest request;
  std::vector<std::string> route;
  std::size_t route_index = 0;
  double position_m = 0.0;
  double speed_mps = 0.0;
  TripState state = TripState::driving;
  std::optional<double> parked_until_s;
  double speed_factor = 1.0;   // per-vehicle max-speed multiplier
  bool parked_once = false;    // a trip parks at most once per journey

  const std::string& current_edge_id() const { return route.at(route_index); }
};

// Carries unfinished journeys across slot boundaries. `restoration_count`
// accumulates over a day: every trip put back into the world increments it.
struct TripBuffer {
  std::vector<ActiveTrip> carried;
  std::int64_t restoration_count = 0;

  bool empty() const { return carried.empty(); }
  std::size_t size() const { return carried.size(); }
};

// --- serialization (demand files, buffer snapshots) ---

inline nlohmann::json to_json(const TripRequest& t) {
  nlohmann::json j{{"id", t.id},
                   {"mode", to_string(t.mode)},
                   {"origin", t.origin_edge},
                   {"dest", t.dest_edge},
                   {"depart_s", t.depart_s},
                   {"route", t.route}};
  if (t.mode == TripMode::vehicle) j["wants_parking"] = t.wants_parking;
  return j;
}

inline TripRequest trip_request_from_json(const nlohmann::json& j) {
  TripRequest t;
  t.id = j.at("id").get<std::string>();
  t.mode = trip_mode_from_string(j.at("mode").get<std::string>());
  t.origin_edge = j.at("origin").get<std::string>();
  t.dest_edge = j.at("dest").get<std::string>();
  t.depart_s = j.at("depart_s").get<double>();
  t.route = j.value("route", std::vector<std::string>{});
  t.wants_parking = j.value("wants_parking", false);
  return t;
}

inline nlohmann::json to_json(const ActiveTrip& t) {
  return nlohmann::json{{"request", to_json(t.request)},
                        {"route", t.route},
                        {"route_index", t.route_index},
                        {"position_m", t.position_m},
                        {"speed_mps", t.speed_mps},
                        {"state", to_string(t.state)},
                        {"parked_until_s", t.parked_until_s ? nlohmann::json(*t.parked_until_s)
                                                            : nlohmann::json(nullptr)},
                        {"speed_factor", t.speed_factor},
                        {"parked_once", t.parked_once}};
}

inline ActiveTrip active_trip_from_json(const nlohmann::json& j) {
  ActiveTrip t;
  t.request = trip_request_from_json(j.at("request"));
  t.route = j.at("route").get<std::vector<std::string>>();
  t.route_index = j.at("route_index").get<std::size_t>();
  t.position_m = j.at("position_m").get<double>();
  t.speed_mps = j.at("speed_mps").get<double>();
  const std::string s = j.at("state").get<std::string>();
  if (s == "driving") t.state = TripState::driving;
  else if (s == "walking") t.state = TripState::walking;
  else if (s == "seeking_parking") t.state = TripState::seeking_parking;
  else if (s == "parked") t.state = TripState::parked;
  else if (s == "done") t.state = TripState::done;
  else throw std::invalid_argument("unknown trip state: " + s);
  if (!j.at("parked_until_s").is_null()) t.parked_until_s = j.at("parked_until_s").get<double>();
  t.speed_factor = j.value("speed_factor", 1.0);
  t.parked_once = j.value("parked_once", false);
  return t;
}

inline nlohmann::json to_json(const TripBuffer& b) {
  nlohmann::json carried = nlohmann::json::array();
  for (const auto& t : b.carried) carried.push_back(to_json(t));
  return nlohmann::json{{"carried", std::move(carried)},
                        {"restoration_count", b.restoration_count}};
}

inline TripBuffer trip_buffer_from_json(const nlohmann::json& j) {
  TripBuffer b;
  for (const auto& t : j.at("carried")) b.carried.push_back(active_trip_from_json(t));
  b.restoration_count = j.at("restoration_count").get<std::int64_t>();
  return b;
}

}  // namespace rowbench::sim
