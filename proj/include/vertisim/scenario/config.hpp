#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "vertisim/fleet/world.hpp"
#include "vertisim/messages/display_time.hpp"
#include "vertisim/messages/types.hpp"
#include "vertisim/sim/profile.hpp"
#include "vertisim/uspace/adherence.hpp"
#include "vertisim/uspace/conflict.hpp"

namespace vertisim::scenario {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct ArcConfig {
    double from_deg = 0.0;
    double to_deg = 360.0;
    double radius_m = 20.0;
};

struct PadConfig {
    std::string id;
    std::string label;
    double east = 0.0;
    double north = 0.0;
    PadMode mode = PadMode::BOTH;
    std::optional<ArcConfig> approach_arc;
};

struct VertidromeConfig {
    std::string id;
    std::string name;
    double elevation_m = 0.0;
    double sector_radius_m = 150.0;
    double sector_height_m = 120.0;
    double wind_limit_mps = 11.0;
    double caution_mps = 8.0;
    double caution_factor = 1.5;
    std::vector<PadConfig> pads;
};

struct FleetConfig {
    std::string operator_id = "OP1";
    double cruise_speed_mps = 2.0;
    double cruise_altitude_m = 30.0;
    double clearance_m = 2.0;
    double grid_m = 1.0;
    double departure_lead_s = 5.0;
    double takeoff_timeout_s = 5.0;
    double slot_lead_s = 15.0;
    double slot_duration_s = 60.0;
};

struct VehicleConfig {
    std::string callsign;
    std::string serial;
    std::string operator_id;
    sim::VehicleProfile profile;
    Vec3 start;
};

struct FlightConfig {
    std::string callsign;
    std::string aircraft_type = "MOTT";
    int priority = 1;
    std::string origin = "EDEC";
    std::string destination;  // vertidrome id
    std::string pad;
    std::vector<fleet::PadRef> alternates;
    double file_at_s = 0.0;
};

struct WeatherEvent {
    double at_s = 0.0;
    std::optional<std::string> vertidrome;  // none = everywhere, including the vehicles
    double direction_deg = 0.0;
    double speed_mps = 0.0;
};

/// detection | ems_demand | vso | gfmu | infra; the entry keeps its raw fields.
struct ScriptEntry {
    double at_s = 0.0;
    double jitter_s = 0.0;  // uniform extra delay drawn from the seeded generator
    std::string kind;
    nlohmann::json fields;
};

struct LandingExpectation {
    std::string callsign;
    std::string vertidrome;
    std::string pad;
    std::optional<double> after_takeoff_s;
    double tolerance_s = 5.0;
    bool within_slot = false;
};

struct Expectation {
    std::vector<std::string> sequence;
    std::vector<std::string> forbidden;
    std::optional<LandingExpectation> landing;
};

struct ScenarioConfig {
    std::string name;
    std::uint64_t seed = 1;
    SimTime tick_ms = 100;
    double timeout_s = 600.0;
    std::string display_epoch = "2023-06-14T22:53:55";
    bool auto_ack = true;
    uspace::SeparationMinima separation;
    uspace::AdherenceCriteria adherence;
    std::vector<fleet::Geofence> geofences;
    std::vector<VertidromeConfig> vertidromes;
    std::vector<FleetConfig> fleets;
    std::vector<VehicleConfig> vehicles;
    std::vector<FlightConfig> flights;
    std::vector<WeatherEvent> weather;
    std::vector<ScriptEntry> script;
    Expectation expect;

    const VertidromeConfig* vertidrome(const std::string& id) const;
    const PadConfig* pad(const std::string& vertidrome, const std::string& pad) const;
    DisplayClock display() const;
};

/// Parses and validates; every dangling reference is a ConfigError naming the key.
ScenarioConfig parse_scenario(const nlohmann::json& doc);
ScenarioConfig load_scenario(const std::filesystem::path& path);

/// The planning world: geofences plus every pad with its approach arc.
fleet::WorldMap world_map(const ScenarioConfig& config);

}  // namespace vertisim::scenario
