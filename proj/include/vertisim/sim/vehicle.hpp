#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vertisim/messages/envelope.hpp"
#include "vertisim/messages/event_sink.hpp"
#include "vertisim/messages/outgoing.hpp"
#include "vertisim/sim/profile.hpp"

namespace vertisim::sim {

enum class VehicleMode { Parked, TakingOff, Enroute, Approach, Landing, Landed, Holding };
std::string_view to_string(VehicleMode m);

/// A pad the vehicle can divert to on an endurance emergency.
struct KnownPad {
    std::string vertidrome;
    std::string pad;
    Vec3 center;
};

struct VehicleSetup {
    std::string callsign;
    VehicleProfile profile;
    Vec3 start;
    std::vector<KnownPad> pads;
    double approach_radius_m = 20.0;
    double capture_radius_m = 1.0;
};

/// Kinematic multicopter: tracks its uploaded 4D route without ever getting
/// ahead of a waypoint ETA, speed-limited by the profile.
class Vehicle {
public:
    explicit Vehicle(VehicleSetup setup, EventSink& events = null_sink());

    /// Wind at the vehicle, used by the take-off gate only.
    void set_wind(double speed_mps) { wind_mps_ = speed_mps; }

    /// Returns false (and logs command-rejected / takeoff-refused) when illegal in the current mode.
    bool handle_command(const FleetCommand& cmd, SimTime now);

    /// Advances the clock to `now`, emitting position reports on the report grid.
    void advance(SimTime now);

    Outbox take_outbox();

    const std::string& callsign() const { return setup_.callsign; }
    const VehicleProfile& profile() const { return setup_.profile; }
    VehicleMode mode() const { return mode_; }
    const Vec3& position() const { return position_; }
    double ground_speed() const { return ground_speed_; }
    const std::vector<Waypoint>& route() const { return route_; }
    SimTime flight_time_ms() const { return flight_ms_; }
    int leg() const { return leg_; }
    std::string leg_label() const;
    bool airborne() const { return mode_ != VehicleMode::Parked && mode_ != VehicleMode::Landed; }
    SimTime now() const { return now_; }

private:
    void move(SimTime t0, SimTime t1);
    void update_mode(SimTime t);
    void report(SimTime t);
    void reject(const FleetCommand& cmd, const std::string& reason, SimTime now);
    void land_at(const Vec3& pad, SimTime now);

    VehicleSetup setup_;
    EventSink& events_;
    VehicleMode mode_ = VehicleMode::Parked;
    Vec3 position_;
    double ground_speed_ = 0.0;
    std::vector<Waypoint> route_;
    bool flown_ = false;  // a route has been flown since take-off
    int leg_ = 0;
    SimTime now_ = 0;
    SimTime flight_ms_ = 0;
    SimTime last_report_ = -1;
    double wind_mps_ = 0.0;
    bool endurance_declared_ = false;
    Outbox outbox_;
};

struct Detection {
    SimTime at = 0;
    std::string reporter;
    EmergencyKind kind = EmergencyKind::PersonOnPad;
    std::string vertidrome;
    std::optional<std::string> pad;
    std::string detail;
};

/// The scripted sensor sighting as an emergency report; logs person-detected / object-detected.
EmergencyReport scripted_detection(const Detection& d, EventSink& events);

}  // namespace vertisim::sim
