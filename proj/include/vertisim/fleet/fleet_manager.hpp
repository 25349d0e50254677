#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "vertisim/fleet/route_planner.hpp"
#include "vertisim/fleet/world.hpp"
#include "vertisim/messages/envelope.hpp"
#include "vertisim/messages/event_sink.hpp"
#include "vertisim/messages/outgoing.hpp"
#include "vertisim/uspace/conflict.hpp"

namespace vertisim::fleet {

enum class FlightState { Planned, Filed, Approved, Active, Rerouting, Landed, Cancelled };
std::string_view to_string(FlightState s);

struct FlightSpec {
    std::string callsign;
    std::string serial;
    std::string aircraft_type = "MOTT";
    int priority = 1;
    std::string origin_id = "EDEC";
    Vec3 start;
    PadRef destination;
    std::vector<PadRef> alternates;
    SimTime file_at = 0;
};

struct FleetConfig {
    std::string operator_id = "OP1";
    std::string source = "fleet";  // event log source
    PlannerParams planner;
    uspace::SeparationMinima minima;
    SimTime departure_lead_ms = 5000;
    SimTime takeoff_timeout_ms = 5000;
    SimTime slot_lead_ms = 15000;  // slot opens this long before the landing ETA
    SimTime slot_duration_ms = 60000;
    double landed_radius_m = 1.0;
    std::int64_t request_id_base = 0;
};

struct FleetFlight {
    FlightSpec spec;
    FlightState state = FlightState::Planned;
    bool registered = false;
    std::optional<FlightPlan> plan;  // the plan currently filed or flown
    std::optional<FlightAuthorisation> authorisation;
    std::vector<FlightPlan> history;
    std::string reason;
    PadRef target;
    int leg = 0;  // 0 = primary, n = n-th alternate
    std::optional<std::int64_t> release;  // approved request to cancel once the replacement is approved
    std::set<PadRef> tried;
    std::optional<Vec3> last_position;
    SimTime takeoff_sent = -1;
    bool tracking = false;
    bool distress = false;
};

/// Operator-side flight management: route planning, filing, activation,
/// landing detection and the pad-closure reroute.
class FleetManager {
public:
    FleetManager(FleetConfig config, WorldMap world, std::vector<FlightSpec> flights,
                 EventSink& events = null_sink());

    /// Registers every vehicle.
    void start(SimTime now);
    void handle(const Envelope& env, SimTime now);
    /// Files due flights, commands take-offs, enforces the take-off timeout.
    void tick(SimTime now);

    Outbox take_outbox();

    const FleetFlight* flight(const std::string& callsign) const;
    const std::vector<FleetFlight>& flights() const { return flights_; }
    const WorldMap& world() const { return world_; }
    bool all_terminal() const;
    std::optional<PadStatus> known_status(const PadRef& ref) const;

    /// Turns a route into a plan for this operator (fresh request id, slot around the landing ETA).
    FlightPlan make_plan(const FleetFlight& f, const PadRef& pad, std::vector<Waypoint> route);

private:
    FleetFlight* find(const std::string& callsign);
    void on_authorisation(FleetFlight& f, const FlightAuthorisation& auth, SimTime now);
    void on_position(FleetFlight& f, const PositionReport& report, SimTime now);
    void on_closure(const PadRef& ref, SimTime now);
    void on_displaced(FleetFlight& f, const SlotDisplaced& d, SimTime now);
    void reroute(FleetFlight& f, std::vector<PadRef> candidates, SimTime now);
    void file(FleetFlight& f, FlightPlan plan, SimTime now, const char* event);
    void cancel(FleetFlight& f, const std::string& reason, SimTime now);
    void command(const FleetFlight& f, CommandKind kind, std::vector<Waypoint> route = {});
    Vec3 current_position(const FleetFlight& f) const;
    SimTime departure_after(SimTime now) const;

    FleetConfig config_;
    WorldMap world_;
    std::vector<FleetFlight> flights_;
    EventSink& events_;
    std::map<PadRef, PadStatus> pad_status_;
    std::int64_t next_request_ = 1;
    Outbox outbox_;
};

}  // namespace vertisim::fleet
