#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "vertisim/messages/envelope.hpp"
#include "vertisim/messages/event_sink.hpp"
#include "vertisim/messages/outgoing.hpp"
#include "vertisim/uspace/adherence.hpp"
#include "vertisim/uspace/authorisation.hpp"
#include "vertisim/uspace/emergency.hpp"
#include "vertisim/uspace/registry.hpp"
#include "vertisim/uspace/surveillance.hpp"

namespace vertisim::uspace {

inline const std::string kUspaceId = "uspace";

struct UspaceConfig {
    SeparationMinima minima;
    AdherenceCriteria adherence;
    std::set<std::string> vertidromes;
    SimTime ems_lead_ms = 30000;      // distress demand window starts this far ahead
    SimTime ems_duration_ms = 60000;
};

/// The U-space service suite behind one broker client: registry, flight
/// authorisation, surveillance relay, adherence monitor and EMS.
class UspaceServices {
public:
    explicit UspaceServices(UspaceConfig config, EventSink& events = null_sink());

    void handle(const Envelope& env, SimTime now);

    /// Scripted EMS demand. Throws UnknownVertidrome.
    void place_ems_demand(const std::string& vertidrome, const std::string& pad, const std::string& callsign,
                          SimTime slot_start, SimTime slot_end, SimTime now);

    Outbox take_outbox();

    const Registry& registry() const { return registry_; }
    const ActivePlanSet& plans() const { return plans_; }
    const SurveillanceRelay& relay() const { return relay_; }
    const EmergencyService& ems() const { return ems_; }
    std::size_t pending_count() const { return pending_.size(); }

private:
    void on_registration(const RegistrationRequest& req, SimTime now);
    void on_plan(const FlightPlan& plan, SimTime now);
    void on_slot_decision(const SlotDecision& decision, SimTime now);
    void on_status(const FlightStatus& status, SimTime now);
    void on_position(const PositionReport& report, SimTime now);
    void on_emergency(const EmergencyReport& report, SimTime now);
    void deny(const FlightPlan& plan, const std::string& reason, SimTime now);

    UspaceConfig config_;
    EventSink& events_;
    Registry registry_;
    ActivePlanSet plans_;
    SurveillanceRelay relay_;
    EmergencyService ems_;
    std::map<std::int64_t, FlightPlan> pending_;  // request_id -> plan awaiting the vertidrome
    std::map<std::string, std::set<DeviationKind>> deviating_;
    Outbox outbox_;
};

}  // namespace vertisim::uspace
