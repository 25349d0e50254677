#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "json.hpp"
#include "vertisim/messages/display_time.hpp"
#include "vertisim/messages/envelope.hpp"
#include "vertisim/messages/event_sink.hpp"
#include "vertisim/messages/outgoing.hpp"
#include "vertisim/uspace/adherence.hpp"
#include "vertisim/vertidrome/local_adherence.hpp"
#include "vertisim/vertidrome/pad.hpp"
#include "vertisim/vertidrome/schedule.hpp"
#include "vertisim/vertidrome/scheduling.hpp"
#include "vertisim/vertidrome/sector.hpp"
#include "vertisim/vertidrome/vso_command.hpp"
#include "vertisim/vertidrome/weather.hpp"

namespace vertisim::vertidrome {

struct VertidromeConfig {
    std::string id;
    std::string name;
    std::vector<Pad> pads;
    SectorGeometry sector;
    WeatherLimits weather;
    uspace::AdherenceCriteria adherence;
    bool auto_ack = true;  // false: person-in-loop, decisions wait for ApproveFlight
    double wind_alert_mps = 8.0;
    double deviation_alert_m = 0.0;  // spatial deviations below this are not shown to the VSO
    double landed_radius_m = 1.0;
    DisplayClock display;
};

struct Popup {
    std::int64_t id = 0;
    std::string kind;  // "FlightRequest"
    std::int64_t request_id = 0;
    std::string callsign;
    MessageType message_type = MessageType::LandRequest;
    std::string requested_pad;
    SimTime slot_start = 0, slot_end = 0;
    SimTime received = 0;
};

struct Alert {
    std::int64_t id = 0;
    SimTime time = 0;
    std::string kind;
    std::string text;
};

struct HazardPrompt {
    std::int64_t id = 0;
    EmergencyReport report;
    SimTime time = 0;
};

/// The VATMS for one vertidrome: weather processing, local adherence,
/// risk management and pad scheduling on one logical event loop.
class VertidromeManager {
public:
    explicit VertidromeManager(VertidromeConfig config, EventSink& events = null_sink());

    /// Publishes the initial pad status.
    void start(SimTime now);
    void handle(const Envelope& env, SimTime now);
    /// Clock-driven work: close orders starting or ending, pending mode changes, forecast roll-over.
    void tick(SimTime now);
    CommandResult command(const VsoCommand& cmd, SimTime now);

    Outbox take_outbox();

    const VertidromeConfig& config() const { return config_; }
    const std::string& id() const { return config_.id; }
    const PadSchedule& schedule() const { return schedule_; }
    const std::vector<Pad>& pads() const { return pads_; }
    const Pad* pad(const std::string& id) const;
    OperationalConstraintSet constraints(SimTime now) const;
    const WeatherState& weather() const { return weather_; }
    const std::map<std::string, SectorTrack>& sector_tracks() const { return sector_; }
    const std::vector<Popup>& popups() const { return popups_; }
    /// Person-in-loop decisions waiting for ApproveFlight, by request id.
    const std::map<std::int64_t, SlotDecision>& proposals() const { return proposals_; }
    const std::vector<Alert>& alerts() const { return alerts_; }
    const std::vector<HazardPrompt>& prompts() const { return prompts_; }
    const std::vector<AvoidArea>& avoid_areas() const { return avoid_areas_; }
    const std::optional<std::string>& gfmu_preference() const { return gfmu_; }
    bool airborne(const std::string& callsign) const { return airborne_.contains(callsign); }

    /// Full VSO interface state (see docs/gateway.md).
    nlohmann::json ui_state(SimTime now) const;

private:
    void on_request(const Envelope& env, SimTime now);
    void on_position(const PositionReport& report, SimTime now);
    void on_emergency(const EmergencyReport& report, SimTime now);
    void on_weather(const WeatherReport& report, SimTime now);
    void on_ems(const EmsDemand& demand, SimTime now);
    void on_slot_cancel(const SlotCancel& cancel, SimTime now);
    void publish_decision(const SlotDecision& d, const FlightPlan& plan, SimTime now);
    void refresh_pads(SimTime now);
    void displaced(const std::vector<Slot>& slots, const std::string& reason, SimTime now);
    void alert(SimTime now, std::string kind, std::string text);
    void finish(SimTime now);
    Pad* mutable_pad(const std::string& id);
    std::optional<std::string> apply_object_report(const std::string& pad, const EmergencyReport& r, SimTime now);

    VertidromeConfig config_;
    EventSink& events_;
    std::vector<Pad> pads_;  // sorted by id
    PadSchedule schedule_;
    WeatherState weather_;
    std::set<std::string> hazards_;
    std::optional<std::string> gfmu_;
    std::map<std::int64_t, FlightPlan> plans_;  // request_id -> plan as received
    std::map<std::string, std::pair<PadStatus, PadMode>> published_status_;
    std::map<std::string, SectorTrack> sector_;  // callsign -> track
    std::set<std::string> tracked_;              // callsigns seen with a slot here
    std::set<std::string> airborne_;
    DeviationLatch latch_;
    std::vector<AvoidArea> avoid_areas_;
    std::vector<Popup> popups_;
    std::map<std::int64_t, SlotDecision> proposals_;
    std::vector<Alert> alerts_;
    std::vector<HazardPrompt> prompts_;
    std::string weather_band_ = "normal";
    std::int64_t next_id_ = 1;
    bool forecast_dirty_ = true;
    SimTime forecast_minute_ = -1;
    Outbox outbox_;
};

}  // namespace vertisim::vertidrome
