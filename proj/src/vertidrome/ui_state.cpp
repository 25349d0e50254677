#include "vertisim/vertidrome/ui_state.hpp"

#include "vertisim/vertidrome/forecast.hpp"
#include "vertisim/vertidrome/manager.hpp"

namespace vertisim::vertidrome {

using nlohmann::json;

const std::vector<std::string>& ui_panels() {
    static const std::vector<std::string> panels{"clock",   "sector",       "pads",            "weather",
                                                 "popups",  "approvals",    "close_orders",    "foreign_objects",
                                                 "prompts", "alerts",       "avoid_areas",     "forecast",
                                                 "settings"};
    return panels;
}

std::vector<std::string> changed_panels(const json& before, const json& after) {
    std::vector<std::string> out;
    for (const auto& p : ui_panels()) {
        if (!after.contains(p)) continue;
        if (!before.contains(p) || before.at(p) != after.at(p)) out.push_back(p);
    }
    return out;
}

json VertidromeManager::ui_state(SimTime now) const {
    const auto& clock = config_.display;
    const auto label = [&](const std::string& pad_id) {
        const Pad* p = pad(pad_id);
        return p ? p->label : pad_id;
    };
    json s;
    s["vertidrome"] = config_.id;
    s["name"] = config_.name;
    s["clock"] = {{"sim_time_ms", now}, {"time", clock.clock(now)}, {"date_time", clock.date_time(now)}};

    json sector = json::array();
    for (const auto& [cs, t] : sector_) {
        const auto row = display_row(t);
        sector.push_back({{"pad", label(t.pad)},
                          {"pad_id", t.pad},
                          {"callsign", cs},
                          {"azimuth", row.azimuth},
                          {"distance", row.distance},
                          {"rel_altitude", row.rel_altitude}});
    }
    s["sector"] = sector;

    json pads = json::array();
    json orders = json::array();
    json objects = json::array();
    for (const auto& p : pads_) {
        const auto mode = p.mode(now);
        std::string mode_text{to_string(mode)};
        if (p.pending_mode) mode_text += "+" + std::string(to_string(*p.pending_mode));
        pads.push_back({{"pad", p.label},
                        {"pad_id", p.id},
                        {"status", to_string(p.status(now))},
                        {"mode", to_string(mode)},
                        {"pending_mode", p.pending_mode ? json(to_string(*p.pending_mode)) : json(nullptr)},
                        {"mode_text", mode_text},
                        {"cause", p.closed_at(now) ? json(to_string(p.cause(now))) : json(nullptr)},
                        {"hazard", hazards_.contains(p.id)}});
        for (const auto& o : p.close_orders) {
            orders.push_back({{"order_id", o.id},
                              {"pad", p.label},
                              {"pad_id", p.id},
                              {"start_ms", o.start},
                              {"end_ms", o.end},
                              {"start", clock.clock(o.start)},
                              {"end", clock.clock(o.end)},
                              {"cause", to_string(o.cause)},
                              {"active", o.active_at(now)}});
        }
        for (const auto& o : p.objects) {
            objects.push_back({{"report_id", o.id},
                               {"pad", p.label},
                               {"pad_id", p.id},
                               {"kind", to_string(o.kind)},
                               {"reporter", o.reporter},
                               {"detail", o.detail},
                               {"time", clock.clock(o.time)}});
        }
    }
    s["pads"] = pads;
    s["close_orders"] = orders;
    s["foreign_objects"] = objects;

    s["weather"] = {{"direction_deg", weather_.direction_deg},
                    {"speed_mps", weather_.speed_mps},
                    {"source", to_string(weather_.source)},
                    {"band", weather_band_},
                    {"text", weather_text(weather_)}};

    json popups = json::array();
    for (const auto& p : popups_) {
        popups.push_back({{"popup_id", p.id},
                          {"kind", p.kind},
                          {"request_id", p.request_id},
                          {"callsign", p.callsign},
                          {"message_type", to_string(p.message_type)},
                          {"requested_pad", p.requested_pad},
                          {"requested_slot", clock.date_time(p.slot_start) + " - " + clock.clock(p.slot_end)},
                          {"slot_start_ms", p.slot_start},
                          {"slot_end_ms", p.slot_end},
                          {"received", clock.clock(p.received)}});
    }
    s["popups"] = popups;

    json approvals = json::array();
    for (const auto& [id, d] : proposals_) {
        approvals.push_back({{"request_id", id},
                             {"callsign", d.callsign},
                             {"verdict", to_string(d.verdict)},
                             {"pad", d.pad.empty() ? "" : label(d.pad)},
                             {"slot_start_ms", d.slot_start},
                             {"slot_end_ms", d.slot_end},
                             {"reason", d.reason}});
    }
    s["approvals"] = approvals;

    json prompts = json::array();
    for (const auto& p : prompts_) {
        prompts.push_back({{"prompt_id", p.id},
                           {"kind", to_string(p.report.kind)},
                           {"pad", p.report.pad.value_or("")},
                           {"reporter", p.report.reporter},
                           {"detail", p.report.detail},
                           {"time", clock.clock(p.time)}});
    }
    s["prompts"] = prompts;

    json alerts = json::array();
    for (const auto& a : alerts_) {
        alerts.push_back({{"alert_id", a.id}, {"time", clock.clock(a.time)}, {"kind", a.kind}, {"text", a.text}});
    }
    s["alerts"] = alerts;

    json areas = json::array();
    for (const auto& a : avoid_areas_) {
        json poly = json::array();
        for (const auto& p : a.polygon) poly.push_back({p.east, p.north});
        areas.push_back({{"id", a.id}, {"polygon", poly}});
    }
    s["avoid_areas"] = areas;

    std::vector<std::string> ids;
    for (const auto& p : pads_) ids.push_back(p.id);
    const auto forecast =
        operational_forecast(config_.id, ids, schedule_, now, [this](const std::string& cs) { return airborne(cs); });
    json rows = json::array();
    for (const auto& r : forecast.rows) {
        json entries = json::array();
        for (const auto& e : r.entries) {
            const bool blank = e.callsign.empty();
            entries.push_back({{"pad", label(e.pad)},
                               {"callsign", e.callsign},
                               {"aircraft_type", e.aircraft_type},
                               {"priority", e.priority},
                               {"operation", blank ? "" : std::string(to_string(e.operation))},
                               {"from_to", e.from_to},
                               {"status", blank ? "" : std::string(to_string(e.status))}});
        }
        rows.push_back({{"minute", clock.clock(r.minute)}, {"minute_ms", r.minute}, {"entries", entries}});
    }
    s["forecast"] = rows;

    s["settings"] = {{"auto_ack", config_.auto_ack},
                     {"adherence", {{"spatial_m", config_.adherence.spatial_m}, {"temporal_s", config_.adherence.temporal_s}}},
                     {"wind_alert_mps", config_.wind_alert_mps},
                     {"deviation_alert_m", config_.deviation_alert_m},
                     {"gfmu_preference", gfmu_ ? json(*gfmu_) : json(nullptr)}};
    return s;
}

}  // namespace vertisim::vertidrome
