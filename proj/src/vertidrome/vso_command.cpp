#include "vertisim/vertidrome/vso_command.hpp"

#include <array>
#include <cmath>

namespace vertisim::vertidrome {

using nlohmann::json;

namespace {

constexpr std::array<std::pair<VsoCommandKind, std::string_view>, 12> kNames{{
    {VsoCommandKind::AcknowledgeRequest, "AcknowledgeRequest"},
    {VsoCommandKind::ApproveFlight, "ApproveFlight"},
    {VsoCommandKind::CancelFlight, "CancelFlight"},
    {VsoCommandKind::CreateCloseOrder, "CreateCloseOrder"},
    {VsoCommandKind::ClearCloseOrder, "ClearCloseOrder"},
    {VsoCommandKind::ReassignSlot, "ReassignSlot"},
    {VsoCommandKind::SetAdherenceCriteria, "SetAdherenceCriteria"},
    {VsoCommandKind::SetNotificationThresholds, "SetNotificationThresholds"},
    {VsoCommandKind::SetPadMode, "SetPadMode"},
    {VsoCommandKind::AddAvoidArea, "AddAvoidArea"},
    {VsoCommandKind::RemoveAvoidArea, "RemoveAvoidArea"},
    {VsoCommandKind::ClassifyHazard, "ClassifyHazard"},
}};

template <class T>
T field(const json& j, const char* key) {
    if (!j.contains(key)) throw CommandError(std::string("missing field ") + key);
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        throw CommandError(std::string("bad field ") + key);
    }
}

template <class T>
std::optional<T> optional_field(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return field<T>(j, key);
}

template <class E>
E enum_field(const json& j, const char* key) {
    const auto v = enum_from_string<E>(field<std::string>(j, key));
    if (!v) throw CommandError(std::string("bad value for ") + key);
    return *v;
}

SimTime seconds_to_ms(double s) { return static_cast<SimTime>(std::llround(s * 1000.0)); }

}  // namespace

std::string_view to_string(VsoCommandKind k) {
    for (const auto& [v, n] : kNames) {
        if (v == k) return n;
    }
    return "?";
}

VsoCommand parse_vso_command(const json& j) {
    if (!j.is_object()) throw CommandError("command must be an object");
    const auto name = field<std::string>(j, "command");
    VsoCommand c;
    bool known = false;
    for (const auto& [v, n] : kNames) {
        if (n == name) {
            c.kind = v;
            known = true;
        }
    }
    if (!known) throw CommandError("unknown command " + name);

    switch (c.kind) {
        case VsoCommandKind::AcknowledgeRequest:
        case VsoCommandKind::ApproveFlight:
        case VsoCommandKind::CancelFlight: c.request_id = field<std::int64_t>(j, "request_id"); break;
        case VsoCommandKind::CreateCloseOrder:
            c.pad = field<std::string>(j, "pad");
            c.start = optional_field<SimTime>(j, "start_ms");
            c.duration_ms = seconds_to_ms(field<double>(j, "duration_s"));
            if (c.duration_ms <= 0) throw CommandError("duration_s must be positive");
            if (j.contains("cause")) c.cause = enum_field<ClosureCause>(j, "cause");
            break;
        case VsoCommandKind::ClearCloseOrder:
            c.order_id = optional_field<std::int64_t>(j, "order_id").value_or(0);
            c.pad = optional_field<std::string>(j, "pad").value_or("");
            if (c.order_id == 0 && c.pad.empty()) throw CommandError("order_id or pad required");
            break;
        case VsoCommandKind::ReassignSlot:
            c.request_id = optional_field<std::int64_t>(j, "request_id").value_or(0);
            c.callsign = optional_field<std::string>(j, "callsign").value_or("");
            if (c.request_id == 0 && c.callsign.empty()) throw CommandError("request_id or callsign required");
            c.pad = field<std::string>(j, "pad");
            c.slot_start = optional_field<SimTime>(j, "slot_start_ms");
            c.slot_end = optional_field<SimTime>(j, "slot_end_ms");
            if (c.slot_start.has_value() != c.slot_end.has_value()) throw CommandError("slot_start_ms and slot_end_ms go together");
            break;
        case VsoCommandKind::SetAdherenceCriteria:
            c.spatial_m = field<double>(j, "spatial_m");
            c.temporal_s = field<double>(j, "temporal_s");
            if (!(c.spatial_m > 0) || !(c.temporal_s > 0)) throw CommandError("tolerances must be positive");
            break;
        case VsoCommandKind::SetNotificationThresholds:
            c.wind_alert_mps = optional_field<double>(j, "wind_alert_mps");
            c.deviation_alert_m = optional_field<double>(j, "deviation_alert_m");
            break;
        case VsoCommandKind::SetPadMode:
            c.pad = field<std::string>(j, "pad");
            c.mode = enum_field<PadMode>(j, "mode");
            if (c.mode == PadMode::NONE) throw CommandError("use CreateCloseOrder to close a pad");
            break;
        case VsoCommandKind::AddAvoidArea:
            c.area_id = field<std::string>(j, "id");
            for (const auto& p : field<json>(j, "polygon")) {
                if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
                    throw CommandError("polygon points are [east, north]");
                c.polygon.push_back({p[0].get<double>(), p[1].get<double>()});
            }
            if (c.polygon.size() < 3) throw CommandError("polygon needs 3 points");
            break;
        case VsoCommandKind::RemoveAvoidArea: c.area_id = field<std::string>(j, "id"); break;
        case VsoCommandKind::ClassifyHazard:
            c.prompt_id = field<std::int64_t>(j, "prompt_id");
            c.pad = optional_field<std::string>(j, "pad").value_or("");
            break;
    }
    return c;
}

json to_json(const VsoCommand& c) {
    json j{{"command", to_string(c.kind)}};
    switch (c.kind) {
        case VsoCommandKind::AcknowledgeRequest:
        case VsoCommandKind::ApproveFlight:
        case VsoCommandKind::CancelFlight: j["request_id"] = c.request_id; break;
        case VsoCommandKind::CreateCloseOrder:
            j["pad"] = c.pad;
            if (c.start) j["start_ms"] = *c.start;
            j["duration_s"] = static_cast<double>(c.duration_ms) / 1000.0;
            j["cause"] = to_string(c.cause);
            break;
        case VsoCommandKind::ClearCloseOrder:
            if (c.order_id) j["order_id"] = c.order_id;
            if (!c.pad.empty()) j["pad"] = c.pad;
            break;
        case VsoCommandKind::ReassignSlot:
            if (c.request_id) j["request_id"] = c.request_id;
            if (!c.callsign.empty()) j["callsign"] = c.callsign;
            j["pad"] = c.pad;
            if (c.slot_start) j["slot_start_ms"] = *c.slot_start;
            if (c.slot_end) j["slot_end_ms"] = *c.slot_end;
            break;
        case VsoCommandKind::SetAdherenceCriteria:
            j["spatial_m"] = c.spatial_m;
            j["temporal_s"] = c.temporal_s;
            break;
        case VsoCommandKind::SetNotificationThresholds:
            if (c.wind_alert_mps) j["wind_alert_mps"] = *c.wind_alert_mps;
            if (c.deviation_alert_m) j["deviation_alert_m"] = *c.deviation_alert_m;
            break;
        case VsoCommandKind::SetPadMode:
            j["pad"] = c.pad;
            j["mode"] = to_string(c.mode);
            break;
        case VsoCommandKind::AddAvoidArea: {
            j["id"] = c.area_id;
            json poly = json::array();
            for (const auto& p : c.polygon) poly.push_back({p.east, p.north});
            j["polygon"] = poly;
            break;
        }
        case VsoCommandKind::RemoveAvoidArea: j["id"] = c.area_id; break;
        case VsoCommandKind::ClassifyHazard:
            j["prompt_id"] = c.prompt_id;
            if (!c.pad.empty()) j["pad"] = c.pad;
            break;
    }
    return j;
}

}  // namespace vertisim::vertidrome
