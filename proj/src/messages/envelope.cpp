#include "vertisim/messages/envelope.hpp"

#include <array>

#include "json.hpp"

namespace vertisim {

using nlohmann::json;

// ------------------------------------------------------------ enum <-> json

template <class E>
    requires requires { EnumNames<E>::values; }
void to_json(json& j, E value) {
    j = std::string(to_string(value));
}

template <class E>
    requires requires { EnumNames<E>::values; }
void from_json(const json& j, E& value) {
    const auto parsed = enum_from_string<E>(j.get<std::string>());
    if (!parsed) throw ParseError("unknown enum value " + j.dump());
    value = *parsed;
}

// ------------------------------------------------------------ helpers

namespace {

template <class T>
void put_opt(json& j, const char* key, const std::optional<T>& v) {
    if (v) j[key] = *v;
}

template <class T>
std::optional<T> get_opt(const json& j, const char* key) {
    const auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->get<T>();
}

}  // namespace

void to_json(json& j, const Vec3& v) { j = json{{"east", v.east}, {"north", v.north}, {"up", v.up}}; }
void from_json(const json& j, Vec3& v) {
    j.at("east").get_to(v.east);
    j.at("north").get_to(v.north);
    j.at("up").get_to(v.up);
}

void to_json(json& j, const Waypoint& w) {
    j = json{{"east", w.position.east}, {"north", w.position.north}, {"up", w.position.up}, {"eta_ms", w.eta}};
}
void from_json(const json& j, Waypoint& w) {
    from_json(j, w.position);
    j.at("eta_ms").get_to(w.eta);
}

NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(RegistrationRequest, operator_id, serial, callsign)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(RegistrationResponse, operator_id, serial, callsign, accepted, uas_id, reason)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(FlightStatus, callsign, request_id, status)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(FlightAuthorisation, callsign, request_id, verdict, reason, vertidrome, pad,
                                   slot_start, slot_end)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SlotDecision, request_id, callsign, vertidrome, verdict, pad, slot_start,
                                   slot_end, reason)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SlotCancel, vertidrome, callsign, request_id)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SlotDisplaced, vertidrome, callsign, request_id, pad, reason)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(EmsDemand, demand_id, vertidrome, pad, callsign, slot_start, slot_end)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(EmsConfirmation, demand_id, vertidrome, pad, callsign, slot_start, slot_end,
                                   moved)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(PositionReport, callsign, position, ground_speed, timestamp)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(AdherenceNotice, callsign, request_id, monitor, kind, magnitude, timestamp)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(PadStatusNotice, vertidrome, pad, status, mode, cause)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ForecastEntry, pad, callsign, aircraft_type, priority, operation, from_to,
                                   status)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(ForecastRow, minute, entries)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(SlotForecast, vertidrome, rows)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(WeatherReport, vertidrome, direction_deg, speed_mps, source)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(InfrastructureHealth, vertidrome, component, healthy, detail)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(GfmuPreference, vertidrome, pad)
NLOHMANN_DEFINE_TYPE_NON_INTRUSIVE(HazardAdvisory, callsign, vertidrome, detail)

void to_json(json& j, const FlightPlan& p) {
    j = json{{"callsign", p.callsign},
             {"aircraft_type", p.aircraft_type},
             {"priority", p.priority},
             {"operation", p.operation},
             {"origin", p.origin},
             {"destination", p.destination},
             {"requested_pad", p.requested_pad},
             {"slot_start", p.slot_start},
             {"slot_end", p.slot_end},
             {"waypoints", p.waypoints},
             {"request_id", p.request_id}};
    put_opt(j, "supersedes", p.supersedes);
}
void from_json(const json& j, FlightPlan& p) {
    j.at("callsign").get_to(p.callsign);
    j.at("aircraft_type").get_to(p.aircraft_type);
    j.at("priority").get_to(p.priority);
    j.at("operation").get_to(p.operation);
    j.at("origin").get_to(p.origin);
    j.at("destination").get_to(p.destination);
    j.at("requested_pad").get_to(p.requested_pad);
    j.at("slot_start").get_to(p.slot_start);
    j.at("slot_end").get_to(p.slot_end);
    j.at("waypoints").get_to(p.waypoints);
    j.at("request_id").get_to(p.request_id);
    p.supersedes = get_opt<std::int64_t>(j, "supersedes");
}

void to_json(json& j, const EmergencyReport& r) {
    j = json{{"kind", r.kind}, {"vertidrome", r.vertidrome}, {"reporter", r.reporter}, {"detail", r.detail}};
    put_opt(j, "pad", r.pad);
}
void from_json(const json& j, EmergencyReport& r) {
    j.at("kind").get_to(r.kind);
    j.at("vertidrome").get_to(r.vertidrome);
    j.at("reporter").get_to(r.reporter);
    j.at("detail").get_to(r.detail);
    r.pad = get_opt<std::string>(j, "pad");
    if (r.kind != EmergencyKind::VehicleDistress && !r.pad) throw ParseError("emergency report needs a pad");
}

void to_json(json& j, const FleetCommand& c) {
    j = json{{"callsign", c.callsign}, {"command", c.command}, {"waypoints", c.waypoints}, {"pad", c.pad}};
    put_opt(j, "pad_position", c.pad_position);
}
void from_json(const json& j, FleetCommand& c) {
    j.at("callsign").get_to(c.callsign);
    j.at("command").get_to(c.command);
    j.at("waypoints").get_to(c.waypoints);
    j.at("pad").get_to(c.pad);
    c.pad_position = get_opt<Vec3>(j, "pad_position");
}

// ------------------------------------------------------------ type tags

namespace {

constexpr std::array<std::pair<MessageType, std::string_view>, 22> kTypeNames{{
    {MessageType::RegistrationRequest, "RegistrationRequest"},
    {MessageType::RegistrationResponse, "RegistrationResponse"},
    {MessageType::FlightPlan, "FlightPlan"},
    {MessageType::LandRequest, "LandRequest"},
    {MessageType::DepartRequest, "DepartRequest"},
    {MessageType::FlightStatus, "FlightStatus"},
    {MessageType::FlightAuthorisation, "FlightAuthorisation"},
    {MessageType::SlotDecision, "SlotDecision"},
    {MessageType::SlotCancel, "SlotCancel"},
    {MessageType::SlotDisplaced, "SlotDisplaced"},
    {MessageType::EmsDemand, "EmsDemand"},
    {MessageType::EmsConfirmation, "EmsConfirmation"},
    {MessageType::PositionReport, "PositionReport"},
    {MessageType::AdherenceNotice, "AdherenceNotice"},
    {MessageType::EmergencyReport, "EmergencyReport"},
    {MessageType::PadStatusNotice, "PadStatusNotice"},
    {MessageType::SlotForecast, "SlotForecast"},
    {MessageType::WeatherReport, "WeatherReport"},
    {MessageType::InfrastructureHealth, "InfrastructureHealth"},
    {MessageType::GfmuPreference, "GfmuPreference"},
    {MessageType::FleetCommand, "FleetCommand"},
    {MessageType::HazardAdvisory, "HazardAdvisory"},
}};

template <class T, class V, std::size_t I = 0>
constexpr std::size_t variant_index() {
    if constexpr (std::is_same_v<T, std::variant_alternative_t<I, V>>) {
        return I;
    } else {
        return variant_index<T, V, I + 1>();
    }
}

template <class T>
constexpr std::size_t index_of() {
    return variant_index<T, Body>();
}

std::size_t body_index_for(MessageType type) {
    switch (type) {
        case MessageType::RegistrationRequest: return index_of<RegistrationRequest>();
        case MessageType::RegistrationResponse: return index_of<RegistrationResponse>();
        case MessageType::FlightPlan:
        case MessageType::LandRequest:
        case MessageType::DepartRequest: return index_of<FlightPlan>();
        case MessageType::FlightStatus: return index_of<FlightStatus>();
        case MessageType::FlightAuthorisation: return index_of<FlightAuthorisation>();
        case MessageType::SlotDecision: return index_of<SlotDecision>();
        case MessageType::SlotCancel: return index_of<SlotCancel>();
        case MessageType::SlotDisplaced: return index_of<SlotDisplaced>();
        case MessageType::EmsDemand: return index_of<EmsDemand>();
        case MessageType::EmsConfirmation: return index_of<EmsConfirmation>();
        case MessageType::PositionReport: return index_of<PositionReport>();
        case MessageType::AdherenceNotice: return index_of<AdherenceNotice>();
        case MessageType::EmergencyReport: return index_of<EmergencyReport>();
        case MessageType::PadStatusNotice: return index_of<PadStatusNotice>();
        case MessageType::SlotForecast: return index_of<SlotForecast>();
        case MessageType::WeatherReport: return index_of<WeatherReport>();
        case MessageType::InfrastructureHealth: return index_of<InfrastructureHealth>();
        case MessageType::GfmuPreference: return index_of<GfmuPreference>();
        case MessageType::FleetCommand: return index_of<FleetCommand>();
        case MessageType::HazardAdvisory: return index_of<HazardAdvisory>();
    }
    return std::variant_npos;
}

template <std::size_t I = 0>
Body body_from_json(std::size_t index, const json& j) {
    if constexpr (I < std::variant_size_v<Body>) {
        if (index == I) return Body(std::in_place_index<I>, j.get<std::variant_alternative_t<I, Body>>());
        return body_from_json<I + 1>(index, j);
    } else {
        throw ParseError("unsupported body");
    }
}

}  // namespace

std::string_view to_string(MessageType type) {
    for (const auto& [t, name] : kTypeNames) {
        if (t == type) return name;
    }
    return "?";
}

std::optional<MessageType> message_type_from_string(std::string_view name) {
    for (const auto& [t, n] : kTypeNames) {
        if (n == name) return t;
    }
    return std::nullopt;
}

bool body_matches(MessageType type, const Body& body) { return body_index_for(type) == body.index(); }

MessageType default_type(const Body& body, bool to_vertidrome) {
    for (const auto& [t, _] : kTypeNames) {
        if (t == MessageType::LandRequest || t == MessageType::DepartRequest) continue;
        if (body_matches(t, body)) {
            if (t == MessageType::FlightPlan && to_vertidrome) {
                return std::get<FlightPlan>(body).operation == Operation::ARR ? MessageType::LandRequest
                                                                              : MessageType::DepartRequest;
            }
            return t;
        }
    }
    return MessageType::PositionReport;
}

// ------------------------------------------------------------ envelope

std::string serialize(const Envelope& env) {
    if (!body_matches(env.type, env.body)) throw ParseError("type tag does not match body");
    json j;
    j["topic"] = env.topic;
    j["type"] = std::string(to_string(env.type));
    j["sender"] = env.sender;
    j["seq"] = env.seq;
    j["sim_time"] = env.sim_time;
    std::visit([&](const auto& b) { j["body"] = b; }, env.body);
    return j.dump();
}

std::vector<std::uint8_t> serialize_bytes(const Envelope& env) {
    const auto s = serialize(env);
    return {s.begin(), s.end()};
}

Envelope parse(std::string_view text) {
    try {
        const json j = json::parse(text);
        if (!j.is_object()) throw ParseError("envelope is not an object");
        Envelope env;
        j.at("topic").get_to(env.topic);
        const auto tag = j.at("type").get<std::string>();
        const auto type = message_type_from_string(tag);
        if (!type) throw ParseError("unknown type tag " + tag);
        env.type = *type;
        j.at("sender").get_to(env.sender);
        j.at("seq").get_to(env.seq);
        j.at("sim_time").get_to(env.sim_time);
        const auto& body = j.at("body");
        if (!body.is_object()) throw ParseError("body is not an object");
        env.body = body_from_json(body_index_for(env.type), body);
        return env;
    } catch (const ParseError&) {
        throw;
    } catch (const json::exception& e) {
        throw ParseError(e.what());
    }
}

Envelope parse(const std::vector<std::uint8_t>& bytes) {
    return parse(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

}  // namespace vertisim
