#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "vertisim/messages/types.hpp"

namespace vertisim {

enum class MessageType {
    RegistrationRequest,
    RegistrationResponse,
    FlightPlan,
    LandRequest,
    DepartRequest,
    FlightStatus,
    FlightAuthorisation,
    SlotDecision,
    SlotCancel,
    SlotDisplaced,
    EmsDemand,
    EmsConfirmation,
    PositionReport,
    AdherenceNotice,
    EmergencyReport,
    PadStatusNotice,
    SlotForecast,
    WeatherReport,
    InfrastructureHealth,
    GfmuPreference,
    FleetCommand,
    HazardAdvisory,
};

std::string_view to_string(MessageType type);
std::optional<MessageType> message_type_from_string(std::string_view name);

using Body = std::variant<RegistrationRequest, RegistrationResponse, FlightPlan, FlightStatus,
                          FlightAuthorisation, SlotDecision, SlotCancel, SlotDisplaced, EmsDemand,
                          EmsConfirmation, PositionReport, AdherenceNotice, EmergencyReport,
                          PadStatusNotice, SlotForecast, WeatherReport, InfrastructureHealth,
                          GfmuPreference, FleetCommand, HazardAdvisory>;

/// True when `body` holds the shape the type tag requires. FlightPlan,
/// LandRequest and DepartRequest share the FlightPlan body.
bool body_matches(MessageType type, const Body& body);

/// The natural tag for a body (FlightPlan bodies map by their operation when
/// `to_vertidrome` is set).
MessageType default_type(const Body& body, bool to_vertidrome = false);

struct Envelope {
    std::string topic;
    MessageType type = MessageType::PositionReport;
    std::string sender;
    std::int64_t seq = 0;
    SimTime sim_time = 0;
    Body body;

    bool operator==(const Envelope&) const = default;

    template <class T>
    const T& as() const { return std::get<T>(body); }
    template <class T>
    const T* get_if() const { return std::get_if<T>(&body); }
};

class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Canonical JSON (keys sorted, compact), UTF-8.
std::string serialize(const Envelope& env);
std::vector<std::uint8_t> serialize_bytes(const Envelope& env);

/// Throws ParseError on malformed JSON, non-UTF-8, a missing or mistyped
/// field, an unknown type tag or a tag/body mismatch. Unknown fields are ignored.
Envelope parse(std::string_view json);
Envelope parse(const std::vector<std::uint8_t>& bytes);

}  // namespace vertisim
