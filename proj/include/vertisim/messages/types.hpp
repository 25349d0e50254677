#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "vertisim/messages/geometry.hpp"

namespace vertisim {

// ------------------------------------------------------------------ enums

enum class Operation { ARR, DEP };
enum class SlotVerdict { Accepted, Rejected };
enum class AuthVerdict { Approved, Denied };
enum class EmergencyKind { PersonOnPad, ForeignObject, VehicleDistress };
enum class PadStatus { CLEAR, CLOSED };
enum class PadMode { ARR, DEP, BOTH, NONE };
enum class ClosureCause { Operator, ForeignObject, Weather };
enum class FlightStatusKind { Activate, Conclude, Cancel };
enum class DeviationKind { Spatial, Temporal, AvoidArea };
enum class WeatherSource { LocalSensor, UspaceService };
enum class CommandKind { TakeOff, UploadRoute, Land, Hold };
enum class ForecastStatus { SCHEDULED, AIRBORNE, LANDED, DEPARTED, CANCELLED };

template <class E>
struct EnumNames;

#define VERTISIM_ENUM_NAMES(E, ...)                                              \
    template <>                                                                  \
    struct EnumNames<E> {                                                        \
        static constexpr auto values = std::to_array<std::pair<E, std::string_view>>({__VA_ARGS__}); \
    };

VERTISIM_ENUM_NAMES(Operation, {Operation::ARR, "ARR"}, {Operation::DEP, "DEP"})
VERTISIM_ENUM_NAMES(SlotVerdict, {SlotVerdict::Accepted, "Accepted"}, {SlotVerdict::Rejected, "Rejected"})
VERTISIM_ENUM_NAMES(AuthVerdict, {AuthVerdict::Approved, "Approved"}, {AuthVerdict::Denied, "Denied"})
VERTISIM_ENUM_NAMES(EmergencyKind, {EmergencyKind::PersonOnPad, "PersonOnPad"},
                    {EmergencyKind::ForeignObject, "ForeignObject"},
                    {EmergencyKind::VehicleDistress, "VehicleDistress"})
VERTISIM_ENUM_NAMES(PadStatus, {PadStatus::CLEAR, "CLEAR"}, {PadStatus::CLOSED, "CLOSED"})
VERTISIM_ENUM_NAMES(PadMode, {PadMode::ARR, "ARR"}, {PadMode::DEP, "DEP"}, {PadMode::BOTH, "BOTH"},
                    {PadMode::NONE, "NONE"})
VERTISIM_ENUM_NAMES(ClosureCause, {ClosureCause::Operator, "Operator"},
                    {ClosureCause::ForeignObject, "ForeignObject"}, {ClosureCause::Weather, "Weather"})
VERTISIM_ENUM_NAMES(FlightStatusKind, {FlightStatusKind::Activate, "Activate"},
                    {FlightStatusKind::Conclude, "Conclude"}, {FlightStatusKind::Cancel, "Cancel"})
VERTISIM_ENUM_NAMES(DeviationKind, {DeviationKind::Spatial, "Spatial"}, {DeviationKind::Temporal, "Temporal"},
                    {DeviationKind::AvoidArea, "AvoidArea"})
VERTISIM_ENUM_NAMES(WeatherSource, {WeatherSource::LocalSensor, "LocalSensor"},
                    {WeatherSource::UspaceService, "UspaceService"})
VERTISIM_ENUM_NAMES(CommandKind, {CommandKind::TakeOff, "TakeOff"}, {CommandKind::UploadRoute, "UploadRoute"},
                    {CommandKind::Land, "Land"}, {CommandKind::Hold, "Hold"})
VERTISIM_ENUM_NAMES(ForecastStatus, {ForecastStatus::SCHEDULED, "SCHEDULED"},
                    {ForecastStatus::AIRBORNE, "AIRBORNE"}, {ForecastStatus::LANDED, "LANDED"},
                    {ForecastStatus::DEPARTED, "DEPARTED"}, {ForecastStatus::CANCELLED, "CANCELLED"})

#undef VERTISIM_ENUM_NAMES

template <class E>
constexpr std::string_view to_string(E value) requires requires { EnumNames<E>::values; } {
    for (const auto& [v, name] : EnumNames<E>::values) {
        if (v == value) return name;
    }
    return "?";
}

template <class E>
constexpr std::optional<E> enum_from_string(std::string_view name) {
    for (const auto& [v, n] : EnumNames<E>::values) {
        if (n == name) return v;
    }
    return std::nullopt;
}

// ------------------------------------------------------------------ bodies

/// Highest priority value; reserved for emergency demands.
inline constexpr int kEmsPriority = 10;

struct RegistrationRequest {
    std::string operator_id;
    std::string serial;
    std::string callsign;  // operational callsign bound to the registration
    bool operator==(const RegistrationRequest&) const = default;
};

struct RegistrationResponse {
    std::string operator_id;
    std::string serial;
    std::string callsign;
    bool accepted = false;
    std::string uas_id;  // empty when rejected
    std::string reason;
    bool operator==(const RegistrationResponse&) const = default;
};

struct FlightPlan {
    std::string callsign;
    std::string aircraft_type;
    int priority = 0;
    Operation operation = Operation::ARR;
    std::string origin;
    std::string destination;  // vertidrome id
    std::string requested_pad;
    SimTime slot_start = 0;
    SimTime slot_end = 0;
    std::vector<Waypoint> waypoints;
    std::int64_t request_id = 0;
    std::optional<std::int64_t> supersedes;  // request id this plan replaces

    bool operator==(const FlightPlan&) const = default;

    /// The vertidrome whose pads this plan books.
    const std::string& vertidrome() const { return operation == Operation::ARR ? destination : origin; }
};

/// Empty when the plan satisfies its invariants, otherwise the first violation.
std::optional<std::string> validate(const FlightPlan& plan);

struct FlightStatus {
    std::string callsign;
    std::int64_t request_id = 0;
    FlightStatusKind status = FlightStatusKind::Activate;
    bool operator==(const FlightStatus&) const = default;
};

struct FlightAuthorisation {
    std::string callsign;
    std::int64_t request_id = 0;
    AuthVerdict verdict = AuthVerdict::Denied;
    std::string reason;
    std::string vertidrome;
    std::string pad;
    SimTime slot_start = 0;
    SimTime slot_end = 0;
    bool operator==(const FlightAuthorisation&) const = default;
};

struct SlotDecision {
    std::int64_t request_id = 0;
    std::string callsign;
    std::string vertidrome;
    SlotVerdict verdict = SlotVerdict::Rejected;
    std::string pad;
    SimTime slot_start = 0;
    SimTime slot_end = 0;
    std::string reason;
    bool operator==(const SlotDecision&) const = default;
};

struct SlotCancel {
    std::string vertidrome;
    std::string callsign;
    std::int64_t request_id = 0;
    bool operator==(const SlotCancel&) const = default;
};

struct SlotDisplaced {
    std::string vertidrome;
    std::string callsign;
    std::int64_t request_id = 0;
    std::string pad;
    std::string reason;
    bool operator==(const SlotDisplaced&) const = default;
};

struct EmsDemand {
    std::int64_t demand_id = 0;
    std::string vertidrome;
    std::string pad;
    std::string callsign;
    SimTime slot_start = 0;
    SimTime slot_end = 0;
    bool operator==(const EmsDemand&) const = default;
};

struct EmsConfirmation {
    std::int64_t demand_id = 0;
    std::string vertidrome;
    std::string pad;
    std::string callsign;
    SimTime slot_start = 0;
    SimTime slot_end = 0;
    bool moved = false;  // true when the next free window was offered instead
    bool operator==(const EmsConfirmation&) const = default;
};

struct PositionReport {
    std::string callsign;
    Vec3 position;
    double ground_speed = 0.0;
    SimTime timestamp = 0;
    bool operator==(const PositionReport&) const = default;
};

struct AdherenceNotice {
    std::string callsign;
    std::int64_t request_id = 0;
    std::string monitor;  // "uspace" or a vertidrome id
    DeviationKind kind = DeviationKind::Spatial;
    double magnitude = 0.0;
    SimTime timestamp = 0;
    bool operator==(const AdherenceNotice&) const = default;
};

struct EmergencyReport {
    EmergencyKind kind = EmergencyKind::PersonOnPad;
    std::string vertidrome;
    std::optional<std::string> pad;
    std::string reporter;
    std::string detail;
    bool operator==(const EmergencyReport&) const = default;
};

struct PadStatusNotice {
    std::string vertidrome;
    std::string pad;
    PadStatus status = PadStatus::CLEAR;
    PadMode mode = PadMode::BOTH;
    ClosureCause cause = ClosureCause::Operator;
    bool operator==(const PadStatusNotice&) const = default;
};

struct ForecastEntry {
    std::string pad;
    std::string callsign;
    std::string aircraft_type;
    int priority = 0;
    Operation operation = Operation::ARR;
    std::string from_to;
    ForecastStatus status = ForecastStatus::SCHEDULED;
    bool operator==(const ForecastEntry&) const = default;
};

struct ForecastRow {
    SimTime minute = 0;
    std::vector<ForecastEntry> entries;
    bool operator==(const ForecastRow&) const = default;
};

struct SlotForecast {
    std::string vertidrome;
    std::vector<ForecastRow> rows;
    bool operator==(const SlotForecast&) const = default;
};

struct WeatherReport {
    std::string vertidrome;
    double direction_deg = 0.0;
    double speed_mps = 0.0;
    WeatherSource source = WeatherSource::LocalSensor;
    bool operator==(const WeatherReport&) const = default;
};

struct InfrastructureHealth {
    std::string vertidrome;
    std::string component;
    bool healthy = true;
    std::string detail;
    bool operator==(const InfrastructureHealth&) const = default;
};

struct GfmuPreference {
    std::string vertidrome;
    std::string pad;
    bool operator==(const GfmuPreference&) const = default;
};

struct FleetCommand {
    std::string callsign;
    CommandKind command = CommandKind::Hold;
    std::vector<Waypoint> waypoints;  // UploadRoute
    std::string pad;                  // Land
    std::optional<Vec3> pad_position;  // Land
    bool operator==(const FleetCommand&) const = default;
};

struct HazardAdvisory {
    std::string callsign;
    std::string vertidrome;
    std::string detail;
    bool operator==(const HazardAdvisory&) const = default;
};

}  // namespace vertisim
