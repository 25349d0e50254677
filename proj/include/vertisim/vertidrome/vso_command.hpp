#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "vertisim/messages/types.hpp"

namespace vertisim::vertidrome {

enum class VsoCommandKind {
    AcknowledgeRequest,
    ApproveFlight,
    CancelFlight,
    CreateCloseOrder,
    ClearCloseOrder,
    ReassignSlot,
    SetAdherenceCriteria,
    SetNotificationThresholds,
    SetPadMode,
    AddAvoidArea,
    RemoveAvoidArea,
    ClassifyHazard,
};

std::string_view to_string(VsoCommandKind k);

/// One operator command. Which fields matter depends on `kind`; see docs/gateway.md.
struct VsoCommand {
    VsoCommandKind kind = VsoCommandKind::AcknowledgeRequest;
    std::int64_t request_id = 0;
    std::string callsign;  // ReassignSlot alternative to request_id
    std::string pad;
    std::optional<SimTime> start;  // CreateCloseOrder; default now
    SimTime duration_ms = 0;
    ClosureCause cause = ClosureCause::Operator;
    std::int64_t order_id = 0;
    std::optional<SimTime> slot_start, slot_end;
    double spatial_m = 0.0, temporal_s = 0.0;
    std::optional<double> wind_alert_mps, deviation_alert_m;
    PadMode mode = PadMode::BOTH;
    std::string area_id;
    std::vector<Point2> polygon;
    std::int64_t prompt_id = 0;
};

class CommandError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Throws CommandError on an unknown command or a missing/mistyped field.
VsoCommand parse_vso_command(const nlohmann::json& j);
nlohmann::json to_json(const VsoCommand& c);

struct CommandResult {
    bool ok = true;
    std::string reason;
};

}  // namespace vertisim::vertidrome
