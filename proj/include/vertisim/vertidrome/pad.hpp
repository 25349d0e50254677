#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vertisim/messages/types.hpp"

namespace vertisim::vertidrome {

struct CloseOrder {
    std::int64_t id = 0;
    SimTime start = 0;
    SimTime end = 0;  // exclusive
    ClosureCause cause = ClosureCause::Operator;
    bool active_at(SimTime t) const { return start <= t && t < end; }
};

struct ObjectReport {
    std::int64_t id = 0;
    EmergencyKind kind = EmergencyKind::ForeignObject;
    std::string reporter;
    std::string detail;
    SimTime time = 0;
};

/// Angular interval (degrees clockwise from north, pad -> aircraft) from
/// which arrivals approach. from == to means any direction.
struct ApproachArc {
    double from_deg = 0.0;
    double to_deg = 0.0;
    double radius_m = 20.0;
    bool contains(double azimuth_deg) const;
};

struct Pad {
    std::string id;
    std::string label;  // short name shown to the VSO ("A")
    Vec3 center;        // up = pad elevation
    PadMode configured_mode = PadMode::BOTH;
    std::optional<PadMode> pending_mode;
    std::optional<ApproachArc> arc;
    std::vector<CloseOrder> close_orders;
    std::vector<ObjectReport> objects;

    bool closed_at(SimTime t) const;
    PadStatus status(SimTime t) const { return closed_at(t) ? PadStatus::CLOSED : PadStatus::CLEAR; }
    PadMode mode(SimTime t) const { return closed_at(t) ? PadMode::NONE : configured_mode; }
    /// Cause reported with a closure: objects win over close orders.
    ClosureCause cause(SimTime t) const;
    /// Next instant after `t` at which a close order starts or ends.
    std::optional<SimTime> next_change(SimTime t) const;
};

bool mode_allows(PadMode mode, Operation op);

}  // namespace vertisim::vertidrome
