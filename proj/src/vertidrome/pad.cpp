#include "vertisim/vertidrome/pad.hpp"

#include <cmath>

namespace vertisim::vertidrome {

bool ApproachArc::contains(double az) const {
    if (from_deg == to_deg) return true;
    const auto norm = [](double a) { return std::fmod(std::fmod(a, 360.0) + 360.0, 360.0); };
    const double f = norm(from_deg), t = norm(to_deg), a = norm(az);
    return f <= t ? (a >= f && a <= t) : (a >= f || a <= t);
}

bool Pad::closed_at(SimTime t) const {
    if (!objects.empty()) return true;
    for (const auto& o : close_orders) {
        if (o.active_at(t)) return true;
    }
    return false;
}

ClosureCause Pad::cause(SimTime t) const {
    if (!objects.empty()) return ClosureCause::ForeignObject;
    for (const auto& o : close_orders) {
        if (o.active_at(t)) return o.cause;
    }
    return ClosureCause::Operator;
}

std::optional<SimTime> Pad::next_change(SimTime t) const {
    std::optional<SimTime> next;
    for (const auto& o : close_orders) {
        for (const SimTime edge : {o.start, o.end}) {
            if (edge > t && (!next || edge < *next)) next = edge;
        }
    }
    return next;
}

bool mode_allows(PadMode mode, Operation op) {
    switch (mode) {
        case PadMode::BOTH: return true;
        case PadMode::ARR: return op == Operation::ARR;
        case PadMode::DEP: return op == Operation::DEP;
        case PadMode::NONE: return false;
    }
    return false;
}

}  // namespace vertisim::vertidrome
