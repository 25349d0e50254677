#include "vertisim/messages/types.hpp"

#include <cmath>

namespace vertisim {

std::optional<std::string> validate(const FlightPlan& plan) {
    if (plan.callsign.empty()) return "missing callsign";
    if (plan.priority < 0 || plan.priority > kEmsPriority) return "priority out of range";
    if (plan.slot_start >= plan.slot_end) return "slot_start must precede slot_end";
    if (plan.waypoints.size() < 2) return "fewer than two waypoints";
    for (std::size_t i = 1; i < plan.waypoints.size(); ++i) {
        if (plan.waypoints[i].eta <= plan.waypoints[i - 1].eta) return "waypoint ETAs not increasing";
    }
    for (const auto& w : plan.waypoints) {
        if (!std::isfinite(w.position.east) || !std::isfinite(w.position.north) || !std::isfinite(w.position.up)) {
            return "non-finite waypoint";
        }
    }
    return std::nullopt;
}

}  // namespace vertisim
