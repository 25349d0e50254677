#include "vertisim/vertidrome/local_adherence.hpp"

namespace vertisim::vertidrome {

std::vector<LocalDeviation> local_adherence(const PositionReport& report, const FlightPlan& plan, SimTime slot_end,
                                            const uspace::AdherenceCriteria& criteria,
                                            const std::vector<AvoidArea>& areas) {
    std::vector<LocalDeviation> out;
    bool late = false;
    for (const auto& d : uspace::adherence_check(report, plan, criteria)) {
        out.push_back({d.kind, d.magnitude, ""});
        late = late || d.kind == DeviationKind::Temporal;
    }
    if (!late && !plan.waypoints.empty()) {
        // predicted arrival = planned arrival shifted by the current delay
        const SimTime delay =
            report.timestamp - uspace::along_track_time(plan.waypoints, report.position, report.timestamp);
        const SimTime arrival = plan.waypoints.back().eta + delay;
        if (arrival > slot_end) out.push_back({DeviationKind::Temporal, static_cast<double>(delay) / 1000.0, ""});
    }
    const Point2 p{report.position.east, report.position.north};
    for (const auto& a : areas) {
        if (point_in_polygon(a.polygon, p)) out.push_back({DeviationKind::AvoidArea, 0.0, a.id});
    }
    return out;
}

std::vector<LocalDeviation> DeviationLatch::update(const std::string& callsign, std::vector<LocalDeviation> current) {
    std::set<std::pair<DeviationKind, std::string>> keys;
    for (const auto& d : current) keys.emplace(d.kind, d.area);
    auto& last = last_[callsign];
    if (keys == last) return {};
    last = std::move(keys);
    return current;
}

}  // namespace vertisim::vertidrome
