#include "vertisim/uspace/adherence.hpp"

#include <cmath>
#include <limits>

namespace vertisim::uspace {

SimTime along_track_time(const std::vector<Waypoint>& route, const Vec3& p, SimTime hint) {
    if (route.size() == 1) return route.front().eta;
    double best = std::numeric_limits<double>::infinity();
    SimTime at = route.front().eta;
    for (std::size_t i = 0; i + 1 < route.size(); ++i) {
        const auto& a = route[i];
        const auto& b = route[i + 1];
        const double u = project_onto_segment(a.position, b.position, p);
        const double d = distance(lerp(a.position, b.position, u), p);
        const SimTime t = a.eta + static_cast<SimTime>(std::llround(u * static_cast<double>(b.eta - a.eta)));
        // crossings and hovers: equally close points resolve to the one nearest the hint
        if (d < best - 1e-6 || (d <= best + 1e-6 && std::llabs(t - hint) < std::llabs(at - hint))) {
            best = std::min(best, d);
            at = t;
        }
    }
    return at;
}

std::vector<Deviation> adherence_check(const PositionReport& report, const FlightPlan& plan,
                                       const AdherenceCriteria& criteria) {
    std::vector<Deviation> out;
    if (plan.waypoints.empty()) return out;
    const double off = distance(report.position, position_at(plan.waypoints, report.timestamp));
    if (off > criteria.spatial_m) out.push_back({DeviationKind::Spatial, off});
    const double delay = static_cast<double>(report.timestamp - along_track_time(plan.waypoints, report.position, report.timestamp)) / 1000.0;
    if (std::abs(delay) > criteria.temporal_s) out.push_back({DeviationKind::Temporal, delay});
    return out;
}

}  // namespace vertisim::uspace
