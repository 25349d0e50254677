#pragma once

#include <vector>

#include "vertisim/messages/types.hpp"

namespace vertisim::uspace {

struct AdherenceCriteria {
    double spatial_m = 5.0;
    double temporal_s = 30.0;
};

struct Deviation {
    DeviationKind kind = DeviationKind::Spatial;
    double magnitude = 0.0;  // meters for Spatial, seconds (signed, + = late) for Temporal
    bool operator==(const Deviation&) const = default;
};

/// Empty = conforming.
/// Spatial: distance to the interpolated plan position at report time.
/// Temporal: report time minus the ETA of the closest point on the route.
std::vector<Deviation> adherence_check(const PositionReport& report, const FlightPlan& plan,
                                       const AdherenceCriteria& criteria);

/// Time at which the plan passes closest to `p`; ties go to the time nearest `hint`.
SimTime along_track_time(const std::vector<Waypoint>& route, const Vec3& p, SimTime hint);

}  // namespace vertisim::uspace
