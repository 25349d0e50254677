#pragma once

#include <stdexcept>
#include <vector>

#include "vertisim/fleet/world.hpp"
#include "vertisim/messages/geometry.hpp"

namespace vertisim::fleet {

struct PlannerParams {
    double cruise_speed_mps = 2.0;
    double climb_rate_mps = 2.0;
    double cruise_altitude_m = 30.0;
    double clearance_m = 2.0;
    double grid_m = 1.0;
    double margin_m = 25.0;  // grid extends this far beyond endpoints and geofences
};

class PlanningError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Geofence-avoiding horizontal polyline from `from` to `to`, both included.
/// A* on an 8-connected lattice, then line-of-sight smoothing.
std::vector<Point2> plan_horizontal(Point2 from, Point2 to, const WorldMap& world, const PlannerParams& params);

/// 4D route: climb at the origin, cruise along the planned polyline (entering
/// through the pad's approach arc when it has one), descend onto the pad.
/// The first waypoint is the origin at `departure`.
std::vector<Waypoint> plan_route(const Vec3& origin, const PadSite& destination, SimTime departure,
                                 const WorldMap& world, const PlannerParams& params);

}  // namespace vertisim::fleet
