#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace vertisim {

/// Simulated time in milliseconds since the scenario epoch.
using SimTime = std::int64_t;

/// Scenario-local frame in meters.
struct Vec3 {
    double east = 0.0;
    double north = 0.0;
    double up = 0.0;

    bool operator==(const Vec3&) const = default;

    Vec3 operator+(const Vec3& o) const { return {east + o.east, north + o.north, up + o.up}; }
    Vec3 operator-(const Vec3& o) const { return {east - o.east, north - o.north, up - o.up}; }
    Vec3 operator*(double k) const { return {east * k, north * k, up * k}; }
};

inline double norm(const Vec3& v) { return std::sqrt(v.east * v.east + v.north * v.north + v.up * v.up); }
inline double distance(const Vec3& a, const Vec3& b) { return norm(a - b); }
inline double horizontal_distance(const Vec3& a, const Vec3& b) {
    return std::hypot(a.east - b.east, a.north - b.north);
}
inline Vec3 lerp(const Vec3& a, const Vec3& b, double t) { return a + (b - a) * t; }

struct Waypoint {
    Vec3 position;
    SimTime eta = 0;

    bool operator==(const Waypoint&) const = default;
};

/// Position on the piecewise-linear 4D path at time `t`, clamped to the
/// first/last waypoint outside the covered interval. Requires a non-empty route.
Vec3 position_at(const std::vector<Waypoint>& route, SimTime t);

/// Total 3D path length.
double path_length(const std::vector<Waypoint>& route);

/// Closest point on segment [a, b] to p, as a parameter in [0, 1].
double project_onto_segment(const Vec3& a, const Vec3& b, const Vec3& p);

/// Point-in-polygon (even-odd rule) in the horizontal plane.
struct Point2 {
    double east = 0.0;
    double north = 0.0;
    bool operator==(const Point2&) const = default;
};
bool point_in_polygon(const std::vector<Point2>& polygon, Point2 p);
double distance_to_polygon_edge(const std::vector<Point2>& polygon, Point2 p);

}  // namespace vertisim
