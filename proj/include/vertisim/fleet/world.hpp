#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vertisim/messages/geometry.hpp"

namespace vertisim::fleet {

struct Geofence {
    std::string id;
    std::vector<Point2> polygon;
};

/// Bearings (degrees clockwise from north, seen from the pad) an aircraft may
/// approach from; wraps through north when from > to.
struct Arc {
    double from_deg = 0.0;
    double to_deg = 360.0;
    double radius_m = 20.0;
    bool contains(double bearing_deg) const;
    /// Bearing inside the arc closest to `bearing_deg`.
    double clamp(double bearing_deg) const;
};

struct PadRef {
    std::string vertidrome;
    std::string pad;
    auto operator<=>(const PadRef&) const = default;
};

struct PadSite {
    PadRef ref;
    Vec3 center;  // up = pad elevation
    std::optional<Arc> arc;
};

class WorldError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class WorldMap {
public:
    /// Throws WorldError on a self-intersecting geofence or a pad inside one.
    void add_geofence(Geofence g);
    void add_pad(PadSite site);

    const std::vector<Geofence>& geofences() const { return geofences_; }
    const PadSite* pad(const PadRef& ref) const;
    const std::map<PadRef, PadSite>& pads() const { return pads_; }

    bool inside_geofence(Point2 p) const;
    /// Distance to the nearest geofence edge, infinity without geofences.
    double clearance(Point2 p) const;

private:
    std::vector<Geofence> geofences_;
    std::map<PadRef, PadSite> pads_;
};

bool polygon_is_simple(const std::vector<Point2>& polygon);
double bearing_deg(Point2 from, Point2 to);

}  // namespace vertisim::fleet
