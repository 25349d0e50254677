#include "vertisim/fleet/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace vertisim::fleet {

namespace {

double wrap(double deg) {
    deg = std::fmod(deg, 360.0);
    return deg < 0 ? deg + 360.0 : deg;
}

double angular_gap(double a, double b) {
    const double d = std::fabs(wrap(a) - wrap(b));
    return std::min(d, 360.0 - d);
}

double cross(Point2 o, Point2 a, Point2 b) {
    return (a.east - o.east) * (b.north - o.north) - (a.north - o.north) * (b.east - o.east);
}

bool segments_cross(Point2 a, Point2 b, Point2 c, Point2 d) {
    const double d1 = cross(c, d, a), d2 = cross(c, d, b), d3 = cross(a, b, c), d4 = cross(a, b, d);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0)) && d1 != 0 && d2 != 0 && d3 != 0 && d4 != 0;
}

}  // namespace

bool Arc::contains(double bearing) const {
    const double b = wrap(bearing), f = wrap(from_deg), t = to_deg >= 360.0 ? 360.0 : wrap(to_deg);
    if (to_deg - from_deg >= 360.0) return true;
    return f <= t ? (b >= f && b <= t) : (b >= f || b <= t);
}

double Arc::clamp(double bearing) const {
    if (contains(bearing)) return wrap(bearing);
    return angular_gap(bearing, from_deg) <= angular_gap(bearing, to_deg) ? wrap(from_deg) : wrap(to_deg);
}

double bearing_deg(Point2 from, Point2 to) {
    return wrap(std::atan2(to.east - from.east, to.north - from.north) * 180.0 / std::numbers::pi);
}

bool polygon_is_simple(const std::vector<Point2>& poly) {
    const std::size_t n = poly.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (j == i + 1 || (i == 0 && j == n - 1)) continue;  // neighbours share a vertex
            if (segments_cross(poly[i], poly[(i + 1) % n], poly[j], poly[(j + 1) % n])) return false;
        }
    }
    return true;
}

void WorldMap::add_geofence(Geofence g) {
    if (!polygon_is_simple(g.polygon)) throw WorldError("geofence " + g.id + " is not a simple polygon");
    for (const auto& [ref, site] : pads_) {
        if (point_in_polygon(g.polygon, {site.center.east, site.center.north})) {
            throw WorldError("pad " + ref.pad + " lies inside geofence " + g.id);
        }
    }
    geofences_.push_back(std::move(g));
}

void WorldMap::add_pad(PadSite site) {
    if (inside_geofence({site.center.east, site.center.north})) {
        throw WorldError("pad " + site.ref.pad + " lies inside a geofence");
    }
    pads_[site.ref] = std::move(site);
}

const PadSite* WorldMap::pad(const PadRef& ref) const {
    const auto it = pads_.find(ref);
    return it == pads_.end() ? nullptr : &it->second;
}

bool WorldMap::inside_geofence(Point2 p) const {
    return std::any_of(geofences_.begin(), geofences_.end(),
                       [&](const Geofence& g) { return point_in_polygon(g.polygon, p); });
}

double WorldMap::clearance(Point2 p) const {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& g : geofences_) best = std::min(best, distance_to_polygon_edge(g.polygon, p));
    return best;
}

}  // namespace vertisim::fleet
