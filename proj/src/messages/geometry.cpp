#include "vertisim/messages/geometry.hpp"

#include <algorithm>
#include <limits>

namespace vertisim {

Vec3 position_at(const std::vector<Waypoint>& route, SimTime t) {
    if (t <= route.front().eta) return route.front().position;
    if (t >= route.back().eta) return route.back().position;
    const auto next = std::upper_bound(route.begin(), route.end(), t,
                                       [](SimTime v, const Waypoint& w) { return v < w.eta; });
    const auto prev = next - 1;
    const double span = static_cast<double>(next->eta - prev->eta);
    const double f = span > 0 ? static_cast<double>(t - prev->eta) / span : 1.0;
    return lerp(prev->position, next->position, f);
}

double path_length(const std::vector<Waypoint>& route) {
    double total = 0.0;
    for (std::size_t i = 1; i < route.size(); ++i) total += distance(route[i - 1].position, route[i].position);
    return total;
}

double project_onto_segment(const Vec3& a, const Vec3& b, const Vec3& p) {
    const Vec3 ab = b - a;
    const double len2 = ab.east * ab.east + ab.north * ab.north + ab.up * ab.up;
    if (len2 == 0.0) return 0.0;
    const Vec3 ap = p - a;
    const double t = (ap.east * ab.east + ap.north * ab.north + ap.up * ab.up) / len2;
    return std::clamp(t, 0.0, 1.0);
}

bool point_in_polygon(const std::vector<Point2>& polygon, Point2 p) {
    bool inside = false;
    const std::size_t n = polygon.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const auto& a = polygon[i];
        const auto& b = polygon[j];
        if ((a.north > p.north) != (b.north > p.north)) {
            const double x = a.east + (p.north - a.north) * (b.east - a.east) / (b.north - a.north);
            if (p.east < x) inside = !inside;
        }
    }
    return inside;
}

double distance_to_polygon_edge(const std::vector<Point2>& polygon, Point2 p) {
    double best = std::numeric_limits<double>::infinity();
    const std::size_t n = polygon.size();
    for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec3 a{polygon[j].east, polygon[j].north, 0};
        const Vec3 b{polygon[i].east, polygon[i].north, 0};
        const Vec3 q{p.east, p.north, 0};
        best = std::min(best, distance(lerp(a, b, project_onto_segment(a, b, q)), q));
    }
    return best;
}

}  // namespace vertisim
