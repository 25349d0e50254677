#include "vertisim/vertidrome/sector.hpp"

#include <cmath>
#include <numbers>

namespace vertisim::vertidrome {

std::optional<SectorTrack> sector_view(const PositionReport& report, const std::string& pad_id, const Vec3& pad_center,
                                       const SectorGeometry& sector) {
    const double de = report.position.east - pad_center.east;
    const double dn = report.position.north - pad_center.north;
    const double dist = std::hypot(de, dn);
    const double rel = report.position.up - pad_center.up;
    if (dist > sector.radius_m || rel > sector.ceiling_m) return std::nullopt;
    double az = std::atan2(de, dn) * 180.0 / std::numbers::pi;
    if (az < 0.0) az += 360.0;
    if (az >= 360.0) az -= 360.0;
    return SectorTrack{pad_id, report.callsign, az, dist, rel};
}

Vec3 sector_position(const SectorTrack& t, const Vec3& c) {
    const double rad = t.azimuth_deg * std::numbers::pi / 180.0;
    return {c.east + t.distance_m * std::sin(rad), c.north + t.distance_m * std::cos(rad), c.up + t.rel_altitude_m};
}

SectorRow display_row(const SectorTrack& t) {
    int az = static_cast<int>(std::lround(t.azimuth_deg));
    if (az == 360) az = 0;
    return {t.pad, t.callsign, az, static_cast<int>(std::lround(t.distance_m)),
            static_cast<int>(std::lround(t.rel_altitude_m))};
}

}  // namespace vertisim::vertidrome
