#pragma once

#include <optional>
#include <string>

#include "vertisim/messages/types.hpp"

namespace vertisim::vertidrome {

struct SectorGeometry {
    double radius_m = 150.0;
    double ceiling_m = 120.0;
};

struct SectorTrack {
    std::string pad;
    std::string callsign;
    double azimuth_deg = 0.0;  // [0, 360), clockwise from north, pad -> aircraft
    double distance_m = 0.0;
    double rel_altitude_m = 0.0;
};

/// Integer display row.
struct SectorRow {
    std::string pad;
    std::string callsign;
    int azimuth = 0;
    int distance = 0;
    int rel_altitude = 0;
    bool operator==(const SectorRow&) const = default;
};

/// Empty when the aircraft is outside the sector cylinder above the pad.
std::optional<SectorTrack> sector_view(const PositionReport& report, const std::string& pad_id, const Vec3& pad_center,
                                       const SectorGeometry& sector);

/// Position reconstructed from a track (inverse projection).
Vec3 sector_position(const SectorTrack& track, const Vec3& pad_center);

SectorRow display_row(const SectorTrack& track);

}  // namespace vertisim::vertidrome
