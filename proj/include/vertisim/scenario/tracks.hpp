#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "vertisim/messages/geometry.hpp"

namespace vertisim::scenario {

struct TrackPoint {
    SimTime time = 0;
    std::string callsign;
    Vec3 position;
    std::string leg;  // "primary", "alternate-1", ...
};

/// Position reports as flown, in emission order.
class Tracks {
public:
    void add(TrackPoint p) { points_.push_back(std::move(p)); }
    const std::vector<TrackPoint>& points() const { return points_; }
    std::vector<TrackPoint> of(const std::string& callsign) const;
    std::vector<std::string> legs(const std::string& callsign) const;

    static constexpr const char* kHeader = "sim_time_ms,callsign,east_m,north_m,up_m,leg";
    void write_csv(std::ostream& out) const;
    std::string csv() const;

private:
    std::vector<TrackPoint> points_;
};

}  // namespace vertisim::scenario
