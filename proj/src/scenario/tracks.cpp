#include "vertisim/scenario/tracks.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

namespace vertisim::scenario {

std::vector<TrackPoint> Tracks::of(const std::string& callsign) const {
    std::vector<TrackPoint> out;
    std::copy_if(points_.begin(), points_.end(), std::back_inserter(out),
                 [&](const TrackPoint& p) { return p.callsign == callsign; });
    return out;
}

std::vector<std::string> Tracks::legs(const std::string& callsign) const {
    std::vector<std::string> out;
    for (const auto& p : points_) {
        if (p.callsign != callsign) continue;
        if (std::find(out.begin(), out.end(), p.leg) == out.end()) out.push_back(p.leg);
    }
    return out;
}

void Tracks::write_csv(std::ostream& out) const {
    out << kHeader << '\n';
    char buf[160];
    for (const auto& p : points_) {
        std::snprintf(buf, sizeof buf, "%lld,%s,%.3f,%.3f,%.3f,", static_cast<long long>(p.time), p.callsign.c_str(),
                      p.position.east, p.position.north, p.position.up);
        out << buf << p.leg << '\n';
    }
}

std::string Tracks::csv() const {
    std::ostringstream out;
    write_csv(out);
    return out.str();
}

}  // namespace vertisim::scenario
