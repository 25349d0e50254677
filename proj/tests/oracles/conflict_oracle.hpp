#pragma once

// Brute-force 4D separation check: every pair of 0.1 s samples, no pruning.

#include <cmath>
#include <random>
#include <vector>

#include "vertisim/messages/types.hpp"
#include "vertisim/uspace/conflict.hpp"

namespace oracle {

using vertisim::SimTime;
using vertisim::Waypoint;

inline std::vector<std::pair<SimTime, vertisim::Vec3>> samples(const std::vector<Waypoint>& route, SimTime step) {
    std::vector<std::pair<SimTime, vertisim::Vec3>> out;
    const SimTime first = route.front().eta, last = route.back().eta;
    SimTime t = (first / step) * step;
    if (t < first) t += step;
    for (; t <= last; t += step) out.emplace_back(t, vertisim::position_at(route, t));
    return out;
}

inline bool conflict(const std::vector<Waypoint>& a, const std::vector<Waypoint>& b,
                     const vertisim::uspace::SeparationMinima& m) {
    const auto sa = samples(a, m.sample_ms);
    const auto sb = samples(b, m.sample_ms);
    for (const auto& [ta, pa] : sa) {
        for (const auto& [tb, pb] : sb) {
            if (std::llabs(ta - tb) > m.temporal_ms) continue;
            if (std::abs(pa.up - pb.up) >= m.vertical_m) continue;
            if (std::hypot(pa.east - pb.east, pa.north - pb.north) >= m.horizontal_m) continue;
            return true;
        }
    }
    return false;
}

/// Short random route inside a square world: 2-4 waypoints, 20-100 s long.
inline vertisim::FlightPlan random_plan(std::mt19937& rng, const std::string& callsign, std::int64_t request_id,
                                        double world = 200.0) {
    std::uniform_real_distribution<double> xy(0.0, world), alt(10.0, 20.0);
    std::uniform_int_distribution<int> legs(1, 3), start(0, 60000), dur(20000, 100000);
    vertisim::FlightPlan p;
    p.callsign = callsign;
    p.aircraft_type = "MOTT";
    p.priority = 1;
    p.destination = "VD";
    p.requested_pad = "P";
    p.request_id = request_id;
    const int n = legs(rng) + 1;
    const SimTime t0 = start(rng);
    const SimTime total = dur(rng);
    for (int i = 0; i < n; ++i) {
        p.waypoints.push_back({{xy(rng), xy(rng), alt(rng)}, t0 + total * i / (n - 1)});
    }
    p.slot_start = p.waypoints.back().eta - 15000;
    p.slot_end = p.slot_start + 60000;
    return p;
}

}  // namespace oracle
