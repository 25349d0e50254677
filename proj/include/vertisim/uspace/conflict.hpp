#pragma once

#include <vector>

#include "vertisim/messages/geometry.hpp"

namespace vertisim::uspace {

struct SeparationMinima {
    double horizontal_m = 10.0;
    double vertical_m = 5.0;
    SimTime temporal_ms = 10000;
    SimTime sample_ms = 100;
};

/// Trajectory sampled on the absolute grid k * sample_ms within its ETA span.
struct SampledTrack {
    SimTime first = 0;  // time of samples[0]
    SimTime step = 100;
    std::vector<Vec3> samples;
};

SampledTrack sample(const std::vector<Waypoint>& route, SimTime step);

/// Two routes conflict iff some sample pair lies within the temporal minimum
/// and is closer than both the horizontal and the vertical minimum.
bool routes_conflict(const std::vector<Waypoint>& a, const std::vector<Waypoint>& b,
                     const SeparationMinima& minima);
bool tracks_conflict(const SampledTrack& a, const SampledTrack& b, const SeparationMinima& minima);

}  // namespace vertisim::uspace
