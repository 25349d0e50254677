#include "vertisim/fleet/deconflict.hpp"

#include <algorithm>

namespace vertisim::fleet {

FlightPlan shifted(const FlightPlan& plan, SimTime delay) {
    FlightPlan p = plan;
    for (auto& w : p.waypoints) w.eta += delay;
    p.slot_start += delay;
    p.slot_end += delay;
    return p;
}

std::vector<SimTime> strategic_self_deconflict(std::vector<FlightPlan>& plans, const uspace::SeparationMinima& minima,
                                               const std::vector<FlightPlan>& fixed) {
    const SimTime step = std::max<SimTime>(minima.temporal_ms, minima.sample_ms);
    std::vector<uspace::SampledTrack> settled;
    for (const auto& f : fixed) settled.push_back(uspace::sample(f.waypoints, minima.sample_ms));

    std::vector<SimTime> delays;
    for (auto& plan : plans) {
        SimTime delay = 0;
        auto track = uspace::sample(plan.waypoints, minima.sample_ms);
        // terminates: once later than every settled track's end plus the window nothing overlaps
        while (std::any_of(settled.begin(), settled.end(),
                           [&](const auto& s) { return uspace::tracks_conflict(track, s, minima); })) {
            delay += step;
            track = uspace::sample(shifted(plan, delay).waypoints, minima.sample_ms);
        }
        plan = shifted(plan, delay);
        settled.push_back(std::move(track));
        delays.push_back(delay);
    }
    return delays;
}

}  // namespace vertisim::fleet
