#include "vertisim/uspace/conflict.hpp"

#include <algorithm>
#include <limits>

namespace vertisim::uspace {

namespace {

SimTime ceil_to(SimTime t, SimTime step) {
    const SimTime q = t / step;
    const SimTime base = q * step;
    return base < t ? base + step : base;
}

SimTime floor_to(SimTime t, SimTime step) {
    const SimTime q = t / step;
    const SimTime base = q * step;
    return base > t ? base - step : base;
}

struct Block {
    std::size_t begin = 0, end = 0;  // sample index range
    double min_e, max_e, min_n, max_n, min_u, max_u;
};

constexpr std::size_t kBlock = 32;

std::vector<Block> blocks_of(const SampledTrack& t) {
    std::vector<Block> out;
    for (std::size_t b = 0; b < t.samples.size(); b += kBlock) {
        Block blk{b, std::min(b + kBlock, t.samples.size()),
                  std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
                  std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity(),
                  std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
        for (std::size_t i = blk.begin; i < blk.end; ++i) {
            const auto& p = t.samples[i];
            blk.min_e = std::min(blk.min_e, p.east);
            blk.max_e = std::max(blk.max_e, p.east);
            blk.min_n = std::min(blk.min_n, p.north);
            blk.max_n = std::max(blk.max_n, p.north);
            blk.min_u = std::min(blk.min_u, p.up);
            blk.max_u = std::max(blk.max_u, p.up);
        }
        out.push_back(blk);
    }
    return out;
}

double gap(double lo1, double hi1, double lo2, double hi2) { return std::max({0.0, lo2 - hi1, lo1 - hi2}); }

}  // namespace

SampledTrack sample(const std::vector<Waypoint>& route, SimTime step) {
    SampledTrack out;
    out.step = step;
    if (route.empty()) return out;
    out.first = ceil_to(route.front().eta, step);
    const SimTime last = floor_to(route.back().eta, step);
    for (SimTime t = out.first; t <= last; t += step) out.samples.push_back(position_at(route, t));
    return out;
}

bool tracks_conflict(const SampledTrack& a, const SampledTrack& b, const SeparationMinima& minima) {
    if (a.samples.empty() || b.samples.empty()) return false;
    const SimTime step = a.step;
    const auto time_a = [&](std::size_t i) { return a.first + static_cast<SimTime>(i) * step; };
    const auto time_b = [&](std::size_t j) { return b.first + static_cast<SimTime>(j) * step; };

    const auto ba = blocks_of(a);
    const auto bb = blocks_of(b);
    for (const auto& x : ba) {
        const SimTime xa0 = time_a(x.begin), xa1 = time_a(x.end - 1);
        for (const auto& y : bb) {
            const SimTime yb0 = time_b(y.begin), yb1 = time_b(y.end - 1);
            // Temporal gap between the blocks' time ranges.
            if (yb0 - xa1 > minima.temporal_ms || xa0 - yb1 > minima.temporal_ms) continue;
            const double h = std::hypot(gap(x.min_e, x.max_e, y.min_e, y.max_e), gap(x.min_n, x.max_n, y.min_n, y.max_n));
            if (h >= minima.horizontal_m) continue;
            if (gap(x.min_u, x.max_u, y.min_u, y.max_u) >= minima.vertical_m) continue;
            for (std::size_t i = x.begin; i < x.end; ++i) {
                const SimTime ti = time_a(i);
                for (std::size_t j = y.begin; j < y.end; ++j) {
                    const SimTime dt = time_b(j) - ti;
                    if (dt > minima.temporal_ms || -dt > minima.temporal_ms) continue;
                    const auto& p = a.samples[i];
                    const auto& q = b.samples[j];
                    if (std::abs(p.up - q.up) < minima.vertical_m && horizontal_distance(p, q) < minima.horizontal_m) {
                        return true;
                    }
                }
            }
        }
    }
    return false;
}

bool routes_conflict(const std::vector<Waypoint>& a, const std::vector<Waypoint>& b,
                     const SeparationMinima& minima) {
    return tracks_conflict(sample(a, minima.sample_ms), sample(b, minima.sample_ms), minima);
}

}  // namespace vertisim::uspace
