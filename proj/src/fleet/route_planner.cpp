#include "vertisim/fleet/route_planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

namespace vertisim::fleet {

namespace {

double dist2(Point2 a, Point2 b) { return std::hypot(a.east - b.east, a.north - b.north); }

class Lattice {
public:
    Lattice(Point2 from, Point2 to, const WorldMap& world, const PlannerParams& p) : world_(world), p_(p) {
        double min_e = std::min(from.east, to.east), max_e = std::max(from.east, to.east);
        double min_n = std::min(from.north, to.north), max_n = std::max(from.north, to.north);
        for (const auto& g : world.geofences()) {
            for (const auto& v : g.polygon) {
                min_e = std::min(min_e, v.east);
                max_e = std::max(max_e, v.east);
                min_n = std::min(min_n, v.north);
                max_n = std::max(max_n, v.north);
            }
        }
        origin_ = {min_e - p.margin_m, min_n - p.margin_m};
        nx_ = static_cast<int>(std::ceil((max_e - min_e + 2 * p.margin_m) / p.grid_m)) + 1;
        ny_ = static_cast<int>(std::ceil((max_n - min_n + 2 * p.margin_m) / p.grid_m)) + 1;
        blocked_.assign(static_cast<std::size_t>(nx_) * static_cast<std::size_t>(ny_), 0);
        for (int j = 0; j < ny_; ++j) {
            for (int i = 0; i < nx_; ++i) {
                const Point2 c = at(i, j);
                blocked_[index(i, j)] = world.inside_geofence(c) || world.clearance(c) < p.clearance_m;
            }
        }
    }

    std::size_t index(int i, int j) const { return static_cast<std::size_t>(j) * static_cast<std::size_t>(nx_) + i; }
    Point2 at(int i, int j) const { return {origin_.east + i * p_.grid_m, origin_.north + j * p_.grid_m}; }
    std::pair<int, int> nearest(Point2 p) const {
        return {std::clamp(static_cast<int>(std::lround((p.east - origin_.east) / p_.grid_m)), 0, nx_ - 1),
                std::clamp(static_cast<int>(std::lround((p.north - origin_.north) / p_.grid_m)), 0, ny_ - 1)};
    }
    bool free(int i, int j) const { return i >= 0 && j >= 0 && i < nx_ && j < ny_ && !blocked_[index(i, j)]; }
    void open(int i, int j) { blocked_[index(i, j)] = 0; }
    int nx() const { return nx_; }
    int ny() const { return ny_; }

private:
    const WorldMap& world_;
    const PlannerParams& p_;
    Point2 origin_;
    int nx_ = 0, ny_ = 0;
    std::vector<char> blocked_;
};

std::vector<Point2> astar(Lattice& grid, Point2 from, Point2 to, double step) {
    const auto [si, sj] = grid.nearest(from);
    const auto [gi, gj] = grid.nearest(to);
    grid.open(si, sj);
    grid.open(gi, gj);

    const auto h = [&](int i, int j) {
        const double dx = std::abs(i - gi), dy = std::abs(j - gj);
        return step * (std::max(dx, dy) + (std::numbers::sqrt2 - 1.0) * std::min(dx, dy));
    };
    const std::size_t n = static_cast<std::size_t>(grid.nx()) * static_cast<std::size_t>(grid.ny());
    std::vector<double> g(n, std::numeric_limits<double>::infinity());
    std::vector<std::int64_t> parent(n, -1);
    std::vector<char> closed(n, 0);
    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> open;
    const auto start = grid.index(si, sj), goal = grid.index(gi, gj);
    g[start] = 0;
    open.push({h(si, sj), start});
    static constexpr int kDi[] = {1, -1, 0, 0, 1, 1, -1, -1};
    static constexpr int kDj[] = {0, 0, 1, -1, 1, -1, 1, -1};
    while (!open.empty()) {
        const auto [f, cur] = open.top();
        open.pop();
        if (closed[cur]) continue;
        closed[cur] = 1;
        if (cur == goal) break;
        const int ci = static_cast<int>(cur % static_cast<std::size_t>(grid.nx()));
        const int cj = static_cast<int>(cur / static_cast<std::size_t>(grid.nx()));
        for (int k = 0; k < 8; ++k) {
            const int ni = ci + kDi[k], nj = cj + kDj[k];
            if (!grid.free(ni, nj)) continue;
            if (k >= 4 && (!grid.free(ci + kDi[k], cj) || !grid.free(ci, cj + kDj[k]))) continue;  // no corner cutting
            const auto nidx = grid.index(ni, nj);
            const double ng = g[cur] + (k >= 4 ? std::numbers::sqrt2 : 1.0) * step;
            if (ng < g[nidx]) {
                g[nidx] = ng;
                parent[nidx] = static_cast<std::int64_t>(cur);
                open.push({ng + h(ni, nj), nidx});
            }
        }
    }
    if (!closed[goal]) throw PlanningError("no path on the planning grid");

    std::vector<Point2> cells;
    for (auto c = static_cast<std::int64_t>(goal); c != -1; c = parent[static_cast<std::size_t>(c)]) {
        const auto idx = static_cast<std::size_t>(c);
        cells.push_back(grid.at(static_cast<int>(idx % static_cast<std::size_t>(grid.nx())),
                                static_cast<int>(idx / static_cast<std::size_t>(grid.nx()))));
    }
    std::reverse(cells.begin(), cells.end());
    std::vector<Point2> path{from};
    path.insert(path.end(), cells.begin(), cells.end());
    path.push_back(to);
    return path;
}

}  // namespace

std::vector<Point2> plan_horizontal(Point2 from, Point2 to, const WorldMap& world, const PlannerParams& params) {
    if (world.inside_geofence(from)) throw PlanningError("origin inside a geofence");
    if (world.inside_geofence(to)) throw PlanningError("destination inside a geofence");

    // endpoints may sit closer to a fence than the clearance; only require they stay outside there
    const double relax = params.clearance_m + 1.5 * params.grid_m;
    const auto clear = [&](Point2 a, Point2 b) {
        const double len = dist2(a, b);
        const int n = std::max(1, static_cast<int>(std::ceil(len / 0.25)));
        for (int k = 0; k <= n; ++k) {
            const double t = static_cast<double>(k) / n;
            const Point2 p{a.east + (b.east - a.east) * t, a.north + (b.north - a.north) * t};
            if (world.inside_geofence(p)) return false;
            if (dist2(p, from) > relax && dist2(p, to) > relax && world.clearance(p) < params.clearance_m - 1e-9) {
                return false;
            }
        }
        return true;
    };
    if (clear(from, to)) return {from, to};

    Lattice grid(from, to, world, params);
    const auto raw = astar(grid, from, to, params.grid_m);

    std::vector<Point2> out{raw.front()};
    std::size_t i = 0;
    while (i + 1 < raw.size()) {
        std::size_t j = raw.size() - 1;
        while (j > i + 1 && !clear(raw[i], raw[j])) --j;
        out.push_back(raw[j]);
        i = j;
    }
    return out;
}

std::vector<Waypoint> plan_route(const Vec3& origin, const PadSite& destination, SimTime departure,
                                 const WorldMap& world, const PlannerParams& params) {
    if (params.cruise_speed_mps <= 0 || params.climb_rate_mps <= 0) throw PlanningError("non-positive speed");
    const Point2 from{origin.east, origin.north};
    const Point2 pad{destination.center.east, destination.center.north};
    const double alt = params.cruise_altitude_m;
    if (alt <= destination.center.up) throw PlanningError("cruise altitude below the destination pad");

    std::vector<Point2> horizontal;
    if (destination.arc && dist2(from, pad) > destination.arc->radius_m) {
        const double b = destination.arc->clamp(bearing_deg(pad, from)) * std::numbers::pi / 180.0;
        const Point2 entry{pad.east + destination.arc->radius_m * std::sin(b),
                           pad.north + destination.arc->radius_m * std::cos(b)};
        horizontal = plan_horizontal(from, entry, world, params);
        if (world.inside_geofence({(entry.east + pad.east) / 2, (entry.north + pad.north) / 2})) {
            throw PlanningError("approach arc blocked by a geofence");
        }
        // drop the entry point when it is collinear with the final leg
        const Point2 prev = horizontal.size() >= 2 ? horizontal[horizontal.size() - 2] : from;
        const double c = (entry.east - prev.east) * (pad.north - prev.north) -
                         (entry.north - prev.north) * (pad.east - prev.east);
        if (horizontal.size() >= 2 && std::abs(c) < 1e-6 * std::max(1.0, dist2(prev, pad))) horizontal.pop_back();
        horizontal.push_back(pad);
    } else {
        horizontal = plan_horizontal(from, pad, world, params);
    }

    std::vector<Waypoint> route{{origin, departure}};
    double elapsed = 0.0;  // seconds since departure
    const auto add = [&](Vec3 p, double seconds) {
        if (seconds <= 0.0) return;
        elapsed += seconds;
        route.push_back({p, departure + static_cast<SimTime>(std::llround(elapsed * 1000.0))});
    };
    add({from.east, from.north, alt}, std::abs(alt - origin.up) / params.climb_rate_mps);
    for (std::size_t k = 1; k < horizontal.size(); ++k) {
        add({horizontal[k].east, horizontal[k].north, alt}, dist2(horizontal[k - 1], horizontal[k]) / params.cruise_speed_mps);
    }
    add(destination.center, (alt - destination.center.up) / params.climb_rate_mps);
    return route;
}

}  // namespace vertisim::fleet
