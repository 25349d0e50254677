#include "vertisim/sim/vehicle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vertisim::sim {

using nlohmann::json;

std::string_view to_string(VehicleMode m) {
    switch (m) {
        case VehicleMode::Parked: return "Parked";
        case VehicleMode::TakingOff: return "TakingOff";
        case VehicleMode::Enroute: return "Enroute";
        case VehicleMode::Approach: return "Approach";
        case VehicleMode::Landing: return "Landing";
        case VehicleMode::Landed: return "Landed";
        case VehicleMode::Holding: return "Holding";
    }
    return "?";
}

Vehicle::Vehicle(VehicleSetup setup, EventSink& events)
    : setup_(std::move(setup)), events_(events), position_(setup_.start) {}

Outbox Vehicle::take_outbox() { return std::exchange(outbox_, {}); }

std::string Vehicle::leg_label() const { return leg_ == 0 ? "primary" : "alternate-" + std::to_string(leg_); }

void Vehicle::reject(const FleetCommand& cmd, const std::string& reason, SimTime now) {
    events_.record(now, setup_.callsign, "command-rejected",
                   {{"command", to_string(cmd.command)}, {"mode", to_string(mode_)}, {"reason", reason}});
}

bool Vehicle::handle_command(const FleetCommand& cmd, SimTime now) {
    if (cmd.callsign != setup_.callsign) return false;
    advance(now);
    switch (cmd.command) {
        case CommandKind::TakeOff:
            if (mode_ != VehicleMode::Parked) return reject(cmd, "not parked", now), false;
            if (route_.empty()) return reject(cmd, "no route", now), false;
            if (wind_mps_ > setup_.profile.max_wind_mps) {
                events_.record(now, setup_.callsign, "takeoff-refused",
                               {{"wind_mps", wind_mps_}, {"max_wind_mps", setup_.profile.max_wind_mps}});
                return false;
            }
            mode_ = VehicleMode::TakingOff;
            flight_ms_ = 0;
            endurance_declared_ = false;
            events_.record(now, setup_.callsign, "takeoff", {{"wind_mps", wind_mps_}, {"leg", leg_label()}});
            return true;
        case CommandKind::UploadRoute: {
            if (mode_ == VehicleMode::Landed) return reject(cmd, "landed", now), false;
            if (cmd.waypoints.size() < 2) return reject(cmd, "route too short", now), false;
            for (std::size_t i = 1; i < cmd.waypoints.size(); ++i) {
                if (cmd.waypoints[i].eta <= cmd.waypoints[i - 1].eta) return reject(cmd, "ETAs not increasing", now), false;
            }
            if (airborne()) {
                ++leg_;
                if (mode_ == VehicleMode::Holding) mode_ = VehicleMode::Enroute;
            }
            route_ = cmd.waypoints;
            events_.record(now, setup_.callsign, "route-received",
                           {{"leg", leg_label()}, {"waypoints", route_.size()}, {"landing", route_.back().eta}});
            update_mode(now);
            return true;
        }
        case CommandKind::Land:
            if (!airborne()) return reject(cmd, "not airborne", now), false;
            if (!cmd.pad_position) return reject(cmd, "no pad position", now), false;
            land_at(*cmd.pad_position, now);
            return true;
        case CommandKind::Hold:
            if (!airborne()) return reject(cmd, "not airborne", now), false;
            mode_ = VehicleMode::Holding;
            ground_speed_ = 0.0;
            events_.record(now, setup_.callsign, "holding",
                           {{"east", position_.east}, {"north", position_.north}, {"up", position_.up}});
            return true;
    }
    return false;
}

void Vehicle::land_at(const Vec3& pad, SimTime now) {
    std::vector<Waypoint> r{{position_, now}};
    double t = 0.0;
    const double hd = horizontal_distance(position_, pad);
    if (hd > 0) {
        t += hd / setup_.profile.cruise_speed_mps;
        r.push_back({{pad.east, pad.north, position_.up}, now + static_cast<SimTime>(std::llround(t * 1000))});
    }
    const double dz = std::abs(position_.up - pad.up);
    t += std::max(dz / setup_.profile.climb_rate_mps, 0.001);
    r.push_back({pad, now + static_cast<SimTime>(std::llround(t * 1000))});
    route_ = std::move(r);
    ++leg_;
    mode_ = VehicleMode::Approach;
    events_.record(now, setup_.callsign, "landing-diversion", {{"east", pad.east}, {"north", pad.north}, {"leg", leg_label()}});
}

void Vehicle::advance(SimTime now) {
    const auto period = static_cast<SimTime>(std::llround(1000.0 / setup_.profile.report_rate_hz));
    while (now_ < now) {
        SimTime next = now;
        if (airborne()) {
            next = std::min(now, (now_ / period + 1) * period);
            if (mode_ != VehicleMode::Holding) {
                // stop on waypoint ETAs so touchdown is stamped when it happens
                const auto wp = std::find_if(route_.begin(), route_.end(), [&](const Waypoint& w) { return w.eta > now_; });
                if (wp != route_.end()) next = std::min(next, wp->eta);
            }
        }
        const bool was_airborne = airborne();
        move(now_, next);
        now_ = next;
        if (was_airborne && now_ % period == 0) report(now_);
    }
}

void Vehicle::move(SimTime t0, SimTime t1) {
    if (!airborne() || t1 <= t0) return;
    const double dt = static_cast<double>(t1 - t0) / 1000.0;
    flight_ms_ += t1 - t0;

    Vec3 target = position_;
    if (mode_ != VehicleMode::Holding && !route_.empty()) target = position_at(route_, t1);
    Vec3 d = target - position_;
    const double vcap = setup_.profile.climb_rate_mps * dt, cap = setup_.profile.cruise_speed_mps * dt;
    constexpr double kSlack = 1e-12;  // absorbs rounding when the plan runs at exactly the limit
    if (std::abs(d.up) <= vcap + kSlack && norm(d) <= cap + kSlack) {
        position_ = target;
    } else {
        d.up = std::clamp(d.up, -vcap, vcap);
        const double n = norm(d);
        if (n > cap) d = d * (cap / n);
        position_ = position_ + d;
    }
    ground_speed_ = std::hypot(d.east, d.north) / dt;
    update_mode(t1);

    if (!endurance_declared_ && airborne() &&
        static_cast<double>(flight_ms_) >= setup_.profile.endurance_min * 60000.0) {
        endurance_declared_ = true;
        const KnownPad* nearest = nullptr;
        double best = std::numeric_limits<double>::infinity();
        for (const auto& p : setup_.pads) {
            const double dd = horizontal_distance(position_, p.center);
            if (dd < best) best = dd, nearest = &p;
        }
        EmergencyReport e{EmergencyKind::VehicleDistress, nearest ? nearest->vertidrome : "",
                          nearest ? std::optional(nearest->pad) : std::nullopt, setup_.callsign, "endurance exceeded"};
        outbox_.push_back(outgoing(e));
        events_.record(t1, setup_.callsign, "endurance-exceeded", {{"flight_time_ms", flight_ms_}});
        if (nearest) land_at(nearest->center, t1);
    }
}

void Vehicle::update_mode(SimTime t) {
    if (mode_ == VehicleMode::Parked || mode_ == VehicleMode::Landed || mode_ == VehicleMode::Holding) return;
    if (route_.size() < 2) return;
    const auto& fin = route_.back();
    const auto& before = route_[route_.size() - 2];
    const double hd = horizontal_distance(position_, fin.position);
    if (t >= before.eta && hd <= setup_.capture_radius_m && position_.up - fin.position.up <= 0.01) {
        mode_ = VehicleMode::Landed;
        ground_speed_ = 0.0;
        events_.record(t, setup_.callsign, "touchdown",
                       {{"east", position_.east}, {"north", position_.north}, {"leg", leg_label()},
                        {"flight_time_ms", flight_ms_}});
        report(t);
        return;
    }
    if (hd <= setup_.approach_radius_m) {
        mode_ = t >= before.eta ? VehicleMode::Landing : VehicleMode::Approach;
    } else if (leg_ == 0 && t < route_[1].eta && route_[1].position.up > route_[0].position.up) {
        mode_ = VehicleMode::TakingOff;
    } else {
        mode_ = VehicleMode::Enroute;
    }
}

void Vehicle::report(SimTime t) {
    if (last_report_ >= t) return;
    last_report_ = t;
    outbox_.push_back(outgoing(PositionReport{setup_.callsign, position_, ground_speed_, t}));
}

EmergencyReport scripted_detection(const Detection& d, EventSink& events) {
    json payload{{"kind", to_string(d.kind)}, {"vertidrome", d.vertidrome}, {"detail", d.detail}};
    if (d.pad) payload["pad"] = *d.pad;
    events.record(d.at, d.reporter, d.kind == EmergencyKind::PersonOnPad ? "person-detected" : "object-detected",
                  payload);
    return {d.kind, d.vertidrome, d.pad, d.reporter, d.detail};
}

}  // namespace vertisim::sim
