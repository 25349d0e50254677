#include "vertisim/fleet/fleet_manager.hpp"

#include <algorithm>
#include <cmath>

#include "vertisim/fleet/deconflict.hpp"

namespace vertisim::fleet {

using nlohmann::json;

std::string_view to_string(FlightState s) {
    switch (s) {
        case FlightState::Planned: return "Planned";
        case FlightState::Filed: return "Filed";
        case FlightState::Approved: return "Approved";
        case FlightState::Active: return "Active";
        case FlightState::Rerouting: return "Rerouting";
        case FlightState::Landed: return "Landed";
        case FlightState::Cancelled: return "Cancelled";
    }
    return "?";
}

FleetManager::FleetManager(FleetConfig config, WorldMap world, std::vector<FlightSpec> flights, EventSink& events)
    : config_(std::move(config)), world_(std::move(world)), events_(events) {
    for (auto& spec : flights) {
        FleetFlight f;
        f.target = spec.destination;
        f.spec = std::move(spec);
        flights_.push_back(std::move(f));
    }
}

Outbox FleetManager::take_outbox() { return std::exchange(outbox_, {}); }

FleetFlight* FleetManager::find(const std::string& callsign) {
    for (auto& f : flights_) {
        if (f.spec.callsign == callsign) return &f;
    }
    return nullptr;
}

const FleetFlight* FleetManager::flight(const std::string& callsign) const {
    return const_cast<FleetManager*>(this)->find(callsign);
}

bool FleetManager::all_terminal() const {
    return std::all_of(flights_.begin(), flights_.end(), [](const FleetFlight& f) {
        return f.state == FlightState::Landed || f.state == FlightState::Cancelled ||
               (f.state == FlightState::Planned && !f.reason.empty());
    });
}

std::optional<PadStatus> FleetManager::known_status(const PadRef& ref) const {
    const auto it = pad_status_.find(ref);
    if (it == pad_status_.end()) return std::nullopt;
    return it->second;
}

SimTime FleetManager::departure_after(SimTime now) const {
    const SimTime t = now + config_.departure_lead_ms;
    return (t + 999) / 1000 * 1000;
}

Vec3 FleetManager::current_position(const FleetFlight& f) const { return f.last_position.value_or(f.spec.start); }

FlightPlan FleetManager::make_plan(const FleetFlight& f, const PadRef& pad, std::vector<Waypoint> route) {
    FlightPlan p;
    p.callsign = f.spec.callsign;
    p.aircraft_type = f.spec.aircraft_type;
    p.priority = f.spec.priority;
    p.operation = Operation::ARR;
    p.origin = f.spec.origin_id;
    p.destination = pad.vertidrome;
    p.requested_pad = pad.pad;
    p.slot_start = route.back().eta - config_.slot_lead_ms;
    p.slot_end = p.slot_start + config_.slot_duration_ms;
    p.waypoints = std::move(route);
    p.request_id = config_.request_id_base + next_request_++;
    return p;
}

void FleetManager::start(SimTime now) {
    (void)now;
    for (const auto& f : flights_) {
        outbox_.push_back(outgoing(RegistrationRequest{config_.operator_id, f.spec.serial, f.spec.callsign}));
    }
}

void FleetManager::file(FleetFlight& f, FlightPlan plan, SimTime now, const char* event) {
    f.target = {plan.destination, plan.requested_pad};
    f.tried.insert(f.target);
    f.history.push_back(plan);
    json payload{{"callsign", plan.callsign},
                 {"request_id", plan.request_id},
                 {"vertidrome", plan.destination},
                 {"pad", plan.requested_pad},
                 {"departure", plan.waypoints.front().eta},
                 {"landing", plan.waypoints.back().eta},
                 {"slot_start", plan.slot_start},
                 {"slot_end", plan.slot_end}};
    if (plan.supersedes) payload["supersedes"] = *plan.supersedes;
    events_.record(now, config_.source, event, payload);
    outbox_.push_back(outgoing(plan));
    f.plan = std::move(plan);
    f.authorisation.reset();
}

void FleetManager::command(const FleetFlight& f, CommandKind kind, std::vector<Waypoint> route) {
    FleetCommand c{f.spec.callsign, kind, std::move(route)};
    outbox_.push_back(outgoing(c));
}

void FleetManager::cancel(FleetFlight& f, const std::string& reason, SimTime now) {
    if (f.plan) {
        outbox_.push_back(outgoing(FlightStatus{f.spec.callsign, f.plan->request_id, FlightStatusKind::Cancel}));
        outbox_.push_back(outgoing(SlotCancel{f.plan->destination, f.spec.callsign, f.plan->request_id}));
    }
    f.state = FlightState::Cancelled;
    f.reason = reason;
    events_.record(now, config_.source, "flight-cancelled", {{"callsign", f.spec.callsign}, {"reason", reason}});
}

void FleetManager::tick(SimTime now) {
    // file everything due, self-deconflicted against what is already in the air or approved
    std::vector<FleetFlight*> due;
    std::vector<FlightPlan> fresh, fixed;
    for (auto& f : flights_) {
        if (f.state == FlightState::Planned && f.registered && f.reason.empty() && !f.plan && f.spec.file_at <= now) {
            const auto* site = world_.pad(f.spec.destination);
            try {
                if (site == nullptr) throw PlanningError("unknown destination pad");
                fresh.push_back(make_plan(f, f.spec.destination,
                                          plan_route(f.spec.start, *site, departure_after(now), world_, config_.planner)));
                due.push_back(&f);
            } catch (const PlanningError& e) {
                f.state = FlightState::Cancelled;
                f.reason = e.what();
                events_.record(now, config_.source, "planning-failed", {{"callsign", f.spec.callsign}, {"reason", e.what()}});
            }
        } else if (f.plan && (f.state == FlightState::Filed || f.state == FlightState::Approved ||
                              f.state == FlightState::Active || f.state == FlightState::Rerouting)) {
            fixed.push_back(*f.plan);
        }
    }
    if (!fresh.empty()) {
        const auto delays = strategic_self_deconflict(fresh, config_.minima, fixed);
        for (std::size_t i = 0; i < due.size(); ++i) {
            if (delays[i] > 0) {
                events_.record(now, config_.source, "self-deconflicted",
                               {{"callsign", due[i]->spec.callsign}, {"delay_ms", delays[i]}});
            }
            due[i]->state = FlightState::Filed;
            file(*due[i], std::move(fresh[i]), now, "plan-filed");
        }
    }

    for (auto& f : flights_) {
        if (f.state == FlightState::Approved && f.plan && f.takeoff_sent < 0 && now >= f.plan->waypoints.front().eta) {
            // the plan goes Active on the first relayed position, not on the command
            command(f, CommandKind::UploadRoute, f.plan->waypoints);
            command(f, CommandKind::TakeOff);
            f.takeoff_sent = now;
            events_.record(now, config_.source, "takeoff-commanded",
                           {{"callsign", f.spec.callsign}, {"request_id", f.plan->request_id}});
        } else if (f.state == FlightState::Approved && !f.tracking && f.takeoff_sent >= 0 &&
                   now - f.takeoff_sent >= config_.takeoff_timeout_ms) {
            cancel(f, "no take-off", now);
        }
    }
}

void FleetManager::handle(const Envelope& env, SimTime now) {
    std::visit(
        [&](const auto& b) {
            using T = std::decay_t<decltype(b)>;
            if constexpr (std::is_same_v<T, RegistrationResponse>) {
                auto* f = find(b.callsign);
                if (f == nullptr || b.operator_id != config_.operator_id || f->registered) return;
                if (b.accepted) {
                    f->registered = true;
                    events_.record(now, config_.source, "fleet-registered",
                                   {{"callsign", b.callsign}, {"uas_id", b.uas_id}});
                } else {
                    f->state = FlightState::Cancelled;
                    f->reason = "registration rejected: " + b.reason;
                    events_.record(now, config_.source, "registration-failed",
                                   {{"callsign", b.callsign}, {"reason", b.reason}});
                }
            } else if constexpr (std::is_same_v<T, FlightAuthorisation>) {
                if (auto* f = find(b.callsign)) on_authorisation(*f, b, now);
            } else if constexpr (std::is_same_v<T, PositionReport>) {
                if (env.sender != "uspace") return;  // only the surveillance relay counts
                if (auto* f = find(b.callsign)) on_position(*f, b, now);
            } else if constexpr (std::is_same_v<T, PadStatusNotice>) {
                const PadRef ref{b.vertidrome, b.pad};
                pad_status_[ref] = b.status;
                if (b.status == PadStatus::CLOSED) on_closure(ref, now);
            } else if constexpr (std::is_same_v<T, SlotDisplaced>) {
                if (auto* f = find(b.callsign)) on_displaced(*f, b, now);
            } else if constexpr (std::is_same_v<T, AdherenceNotice>) {
                if (find(b.callsign) == nullptr) return;
                events_.record(now, config_.source, "adherence-notice",
                               {{"callsign", b.callsign}, {"monitor", b.monitor}, {"kind", to_string(b.kind)},
                                {"magnitude", b.magnitude}});
            } else if constexpr (std::is_same_v<T, HazardAdvisory>) {
                if (find(b.callsign) == nullptr) return;
                events_.record(now, config_.source, "hazard-advisory", {{"callsign", b.callsign}, {"detail", b.detail}});
            }
        },
        env.body);
}

void FleetManager::on_authorisation(FleetFlight& f, const FlightAuthorisation& auth, SimTime now) {
    if (!f.plan || f.plan->request_id != auth.request_id) return;
    const json payload{{"callsign", auth.callsign}, {"request_id", auth.request_id}, {"pad", auth.pad},
                       {"reason", auth.reason}};
    if (auth.verdict == AuthVerdict::Denied) {
        events_.record(now, config_.source, "flight-denied", payload);
        if (f.state == FlightState::Rerouting || f.plan->supersedes) {
            reroute(f, {}, now);
            return;
        }
        f.state = FlightState::Planned;
        f.reason = auth.reason.empty() ? "denied" : auth.reason;
        f.plan.reset();
        return;
    }

    if (auth.pad != f.plan->requested_pad) {
        // the vertidrome moved us to another pad: give the slot back and re-file for that pad
        events_.record(now, config_.source, "pad-reassigned", payload);
        const PadRef assigned{auth.vertidrome, auth.pad};
        outbox_.push_back(outgoing(SlotCancel{auth.vertidrome, f.spec.callsign, auth.request_id}));
        const auto* site = world_.pad(assigned);
        if (site == nullptr) return cancel(f, "assigned pad unknown", now);
        const bool airborne = f.state == FlightState::Rerouting;
        const SimTime planned = f.plan->waypoints.front().eta;
        const SimTime dep = !airborne && planned >= now + 1000 ? planned : departure_after(now);
        try {
            auto plan = make_plan(f, assigned, plan_route(airborne ? current_position(f) : f.spec.start, *site, dep,
                                                          world_, config_.planner));
            plan.supersedes = auth.request_id;
            file(f, std::move(plan), now, airborne ? "alternate-filed" : "plan-filed");
        } catch (const PlanningError& e) {
            cancel(f, e.what(), now);
        }
        return;
    }

    f.authorisation = auth;
    events_.record(now, config_.source, "flight-approved", payload);
    if (f.state == FlightState::Rerouting) {
        outbox_.push_back(outgoing(FlightStatus{f.spec.callsign, auth.request_id, FlightStatusKind::Activate}));
        command(f, CommandKind::UploadRoute, f.plan->waypoints);
        f.state = FlightState::Active;
        events_.record(now, config_.source, "route-uploaded",
                       {{"callsign", f.spec.callsign}, {"request_id", auth.request_id}, {"leg", f.leg}});
    } else {
        f.state = FlightState::Approved;
    }
    if (f.release) {
        const auto old = std::find_if(f.history.begin(), f.history.end(),
                                      [&](const FlightPlan& h) { return h.request_id == *f.release; });
        if (old != f.history.end()) outbox_.push_back(outgoing(SlotCancel{old->destination, f.spec.callsign, *f.release}));
        events_.record(now, config_.source, "slot-released", {{"callsign", f.spec.callsign}, {"request_id", *f.release}});
        f.release.reset();
    }
}

void FleetManager::on_position(FleetFlight& f, const PositionReport& report, SimTime now) {
    f.last_position = report.position;
    if (f.state == FlightState::Approved && f.takeoff_sent >= 0 && f.plan) {
        outbox_.push_back(outgoing(FlightStatus{f.spec.callsign, f.plan->request_id, FlightStatusKind::Activate}));
        f.state = FlightState::Active;
    }
    if (f.state != FlightState::Active && f.state != FlightState::Rerouting) return;
    if (!f.tracking) {
        f.tracking = true;
        events_.record(now, config_.source, "tracking-fleet", {{"callsign", f.spec.callsign}});
    }
    if (f.state != FlightState::Active || !f.plan) return;
    const auto* site = world_.pad(f.target);
    if (site == nullptr) return;
    if (horizontal_distance(report.position, site->center) > config_.landed_radius_m ||
        std::abs(report.position.up - site->center.up) > 0.5) {
        return;
    }
    f.state = FlightState::Landed;
    const bool within = f.authorisation && report.timestamp >= f.authorisation->slot_start &&
                        report.timestamp <= f.authorisation->slot_end;
    const char* kind = f.leg > 0 ? "landed-at-alternate" : within ? "landed-within-slot" : "landed-outside-slot";
    events_.record(now, config_.source, kind,
                   {{"callsign", f.spec.callsign},
                    {"vertidrome", f.target.vertidrome},
                    {"pad", f.target.pad},
                    {"time", report.timestamp},
                    {"within_slot", within},
                    {"east", report.position.east},
                    {"north", report.position.north}});
    outbox_.push_back(outgoing(FlightStatus{f.spec.callsign, f.plan->request_id, FlightStatusKind::Conclude}));
}

void FleetManager::on_closure(const PadRef& ref, SimTime now) {
    for (auto& f : flights_) {
        if (f.target != ref || !f.plan) continue;
        if (f.state != FlightState::Approved && f.state != FlightState::Active) continue;
        events_.record(now, config_.source, "closure-received-by-fleet",
                       {{"callsign", f.spec.callsign}, {"vertidrome", ref.vertidrome}, {"pad", ref.pad}});
        reroute(f, {}, now);
    }
}

void FleetManager::on_displaced(FleetFlight& f, const SlotDisplaced& d, SimTime now) {
    if (!f.plan || f.plan->request_id != d.request_id) return;
    if (f.state != FlightState::Approved && f.state != FlightState::Active) return;
    events_.record(now, config_.source, "slot-displaced-received",
                   {{"callsign", f.spec.callsign}, {"request_id", d.request_id}, {"reason", d.reason}});
    const PadRef ref{d.vertidrome, d.pad};
    if (known_status(ref) == PadStatus::CLOSED || d.reason == "pad closed") {
        pad_status_[ref] = PadStatus::CLOSED;
        return on_closure(ref, now);
    }
    // slot lost to a higher priority user: try the same vertidrome again first
    f.tried.erase(ref);
    reroute(f, {ref}, now);
}

void FleetManager::reroute(FleetFlight& f, std::vector<PadRef> candidates, SimTime now) {
    const bool airborne = f.state == FlightState::Active || f.state == FlightState::Rerouting ||
                          (f.state == FlightState::Approved && f.takeoff_sent >= 0);
    if (f.state == FlightState::Active) command(f, CommandKind::Hold);
    if (f.plan && (f.state == FlightState::Active || f.state == FlightState::Approved)) f.release = f.plan->request_id;

    for (const auto& alt : f.spec.alternates) candidates.push_back(alt);
    for (const auto& ref : candidates) {
        if (f.tried.contains(ref) || known_status(ref) == PadStatus::CLOSED) continue;
        const auto* site = world_.pad(ref);
        if (site == nullptr) continue;
        try {
            auto plan = make_plan(f, ref, plan_route(airborne ? current_position(f) : f.spec.start, *site,
                                                     departure_after(now), world_, config_.planner));
            plan.supersedes = f.release.value_or(f.plan ? f.plan->request_id : 0);
            ++f.leg;
            f.state = airborne ? FlightState::Rerouting : FlightState::Filed;
            file(f, std::move(plan), now, "alternate-filed");
            return;
        } catch (const PlanningError& e) {
            events_.record(now, config_.source, "planning-failed",
                           {{"callsign", f.spec.callsign}, {"pad", ref.pad}, {"reason", e.what()}});
        }
    }

    if (!airborne) return cancel(f, "no alternate", now);
    // holding with nowhere to go
    f.state = FlightState::Active;
    f.distress = true;
    EmergencyReport e{EmergencyKind::VehicleDistress, f.spec.destination.vertidrome, std::nullopt, f.spec.callsign,
                      "no alternate vertidrome available"};
    outbox_.push_back(outgoing(e));
    events_.record(now, config_.source, "distress-declared",
                   {{"callsign", f.spec.callsign}, {"vertidrome", e.vertidrome}});
}

}  // namespace vertisim::fleet
