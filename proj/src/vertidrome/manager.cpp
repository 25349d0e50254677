#include "vertisim/vertidrome/manager.hpp"

#include <algorithm>

#include "vertisim/vertidrome/forecast.hpp"

namespace vertisim::vertidrome {

using nlohmann::json;

namespace {

constexpr double kOnGround = 0.5;  // m above pad elevation
constexpr std::size_t kAlertHistory = 50;

}  // namespace

VertidromeManager::VertidromeManager(VertidromeConfig config, EventSink& events)
    : config_(std::move(config)), events_(events), pads_(config_.pads) {
    std::sort(pads_.begin(), pads_.end(), [](const Pad& a, const Pad& b) { return a.id < b.id; });
}

Outbox VertidromeManager::take_outbox() { return std::exchange(outbox_, {}); }

const Pad* VertidromeManager::pad(const std::string& id) const {
    for (const auto& p : pads_) {
        if (p.id == id) return &p;
    }
    return nullptr;
}

Pad* VertidromeManager::mutable_pad(const std::string& id) { return const_cast<Pad*>(std::as_const(*this).pad(id)); }

OperationalConstraintSet VertidromeManager::constraints(SimTime now) const {
    OperationalConstraintSet c;
    const auto usability = evaluate_weather(weather_, config_.weather);
    c.extension_factor = usability.extension_factor;
    if (!usability.usable) c.weather_reason = "weather";
    c.hazards = hazards_;
    for (const auto& p : pads_) {
        c.pads[p.id] = PadConstraint{!p.closed_at(now) && !hazards_.contains(p.id), p.mode(now)};
        for (const auto& o : p.close_orders) {
            if (o.end > now) c.closures[p.id].emplace_back(o.start, o.end);
        }
    }
    return c;
}

void VertidromeManager::alert(SimTime now, std::string kind, std::string text) {
    alerts_.push_back({next_id_++, now, std::move(kind), std::move(text)});
    if (alerts_.size() > kAlertHistory) alerts_.erase(alerts_.begin());
}

void VertidromeManager::start(SimTime now) {
    for (const auto& p : pads_) {
        published_status_[p.id] = {p.status(now), p.mode(now)};
        outbox_.push_back(outgoing(PadStatusNotice{config_.id, p.id, p.status(now), p.mode(now), p.cause(now)}));
    }
    finish(now);
}

void VertidromeManager::handle(const Envelope& env, SimTime now) {
    switch (env.type) {
        case MessageType::LandRequest:
        case MessageType::DepartRequest: on_request(env, now); break;
        case MessageType::SlotCancel:
            if (env.as<SlotCancel>().vertidrome == config_.id) on_slot_cancel(env.as<SlotCancel>(), now);
            break;
        case MessageType::EmsDemand:
            if (env.as<EmsDemand>().vertidrome == config_.id) on_ems(env.as<EmsDemand>(), now);
            break;
        case MessageType::PositionReport:
            if (env.sender == "uspace") on_position(env.as<PositionReport>(), now);
            break;
        case MessageType::AdherenceNotice: {
            const auto& n = env.as<AdherenceNotice>();
            if (n.monitor != config_.id && schedule_.live_for(n.callsign)) {
                alert(now, "adherence", "U-space: " + n.callsign + " " + std::string(to_string(n.kind)) + " deviation");
            }
            break;
        }
        case MessageType::EmergencyReport:
            if (env.as<EmergencyReport>().vertidrome == config_.id) on_emergency(env.as<EmergencyReport>(), now);
            break;
        case MessageType::WeatherReport:
            if (env.as<WeatherReport>().vertidrome == config_.id) on_weather(env.as<WeatherReport>(), now);
            break;
        case MessageType::GfmuPreference: {
            const auto& g = env.as<GfmuPreference>();
            if (g.vertidrome != config_.id) break;
            if (pad(g.pad) != nullptr) {
                gfmu_ = g.pad;
            } else if (g.pad.empty()) {
                gfmu_.reset();
            }
            events_.record(now, config_.id, "gfmu-preference", {{"pad", g.pad}});
            break;
        }
        case MessageType::InfrastructureHealth: {
            const auto& h = env.as<InfrastructureHealth>();
            if (h.vertidrome != config_.id) break;
            if (pad(h.component) != nullptr) {
                if (h.healthy) {
                    hazards_.erase(h.component);
                } else {
                    hazards_.insert(h.component);
                }
            }
            events_.record(now, config_.id, "infrastructure-health",
                           {{"component", h.component}, {"healthy", h.healthy}, {"detail", h.detail}});
            alert(now, "infrastructure", h.component + (h.healthy ? " healthy" : " unhealthy: " + h.detail));
            break;
        }
        default: break;
    }
    finish(now);
}

void VertidromeManager::tick(SimTime now) { finish(now); }

void VertidromeManager::on_request(const Envelope& env, SimTime now) {
    const auto& plan = env.as<FlightPlan>();
    if (plan.vertidrome() != config_.id || plans_.contains(plan.request_id)) return;
    plans_[plan.request_id] = plan;
    events_.record(now, config_.id, "request-received",
                   {{"callsign", plan.callsign}, {"request_id", plan.request_id}, {"type", to_string(env.type)}});

    const auto decision = handle_flight_request(plan, config_.id, constraints(now), schedule_, gfmu_);
    if (decision.verdict == SlotVerdict::Accepted) forecast_dirty_ = true;
    if (config_.auto_ack) {
        publish_decision(decision, plan, now);
        return;
    }
    popups_.push_back(Popup{next_id_++, "FlightRequest", plan.request_id, plan.callsign, env.type, plan.requested_pad,
                            plan.slot_start, plan.slot_end, now});
    proposals_[plan.request_id] = decision;
    events_.record(now, config_.id, "vso-approval-pending", {{"callsign", plan.callsign}, {"request_id", plan.request_id}});
}

void VertidromeManager::publish_decision(const SlotDecision& d, const FlightPlan& plan, SimTime now) {
    outbox_.push_back(outgoing(d));
    json payload{{"callsign", d.callsign}, {"request_id", d.request_id}};
    if (d.verdict == SlotVerdict::Accepted) {
        payload["pad"] = d.pad;
        payload["slot_start"] = d.slot_start;
        payload["slot_end"] = d.slot_end;
        events_.record(now, config_.id, plan.supersedes ? "alternate-accepted" : "vertidrome-accepted", payload);
    } else {
        payload["reason"] = d.reason;
        events_.record(now, config_.id, "vertidrome-rejected", payload);
    }
}

void VertidromeManager::on_slot_cancel(const SlotCancel& cancel, SimTime now) {
    proposals_.erase(cancel.request_id);
    auto* slot = schedule_.find(cancel.request_id);
    if (slot == nullptr || !slot->blocking()) return;
    slot->state = SlotState::Cancelled;
    forecast_dirty_ = true;
    events_.record(now, config_.id, "slot-released",
                   {{"callsign", slot->callsign}, {"request_id", slot->request_id}, {"pad", slot->pad}});
}

void VertidromeManager::displaced(const std::vector<Slot>& slots, const std::string& reason, SimTime now) {
    for (const auto& s : slots) {
        outbox_.push_back(outgoing(SlotDisplaced{config_.id, s.callsign, s.request_id, s.pad, reason}));
        events_.record(now, config_.id, "slot-displaced",
                       {{"callsign", s.callsign}, {"request_id", s.request_id}, {"pad", s.pad}, {"reason", reason}});
        alert(now, "slot", s.callsign + " displaced from " + s.pad + ": " + reason);
        forecast_dirty_ = true;
    }
}

void VertidromeManager::on_ems(const EmsDemand& demand, SimTime now) {
    auto out = preempt_for_ems(demand, constraints(now), schedule_);
    outbox_.push_back(outgoing(out.confirmation));
    if (!out.accommodated) {
        events_.record(now, config_.id, "ems-unaccommodated", {{"demand_id", demand.demand_id}});
        alert(now, "ems", "EMS demand " + std::to_string(demand.demand_id) + " cannot be accommodated: no open pad");
        return;
    }
    forecast_dirty_ = true;
    events_.record(now, config_.id, "ems-accommodated",
                   {{"demand_id", demand.demand_id}, {"pad", out.confirmation.pad},
                    {"slot_start", out.confirmation.slot_start}, {"moved", out.confirmation.moved}});
    alert(now, "ems", "EMS slot on " + out.confirmation.pad + " for " + demand.callsign);
    displaced(out.displaced, "EMS demand", now);
}

void VertidromeManager::on_position(const PositionReport& r, SimTime now) {
    if (r.position.up - (pads_.empty() ? 0.0 : pads_.front().center.up) > kOnGround) {
        airborne_.insert(r.callsign);
    } else {
        airborne_.erase(r.callsign);
    }

    const Slot* live = schedule_.live_for(r.callsign);
    if (live != nullptr && tracked_.insert(r.callsign).second) {
        events_.record(now, config_.id, "tracking-vertidrome", {{"callsign", r.callsign}});
    }

    // sector row: against the slot pad, otherwise the nearest pad
    const Pad* view_pad = live ? pad(live->pad) : nullptr;
    if (view_pad == nullptr) {
        double best = 0.0;
        for (const auto& p : pads_) {
            const double d = horizontal_distance(p.center, r.position);
            if (view_pad == nullptr || d < best) {
                view_pad = &p;
                best = d;
            }
        }
    }
    std::optional<SectorTrack> track;
    if (view_pad != nullptr) track = sector_view(r, view_pad->id, view_pad->center, config_.sector);
    const bool was_inside = sector_.contains(r.callsign);
    if (track) {
        sector_[r.callsign] = *track;
        if (!was_inside) events_.record(now, config_.id, "sector-entry", {{"callsign", r.callsign}, {"pad", track->pad}});
    } else if (was_inside) {
        sector_.erase(r.callsign);
        events_.record(now, config_.id, "sector-exit", {{"callsign", r.callsign}});
    }

    if (live == nullptr) return;
    const std::int64_t request_id = live->request_id;
    const Pad* slot_pad = pad(live->pad);
    if (slot_pad == nullptr) return;
    const double above = r.position.up - slot_pad->center.up;
    const bool on_pad = horizontal_distance(r.position, slot_pad->center) <= config_.landed_radius_m &&
                        above <= kOnGround && r.ground_speed < 0.1;

    if (live->operation == Operation::ARR) {
        if (live->state == SlotState::Reserved && track) {
            schedule_.set_state(request_id, SlotState::InProgress);
            forecast_dirty_ = true;
            events_.record(now, config_.id, "slot-in-progress", {{"callsign", r.callsign}, {"pad", live->pad}});
        }
        if (on_pad) {
            const Slot s = *live;
            schedule_.set_state(request_id, SlotState::Completed);
            forecast_dirty_ = true;
            latch_.forget(r.callsign);
            events_.record(now, config_.id, "slot-completed",
                           {{"callsign", s.callsign},
                            {"pad", s.pad},
                            {"within_slot", s.start <= now && now <= s.end}});
            return;
        }
    } else {
        if (live->state == SlotState::Reserved && above > kOnGround) {
            schedule_.set_state(request_id, SlotState::InProgress);
            forecast_dirty_ = true;
        } else if (live->state == SlotState::InProgress && !track) {
            schedule_.set_state(request_id, SlotState::Completed);
            forecast_dirty_ = true;
            events_.record(now, config_.id, "slot-completed", {{"callsign", r.callsign}, {"pad", live->pad}});
            return;
        }
    }

    const auto plan = plans_.find(request_id);
    if (!track || plan == plans_.end()) return;
    const Slot* slot = schedule_.find(request_id);
    auto devs = local_adherence(r, plan->second, slot->end, config_.adherence, avoid_areas_);
    for (const auto& d : latch_.update(r.callsign, std::move(devs))) {
        outbox_.push_back(outgoing(AdherenceNotice{r.callsign, request_id, config_.id, d.kind, d.magnitude, r.timestamp}));
        json payload{{"callsign", r.callsign}, {"kind", to_string(d.kind)}, {"magnitude", d.magnitude}};
        if (!d.area.empty()) payload["area"] = d.area;
        events_.record(now, config_.id, "local-deviation", payload);
        if (d.kind != DeviationKind::Spatial || d.magnitude >= config_.deviation_alert_m) {
            alert(now, "adherence",
                  r.callsign + " " + std::string(to_string(d.kind)) + " deviation" + (d.area.empty() ? "" : " (" + d.area + ")"));
        }
    }
}

std::optional<std::string> VertidromeManager::apply_object_report(const std::string& pad_id, const EmergencyReport& r,
                                                                  SimTime now) {
    Pad* p = mutable_pad(pad_id);
    if (p == nullptr) return "unknown pad " + pad_id;
    p->objects.push_back({next_id_++, r.kind, r.reporter, r.detail, now});
    return std::nullopt;
}

void VertidromeManager::on_emergency(const EmergencyReport& r, SimTime now) {
    json payload{{"kind", to_string(r.kind)}, {"reporter", r.reporter}};
    if (r.pad) payload["pad"] = *r.pad;
    events_.record(now, config_.id, "emergency-received", payload);
    if (r.kind == EmergencyKind::VehicleDistress) {
        alert(now, "emergency", r.reporter + " in distress: " + r.detail);
        return;
    }
    if (r.pad && pad(*r.pad) != nullptr) {
        apply_object_report(*r.pad, r, now);
        alert(now, "emergency",
              std::string(r.kind == EmergencyKind::PersonOnPad ? "Person" : "Foreign object") + " on pad " +
                  pad(*r.pad)->label + " reported by " + r.reporter);
        return;
    }
    prompts_.push_back({next_id_++, r, now});
    events_.record(now, config_.id, "hazard-prompt", {{"prompt_id", prompts_.back().id}, {"pad", r.pad.value_or("")}});
    alert(now, "classify", "Hazard report for unknown pad " + r.pad.value_or("?") + ": classify");
}

void VertidromeManager::on_weather(const WeatherReport& w, SimTime now) {
    weather_.direction_deg = w.direction_deg;
    weather_.speed_mps = w.speed_mps;
    weather_.source = w.source;
    const auto u = evaluate_weather(weather_, config_.weather);
    const std::string band = !u.usable ? "limit" : u.extension_factor > 1.0 ? "caution" : "normal";
    if (band == weather_band_) return;
    weather_band_ = band;
    events_.record(now, config_.id, "weather-update", {{"speed_mps", w.speed_mps}, {"band", band}});
    if (w.speed_mps >= config_.wind_alert_mps) alert(now, "weather", "Wind " + weather_text(weather_) + " (" + band + ")");
}

void VertidromeManager::refresh_pads(SimTime now) {
    for (auto& p : pads_) {
        if (p.pending_mode) {
            bool compatible = true;
            for (const auto& s : schedule_.slots()) {
                if (s.pad == p.id && s.blocking() && !mode_allows(*p.pending_mode, s.operation)) compatible = false;
            }
            if (compatible) {
                p.configured_mode = *p.pending_mode;
                p.pending_mode.reset();
                events_.record(now, config_.id, "pad-mode", {{"pad", p.id}, {"mode", to_string(p.configured_mode)}});
            }
        }
        const std::pair<PadStatus, PadMode> state{p.status(now), p.mode(now)};
        auto& last = published_status_[p.id];
        if (last == state) continue;
        const bool closing = state.first == PadStatus::CLOSED && last.first != PadStatus::CLOSED;
        const bool clearing = state.first == PadStatus::CLEAR && last.first == PadStatus::CLOSED;
        last = state;
        outbox_.push_back(outgoing(PadStatusNotice{config_.id, p.id, state.first, state.second, p.cause(now)}));
        forecast_dirty_ = true;
        if (closing) {
            events_.record(now, config_.id, "pad-closed", {{"pad", p.id}, {"cause", to_string(p.cause(now))}});
            alert(now, "pad", "Pad " + p.label + " CLOSED (" + std::string(to_string(p.cause(now))) + ")");
            displaced(displace_reserved(schedule_, p.id), "pad closed", now);
        } else if (clearing) {
            events_.record(now, config_.id, "pad-cleared", {{"pad", p.id}});
            alert(now, "pad", "Pad " + p.label + " CLEAR");
        }
    }
}

void VertidromeManager::finish(SimTime now) {
    refresh_pads(now);
    const SimTime minute = now / kMinute;
    if (minute != forecast_minute_) {
        forecast_minute_ = minute;
        forecast_dirty_ = true;
    }
    if (!forecast_dirty_) return;
    forecast_dirty_ = false;
    std::vector<std::string> ids;
    for (const auto& p : pads_) ids.push_back(p.id);
    outbox_.push_back(outgoing(operational_forecast(config_.id, ids, schedule_, now,
                                                    [this](const std::string& cs) { return airborne(cs); })));
}

CommandResult VertidromeManager::command(const VsoCommand& c, SimTime now) {
    const auto result = [&]() -> CommandResult {
        switch (c.kind) {
            case VsoCommandKind::AcknowledgeRequest: {
                const auto it = std::find_if(popups_.begin(), popups_.end(),
                                             [&](const Popup& p) { return p.request_id == c.request_id; });
                if (it == popups_.end()) return {false, "no pending request " + std::to_string(c.request_id)};
                popups_.erase(it);
                return {};
            }
            case VsoCommandKind::ApproveFlight: {
                const auto it = proposals_.find(c.request_id);
                if (it == proposals_.end()) return {false, "nothing to approve for " + std::to_string(c.request_id)};
                auto decision = it->second;
                proposals_.erase(it);
                const auto& plan = plans_.at(c.request_id);
                const Slot* slot = schedule_.find(c.request_id);
                if (decision.verdict == SlotVerdict::Accepted && (slot == nullptr || slot->state != SlotState::Reserved)) {
                    decision = handle_flight_request(plan, config_.id, constraints(now), schedule_, gfmu_);
                    forecast_dirty_ = true;
                }
                publish_decision(decision, plan, now);
                return {};
            }
            case VsoCommandKind::CancelFlight: {
                auto* slot = schedule_.find(c.request_id);
                if (const auto it = proposals_.find(c.request_id); it != proposals_.end()) {
                    proposals_.erase(it);
                    if (slot != nullptr && slot->blocking()) slot->state = SlotState::Cancelled;
                    const auto& plan = plans_.at(c.request_id);
                    SlotDecision d{plan.request_id, plan.callsign, config_.id, SlotVerdict::Rejected};
                    d.reason = "cancelled by VSO";
                    publish_decision(d, plan, now);
                    forecast_dirty_ = true;
                    return {};
                }
                if (slot == nullptr || !slot->blocking()) return {false, "no active slot for " + std::to_string(c.request_id)};
                slot->state = SlotState::Cancelled;
                Slot copy = *slot;
                displaced({copy}, "cancelled by VSO", now);
                return {};
            }
            case VsoCommandKind::CreateCloseOrder: {
                Pad* p = mutable_pad(c.pad);
                if (p == nullptr) return {false, "unknown pad " + c.pad};
                const SimTime start = c.start.value_or(now);
                p->close_orders.push_back({next_id_++, start, start + c.duration_ms, c.cause});
                events_.record(now, config_.id, "close-order-created",
                               {{"pad", c.pad}, {"order_id", p->close_orders.back().id}, {"start", start},
                                {"end", start + c.duration_ms}});
                return {};
            }
            case VsoCommandKind::ClearCloseOrder: {
                bool found = false;
                for (auto& p : pads_) {
                    if (c.order_id != 0) {
                        found |= std::erase_if(p.close_orders, [&](const CloseOrder& o) { return o.id == c.order_id; }) > 0;
                    } else if (p.id == c.pad) {
                        found = true;
                        p.close_orders.clear();
                        p.objects.clear();
                    }
                }
                if (!found) return {false, c.order_id ? "unknown close order" : "unknown pad " + c.pad};
                events_.record(now, config_.id, "close-order-cleared", {{"order_id", c.order_id}, {"pad", c.pad}});
                return {};
            }
            case VsoCommandKind::ReassignSlot: {
                const Slot* slot = c.request_id ? schedule_.find(c.request_id) : schedule_.live_for(c.callsign);
                if (slot == nullptr || slot->state != SlotState::Reserved) return {false, "no reserved slot"};
                const Pad* target = pad(c.pad);
                if (target == nullptr) return {false, "unknown pad " + c.pad};
                const SimTime start = c.slot_start.value_or(slot->start), end = c.slot_end.value_or(slot->end);
                if (end <= start) return {false, "empty window"};
                const auto cons = constraints(now);
                if (!cons.pads.at(c.pad).usable) return {false, "pad " + c.pad + " unusable"};
                if (!mode_allows(cons.pads.at(c.pad).mode, slot->operation)) return {false, "pad mode forbids operation"};
                if (cons.closure_overlaps(c.pad, start, end)) return {false, "close order in window"};
                const auto id = slot->request_id;
                if (!schedule_.move(id, c.pad, start, end)) return {false, "window occupied"};
                const Slot& moved = *schedule_.find(id);
                outbox_.push_back(outgoing(SlotDecision{id, moved.callsign, config_.id, SlotVerdict::Accepted, moved.pad,
                                                        moved.start, moved.end, "reassigned by VSO"}));
                events_.record(now, config_.id, "slot-reassigned",
                               {{"callsign", moved.callsign}, {"pad", moved.pad}, {"slot_start", start}});
                forecast_dirty_ = true;
                return {};
            }
            case VsoCommandKind::SetAdherenceCriteria:
                config_.adherence = {c.spatial_m, c.temporal_s};
                return {};
            case VsoCommandKind::SetNotificationThresholds:
                if (c.wind_alert_mps) config_.wind_alert_mps = *c.wind_alert_mps;
                if (c.deviation_alert_m) config_.deviation_alert_m = *c.deviation_alert_m;
                return {};
            case VsoCommandKind::SetPadMode: {
                Pad* p = mutable_pad(c.pad);
                if (p == nullptr) return {false, "unknown pad " + c.pad};
                if (p->configured_mode == c.mode) {
                    p->pending_mode.reset();
                } else {
                    p->pending_mode = c.mode;
                }
                return {};
            }
            case VsoCommandKind::AddAvoidArea:
                std::erase_if(avoid_areas_, [&](const AvoidArea& a) { return a.id == c.area_id; });
                avoid_areas_.push_back({c.area_id, c.polygon});
                return {};
            case VsoCommandKind::RemoveAvoidArea:
                if (std::erase_if(avoid_areas_, [&](const AvoidArea& a) { return a.id == c.area_id; }) == 0)
                    return {false, "unknown area " + c.area_id};
                return {};
            case VsoCommandKind::ClassifyHazard: {
                const auto it = std::find_if(prompts_.begin(), prompts_.end(),
                                             [&](const HazardPrompt& p) { return p.id == c.prompt_id; });
                if (it == prompts_.end()) return {false, "unknown prompt"};
                if (!c.pad.empty()) {
                    if (auto err = apply_object_report(c.pad, it->report, now)) return {false, *err};
                }
                prompts_.erase(it);
                return {};
            }
        }
        return {false, "unsupported"};
    }();
    events_.record(now, config_.id, "vso-command",
                   {{"command", to_string(c.kind)}, {"ok", result.ok}, {"reason", result.reason}});
    finish(now);
    return result;
}

}  // namespace vertisim::vertidrome
