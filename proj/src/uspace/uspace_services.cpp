#include "vertisim/uspace/uspace_services.hpp"

namespace vertisim::uspace {

using nlohmann::json;

UspaceServices::UspaceServices(UspaceConfig config, EventSink& events)
    : config_(std::move(config)), events_(events), plans_(config_.minima), ems_(config_.vertidromes) {}

Outbox UspaceServices::take_outbox() { return std::exchange(outbox_, {}); }

void UspaceServices::handle(const Envelope& env, SimTime now) {
    if (env.sender == kUspaceId) return;
    switch (env.type) {
        case MessageType::RegistrationRequest: on_registration(env.as<RegistrationRequest>(), now); break;
        case MessageType::FlightPlan: on_plan(env.as<FlightPlan>(), now); break;
        case MessageType::SlotDecision: on_slot_decision(env.as<SlotDecision>(), now); break;
        case MessageType::FlightStatus: on_status(env.as<FlightStatus>(), now); break;
        case MessageType::PositionReport:
            if (env.sender == env.as<PositionReport>().callsign) on_position(env.as<PositionReport>(), now);
            break;
        case MessageType::EmergencyReport: on_emergency(env.as<EmergencyReport>(), now); break;
        case MessageType::EmsConfirmation: {
            const auto& c = env.as<EmsConfirmation>();
            if (ems_.confirm(c)) {
                events_.record(now, kUspaceId, "ems-confirmed",
                               {{"demand_id", c.demand_id}, {"vertidrome", c.vertidrome}, {"pad", c.pad},
                                {"moved", c.moved}});
            }
            break;
        }
        default: break;
    }
}

void UspaceServices::on_registration(const RegistrationRequest& req, SimTime now) {
    RegistrationResponse resp{req.operator_id, req.serial, req.callsign};
    const auto result = registry_.register_uas(req.operator_id, req.serial, req.callsign);
    if (const auto* reg = std::get_if<Registration>(&result)) {
        resp.accepted = true;
        resp.uas_id = reg->uas_id;
        events_.record(now, kUspaceId, "uas-registered", {{"callsign", req.callsign}, {"uas_id", reg->uas_id}});
    } else {
        resp.reason = std::get<Rejection>(result).reason;
        events_.record(now, kUspaceId, "registration-rejected", {{"serial", req.serial}, {"reason", resp.reason}});
    }
    outbox_.push_back(outgoing(resp));
}

void UspaceServices::deny(const FlightPlan& plan, const std::string& reason, SimTime now) {
    FlightAuthorisation auth{plan.callsign, plan.request_id, AuthVerdict::Denied, reason, plan.vertidrome()};
    outbox_.push_back(outgoing(auth));
    events_.record(now, kUspaceId, "uspace-denied",
                   {{"callsign", plan.callsign}, {"request_id", plan.request_id}, {"reason", reason}});
}

void UspaceServices::on_plan(const FlightPlan& plan, SimTime now) {
    if (!registry_.is_registered_callsign(plan.callsign)) return deny(plan, "unregistered", now);
    if (auto err = validate(plan)) return deny(plan, "invalid plan: " + *err, now);
    if (!config_.vertidromes.contains(plan.vertidrome())) return deny(plan, "unknown vertidrome", now);

    pending_[plan.request_id] = plan;
    const auto* current = plans_.find(plan.callsign);
    if (current == nullptr || current->state == PlanState::Filed || current->state == PlanState::Completed ||
        current->state == PlanState::Cancelled) {
        plans_.file(plan);
    }
    events_.record(now, kUspaceId, "uspace-submitted",
                   {{"callsign", plan.callsign}, {"request_id", plan.request_id}, {"vertidrome", plan.vertidrome()}});
    outbox_.push_back(outgoing(plan, /*to_vertidrome=*/true));
}

void UspaceServices::on_slot_decision(const SlotDecision& decision, SimTime now) {
    const auto it = pending_.find(decision.request_id);
    if (it == pending_.end()) return;
    const FlightPlan plan = it->second;
    pending_.erase(it);

    const auto verdict = authorize_flight(plan, plans_, decision, registry_.is_registered_callsign(plan.callsign));
    FlightAuthorisation auth{plan.callsign, plan.request_id, verdict.verdict, verdict.reason,
                             decision.vertidrome, decision.pad, decision.slot_start, decision.slot_end};
    if (verdict.verdict == AuthVerdict::Approved) {
        plans_.file(plan);
        plans_.set_state(plan.callsign, PlanState::Approved);
        deviating_.erase(plan.callsign);
        events_.record(now, kUspaceId, plan.supersedes ? "alternate-approved" : "uspace-approved",
                       {{"callsign", plan.callsign}, {"request_id", plan.request_id}, {"pad", decision.pad}});
    } else {
        const auto* entry = plans_.find(plan.callsign);
        if (entry != nullptr && entry->plan.request_id == plan.request_id) plans_.erase(plan.callsign);
        if (decision.verdict == SlotVerdict::Accepted) {
            outbox_.push_back(outgoing(SlotCancel{decision.vertidrome, plan.callsign, plan.request_id}));
        }
        events_.record(now, kUspaceId, "uspace-denied",
                       {{"callsign", plan.callsign}, {"request_id", plan.request_id}, {"reason", verdict.reason}});
    }
    outbox_.push_back(outgoing(auth));
}

void UspaceServices::on_status(const FlightStatus& status, SimTime now) {
    const auto* entry = plans_.find(status.callsign);
    if (entry == nullptr || entry->plan.request_id != status.request_id) return;
    const json payload{{"callsign", status.callsign}, {"request_id", status.request_id}};
    switch (status.status) {
        case FlightStatusKind::Activate:
            if (entry->state != PlanState::Approved) {
                events_.record(now, kUspaceId, "activation-refused", payload);
                return;
            }
            plans_.set_state(status.callsign, PlanState::Active);
            events_.record(now, kUspaceId, "plan-activated", payload);
            break;
        case FlightStatusKind::Conclude:
            plans_.set_state(status.callsign, PlanState::Completed);
            events_.record(now, kUspaceId, "plan-concluded", payload);
            break;
        case FlightStatusKind::Cancel:
            plans_.set_state(status.callsign, PlanState::Cancelled);
            events_.record(now, kUspaceId, "plan-cancelled", payload);
            break;
    }
}

void UspaceServices::on_position(const PositionReport& report, SimTime now) {
    const auto verdict = relay_.accept(report, registry_.is_registered_callsign(report.callsign));
    if (verdict != RelayVerdict::Relayed) return;
    outbox_.push_back(outgoing(report));

    const auto* entry = plans_.find(report.callsign);
    if (entry == nullptr || entry->state != PlanState::Active) return;
    const auto deviations = adherence_check(report, entry->plan, config_.adherence);
    std::set<DeviationKind> kinds;
    for (const auto& d : deviations) kinds.insert(d.kind);
    auto& previous = deviating_[report.callsign];
    if (kinds == previous) return;
    previous = kinds;
    if (deviations.empty()) {
        events_.record(now, kUspaceId, "adherence-restored", {{"callsign", report.callsign}});
        return;
    }
    for (const auto& d : deviations) {
        outbox_.push_back(outgoing(AdherenceNotice{report.callsign, entry->plan.request_id, kUspaceId, d.kind,
                                                   d.magnitude, report.timestamp}));
        events_.record(now, kUspaceId, "adherence-deviation",
                       {{"callsign", report.callsign}, {"kind", to_string(d.kind)}, {"magnitude", d.magnitude}});
    }
}

void UspaceServices::on_emergency(const EmergencyReport& report, SimTime now) {
    json payload{{"kind", to_string(report.kind)}, {"vertidrome", report.vertidrome}, {"reporter", report.reporter}};
    if (report.pad) payload["pad"] = *report.pad;
    events_.record(now, kUspaceId, "emergency-received", payload);
    if (report.kind != EmergencyKind::VehicleDistress) return;
    events_.record(now, kUspaceId, "emergency-declared", payload);
    if (report.vertidrome.empty() || !config_.vertidromes.contains(report.vertidrome)) return;
    place_ems_demand(report.vertidrome, report.pad.value_or(""), report.reporter, now + config_.ems_lead_ms,
                     now + config_.ems_lead_ms + config_.ems_duration_ms, now);
}

void UspaceServices::place_ems_demand(const std::string& vertidrome, const std::string& pad,
                                      const std::string& callsign, SimTime slot_start, SimTime slot_end,
                                      SimTime now) {
    const auto d = ems_.demand(vertidrome, pad, callsign, slot_start, slot_end);
    events_.record(now, kUspaceId, "ems-demand",
                   {{"demand_id", d.demand_id}, {"vertidrome", vertidrome}, {"pad", pad}, {"callsign", callsign}});
    outbox_.push_back(outgoing(d));
}

}  // namespace vertisim::uspace
