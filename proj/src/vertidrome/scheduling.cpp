#include "vertisim/vertidrome/scheduling.hpp"

#include <algorithm>
#include <cmath>

namespace vertisim::vertidrome {

bool OperationalConstraintSet::usable_for(const std::string& pad, Operation op) const {
    if (!weather_reason.empty() || hazards.contains(pad)) return false;
    const auto it = pads.find(pad);
    return it != pads.end() && it->second.usable && mode_allows(it->second.mode, op);
}

bool OperationalConstraintSet::closure_overlaps(const std::string& pad, SimTime start, SimTime end) const {
    const auto it = closures.find(pad);
    if (it == closures.end()) return false;
    for (const auto& [s, e] : it->second) {
        if (s < end && start < e) return true;
    }
    return false;
}

std::vector<std::string> pad_candidates(const OperationalConstraintSet& c, const std::string& requested,
                                        const std::optional<std::string>& gfmu) {
    std::vector<std::string> out;
    const auto add = [&](const std::string& p) {
        if (c.pads.contains(p) && std::find(out.begin(), out.end(), p) == out.end()) out.push_back(p);
    };
    add(requested);
    if (gfmu) add(*gfmu);
    for (const auto& [id, _] : c.pads) add(id);
    return out;
}

SlotDecision handle_flight_request(const FlightPlan& plan, const std::string& vertidrome,
                                   const OperationalConstraintSet& constraints, PadSchedule& schedule,
                                   const std::optional<std::string>& gfmu) {
    SlotDecision d{plan.request_id, plan.callsign, vertidrome, SlotVerdict::Rejected};
    if (validate(plan) || plan.vertidrome() != vertidrome) {
        d.reason = "invalid plan";
        return d;
    }
    if (!constraints.weather_reason.empty()) {
        d.reason = constraints.weather_reason;
        return d;
    }
    const auto length = static_cast<SimTime>(
        std::llround(static_cast<double>(plan.slot_end - plan.slot_start) * constraints.extension_factor));
    const SimTime start = plan.slot_start, end = plan.slot_start + length;
    for (const auto& pad : pad_candidates(constraints, plan.requested_pad, gfmu)) {
        if (!constraints.usable_for(pad, plan.operation) || constraints.closure_overlaps(pad, start, end) ||
            !schedule.fits(pad, start, end)) {
            continue;
        }
        Slot slot{pad, plan.callsign, plan.request_id, start, end, plan.operation, plan.priority, plan.aircraft_type,
                  plan.operation == Operation::ARR ? plan.origin : plan.destination};
        schedule.reserve(slot);
        d.verdict = SlotVerdict::Accepted;
        d.pad = pad;
        d.slot_start = start;
        d.slot_end = end;
        return d;
    }
    d.reason = "no slot";
    return d;
}

std::vector<Slot> displace_reserved(PadSchedule& schedule, const std::string& pad) {
    std::vector<Slot> out;
    for (const auto& s : schedule.slots()) {
        if (s.pad == pad && s.state == SlotState::Reserved) out.push_back(s);
    }
    for (auto& s : out) {
        schedule.set_state(s.request_id, SlotState::Displaced);
        s.state = SlotState::Displaced;
    }
    return out;
}

EmsOutcome preempt_for_ems(const EmsDemand& demand, const OperationalConstraintSet& constraints,
                           PadSchedule& schedule) {
    EmsOutcome out;
    out.confirmation = {demand.demand_id, demand.vertidrome, "", demand.callsign, demand.slot_start, demand.slot_end};
    const SimTime length = demand.slot_end - demand.slot_start;

    // EMS ignores mode restrictions and weather but cannot land on a closed or hazardous pad.
    std::optional<std::string> pad;
    for (const auto& p : pad_candidates(constraints, demand.pad, std::nullopt)) {
        const auto& pc = constraints.pads.at(p);
        if (pc.usable && !constraints.hazards.contains(p)) {
            pad = p;
            break;
        }
    }
    if (!pad || length <= 0) return out;

    // Slots that cannot be displaced: already landing, or earlier EMS demands.
    const auto immovable = [&](SimTime s, SimTime e) {
        for (const auto* slot : schedule.overlapping(*pad, s, e)) {
            if (slot->state == SlotState::InProgress || slot->priority >= kEmsPriority) return slot->end;
        }
        return SimTime{-1};
    };
    SimTime start = demand.slot_start;
    for (SimTime blocked_until; (blocked_until = immovable(start, start + length)) >= 0;) start = blocked_until;

    std::vector<std::int64_t> victims;
    for (const auto* slot : schedule.overlapping(*pad, start, start + length)) victims.push_back(slot->request_id);
    for (const auto id : victims) {
        schedule.set_state(id, SlotState::Displaced);
        out.displaced.push_back(*schedule.find(id));
    }
    schedule.reserve(Slot{*pad, demand.callsign, -demand.demand_id, start, start + length, Operation::ARR,
                          kEmsPriority, "EMS", "EMS"});
    out.accommodated = true;
    out.confirmation.pad = *pad;
    out.confirmation.slot_start = start;
    out.confirmation.slot_end = start + length;
    out.confirmation.moved = start != demand.slot_start;
    return out;
}

}  // namespace vertisim::vertidrome
