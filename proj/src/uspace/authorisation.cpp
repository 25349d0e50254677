#include "vertisim/uspace/authorisation.hpp"

namespace vertisim::uspace {

std::string_view to_string(PlanState s) {
    switch (s) {
        case PlanState::Filed: return "Filed";
        case PlanState::Approved: return "Approved";
        case PlanState::Active: return "Active";
        case PlanState::Completed: return "Completed";
        case PlanState::Cancelled: return "Cancelled";
    }
    return "?";
}

void ActivePlanSet::file(const FlightPlan& plan) {
    plans_[plan.callsign] = PlanEntry{plan, PlanState::Filed, sample(plan.waypoints, minima_.sample_ms)};
}

bool ActivePlanSet::set_state(const std::string& callsign, PlanState state) {
    const auto it = plans_.find(callsign);
    if (it == plans_.end()) return false;
    it->second.state = state;
    return true;
}

const PlanEntry* ActivePlanSet::find(const std::string& callsign) const {
    const auto it = plans_.find(callsign);
    return it == plans_.end() ? nullptr : &it->second;
}

std::optional<std::string> ActivePlanSet::first_conflict(const FlightPlan& plan) const {
    const auto track = sample(plan.waypoints, minima_.sample_ms);
    for (const auto& [cs, entry] : plans_) {
        if (cs == plan.callsign) continue;
        if (entry.state != PlanState::Approved && entry.state != PlanState::Active) continue;
        if (tracks_conflict(track, entry.track, minima_)) return cs;
    }
    return std::nullopt;
}

AuthDecision authorize_flight(const FlightPlan& plan, const ActivePlanSet& active, const SlotDecision& decision,
                              bool registered) {
    if (!registered) return {AuthVerdict::Denied, "unregistered"};
    if (auto err = validate(plan)) return {AuthVerdict::Denied, "invalid plan: " + *err};
    if (decision.request_id != plan.request_id) return {AuthVerdict::Denied, "decision for another request"};
    if (decision.verdict != SlotVerdict::Accepted) {
        return {AuthVerdict::Denied, "vertidrome rejected: " + decision.reason};
    }
    if (auto other = active.first_conflict(plan)) return {AuthVerdict::Denied, "conflict with " + *other};
    return {AuthVerdict::Approved, ""};
}

}  // namespace vertisim::uspace
