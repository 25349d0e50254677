#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vertisim/messages/types.hpp"
#include "vertisim/uspace/conflict.hpp"

namespace vertisim::uspace {

enum class PlanState { Filed, Approved, Active, Completed, Cancelled };

std::string_view to_string(PlanState s);

struct PlanEntry {
    FlightPlan plan;
    PlanState state = PlanState::Filed;
    SampledTrack track;
};

/// callsign -> current plan. Filing a new plan for a callsign replaces the old entry.
class ActivePlanSet {
public:
    explicit ActivePlanSet(SeparationMinima minima = {}) : minima_(minima) {}

    void file(const FlightPlan& plan);
    bool set_state(const std::string& callsign, PlanState state);
    void erase(const std::string& callsign) { plans_.erase(callsign); }

    const PlanEntry* find(const std::string& callsign) const;
    const std::map<std::string, PlanEntry>& entries() const { return plans_; }
    const SeparationMinima& minima() const { return minima_; }

    /// Callsign of the first Approved/Active plan (other callsign) in conflict with `plan`.
    std::optional<std::string> first_conflict(const FlightPlan& plan) const;

private:
    SeparationMinima minima_;
    std::map<std::string, PlanEntry> plans_;
};

struct AuthDecision {
    AuthVerdict verdict = AuthVerdict::Denied;
    std::string reason;
};

/// Approved iff registered, valid, accepted by the vertidrome and free of 4D
/// conflicts with every Approved/Active plan of another callsign.
AuthDecision authorize_flight(const FlightPlan& plan, const ActivePlanSet& active, const SlotDecision& decision,
                              bool registered);

}  // namespace vertisim::uspace
