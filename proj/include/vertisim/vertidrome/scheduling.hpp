#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "vertisim/messages/types.hpp"
#include "vertisim/vertidrome/pad.hpp"
#include "vertisim/vertidrome/schedule.hpp"

namespace vertisim::vertidrome {

struct PadConstraint {
    bool usable = true;
    PadMode mode = PadMode::BOTH;
};

/// Risk management output consumed by pad scheduling.
struct OperationalConstraintSet {
    std::map<std::string, PadConstraint> pads;  // ordered by pad id
    double extension_factor = 1.0;
    std::set<std::string> hazards;  // pad ids with an active hazard
    std::string weather_reason;     // non-empty: every pad unusable because of weather
    std::map<std::string, std::vector<std::pair<SimTime, SimTime>>> closures;  // scheduled close orders

    bool usable_for(const std::string& pad, Operation op) const;
    bool closure_overlaps(const std::string& pad, SimTime start, SimTime end) const;
};

/// Requested pad, then the GFMU preference, then remaining pads by id.
std::vector<std::string> pad_candidates(const OperationalConstraintSet& c, const std::string& requested,
                                        const std::optional<std::string>& gfmu);

/// Decides a request and reserves the slot when accepted. The slot window
/// is the requested one stretched by the extension factor.
SlotDecision handle_flight_request(const FlightPlan& plan, const std::string& vertidrome,
                                   const OperationalConstraintSet& constraints, PadSchedule& schedule,
                                   const std::optional<std::string>& gfmu);

struct EmsOutcome {
    EmsConfirmation confirmation;
    std::vector<Slot> displaced;  // copies, state already Displaced
    bool accommodated = false;
};

/// Inserts an EMS slot. Lower-priority Reserved slots in the window are
/// displaced; InProgress or EMS slots push the window to the next free one.
EmsOutcome preempt_for_ems(const EmsDemand& demand, const OperationalConstraintSet& constraints,
                           PadSchedule& schedule);

/// Displaces every Reserved slot on the pad. Returns copies of the displaced slots.
std::vector<Slot> displace_reserved(PadSchedule& schedule, const std::string& pad);

}  // namespace vertisim::vertidrome
