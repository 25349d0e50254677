#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "vertisim/messages/types.hpp"

namespace vertisim::vertidrome {

enum class SlotState { Reserved, InProgress, Completed, Displaced, Cancelled };
std::string_view to_string(SlotState s);

struct Slot {
    std::string pad;
    std::string callsign;
    std::int64_t request_id = 0;  // EMS slots use -demand_id
    SimTime start = 0;
    SimTime end = 0;  // exclusive
    Operation operation = Operation::ARR;
    int priority = 0;
    std::string aircraft_type;
    std::string from_to;
    SlotState state = SlotState::Reserved;

    bool blocking() const { return state == SlotState::Reserved || state == SlotState::InProgress; }
    bool overlaps(SimTime s, SimTime e) const { return start < e && s < end; }
};

/// Per-pad reservations. Blocking (Reserved/InProgress) slots on one pad never overlap.
class PadSchedule {
public:
    /// True when [start, end) on `pad` collides with no blocking slot other than `ignore_request`.
    bool fits(const std::string& pad, SimTime start, SimTime end, std::optional<std::int64_t> ignore_request = {}) const;
    /// Blocking slots on `pad` overlapping [start, end).
    std::vector<const Slot*> overlapping(const std::string& pad, SimTime start, SimTime end) const;

    /// Precondition: fits(). Returns false otherwise without change.
    bool reserve(Slot slot);
    Slot* find(std::int64_t request_id);
    const Slot* find(std::int64_t request_id) const;
    /// Live (blocking) slot of a callsign, if any.
    const Slot* live_for(const std::string& callsign) const;
    bool set_state(std::int64_t request_id, SlotState state);
    bool move(std::int64_t request_id, const std::string& pad, SimTime start, SimTime end);

    const std::vector<Slot>& slots() const { return slots_; }

    /// Earliest start >= `from` at which a window of `length` fits on `pad`.
    SimTime next_free(const std::string& pad, SimTime from, SimTime length) const;

private:
    std::vector<Slot> slots_;  // insertion order; history kept for the forecast
};

}  // namespace vertisim::vertidrome
