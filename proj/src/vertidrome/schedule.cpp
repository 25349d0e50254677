#include "vertisim/vertidrome/schedule.hpp"

#include <algorithm>

namespace vertisim::vertidrome {

std::string_view to_string(SlotState s) {
    switch (s) {
        case SlotState::Reserved: return "Reserved";
        case SlotState::InProgress: return "InProgress";
        case SlotState::Completed: return "Completed";
        case SlotState::Displaced: return "Displaced";
        case SlotState::Cancelled: return "Cancelled";
    }
    return "?";
}

std::vector<const Slot*> PadSchedule::overlapping(const std::string& pad, SimTime start, SimTime end) const {
    std::vector<const Slot*> out;
    for (const auto& s : slots_) {
        if (s.pad == pad && s.blocking() && s.overlaps(start, end)) out.push_back(&s);
    }
    return out;
}

bool PadSchedule::fits(const std::string& pad, SimTime start, SimTime end,
                       std::optional<std::int64_t> ignore_request) const {
    if (end <= start) return false;
    for (const auto* s : overlapping(pad, start, end)) {
        if (!ignore_request || s->request_id != *ignore_request) return false;
    }
    return true;
}

bool PadSchedule::reserve(Slot slot) {
    if (!fits(slot.pad, slot.start, slot.end)) return false;
    slot.state = SlotState::Reserved;
    slots_.push_back(std::move(slot));
    return true;
}

Slot* PadSchedule::find(std::int64_t request_id) {
    for (auto it = slots_.rbegin(); it != slots_.rend(); ++it) {
        if (it->request_id == request_id) return &*it;
    }
    return nullptr;
}

const Slot* PadSchedule::find(std::int64_t request_id) const {
    return const_cast<PadSchedule*>(this)->find(request_id);
}

const Slot* PadSchedule::live_for(const std::string& callsign) const {
    for (const auto& s : slots_) {
        if (s.callsign == callsign && s.blocking()) return &s;
    }
    return nullptr;
}

bool PadSchedule::set_state(std::int64_t request_id, SlotState state) {
    auto* s = find(request_id);
    if (s == nullptr) return false;
    s->state = state;
    return true;
}

bool PadSchedule::move(std::int64_t request_id, const std::string& pad, SimTime start, SimTime end) {
    auto* s = find(request_id);
    if (s == nullptr || !s->blocking() || !fits(pad, start, end, request_id)) return false;
    s->pad = pad;
    s->start = start;
    s->end = end;
    return true;
}

SimTime PadSchedule::next_free(const std::string& pad, SimTime from, SimTime length) const {
    SimTime t = from;
    while (true) {
        const auto hits = overlapping(pad, t, t + length);
        if (hits.empty()) return t;
        SimTime latest = t;
        for (const auto* s : hits) latest = std::max(latest, s->end);
        t = latest;
    }
}

}  // namespace vertisim::vertidrome
