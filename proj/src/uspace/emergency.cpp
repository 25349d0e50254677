#include "vertisim/uspace/emergency.hpp"

namespace vertisim::uspace {

EmsDemand EmergencyService::demand(const std::string& vertidrome, const std::string& pad,
                                   const std::string& callsign, SimTime slot_start, SimTime slot_end) {
    if (!vertidromes_.contains(vertidrome)) throw UnknownVertidrome("unknown vertidrome " + vertidrome);
    EmsDemand d{next_id_++, vertidrome, pad, callsign, slot_start, slot_end};
    open_.emplace(d.demand_id, d);
    return d;
}

bool EmergencyService::confirm(const EmsConfirmation& confirmation) {
    const auto it = open_.find(confirmation.demand_id);
    if (it == open_.end()) return false;
    open_.erase(it);
    confirmed_[confirmation.demand_id] = confirmation;
    return true;
}

}  // namespace vertisim::uspace
