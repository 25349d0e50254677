#include "vertisim/uspace/registry.hpp"

#include <cstdio>

namespace vertisim::uspace {

std::variant<Registration, Rejection> Registry::register_uas(const std::string& operator_id,
                                                             const std::string& serial,
                                                             const std::string& callsign) {
    if (operator_id.empty()) return Rejection{"empty operator"};
    if (serial.empty()) return Rejection{"empty serial"};
    const auto key = std::make_pair(operator_id, serial);
    if (auto it = by_key_.find(key); it != by_key_.end()) {
        if (!callsign.empty() && it->second.callsign.empty()) {
            it->second.callsign = callsign;
            by_callsign_[callsign] = it->second.uas_id;
        }
        return it->second;
    }
    if (!callsign.empty() && by_callsign_.contains(callsign)) return Rejection{"callsign in use"};
    char id[16];
    std::snprintf(id, sizeof id, "UAS-%04d", next_++);
    Registration reg{operator_id, serial, id, callsign};
    by_key_.emplace(key, reg);
    if (!callsign.empty()) by_callsign_[callsign] = reg.uas_id;
    return reg;
}

std::optional<Registration> Registry::find_by_callsign(const std::string& callsign) const {
    const auto it = by_callsign_.find(callsign);
    if (it == by_callsign_.end()) return std::nullopt;
    for (const auto& [_, reg] : by_key_) {
        if (reg.uas_id == it->second) return reg;
    }
    return std::nullopt;
}

}  // namespace vertisim::uspace
