#include "vertisim/sim/profile.hpp"

#include <algorithm>

namespace vertisim::sim {

std::optional<std::string> VehicleProfile::invalid() const {
    if (name.empty()) return "empty name";
    if (empty_weight_kg <= 0 || cruise_speed_mps <= 0 || max_speed_mps <= 0 || climb_rate_mps <= 0 ||
        max_wind_mps <= 0 || endurance_min <= 0 || report_rate_hz <= 0) {
        return "non-positive field";
    }
    if (cruise_speed_mps > max_speed_mps) return "cruise speed above maximum";
    return std::nullopt;
}

const std::vector<VehicleProfile>& builtin_profiles() {
    // flight time "> 30 min" / "> 20 min" taken at the bound
    static const std::vector<VehicleProfile> profiles{
        {"EVO X8 heavy", 9.95, 2.0, 10.0, 2.0, 11.0, 30.0, 2.0},
        {"EVO X8", 7.95, 2.0, 10.0, 2.0, 11.0, 20.0, 2.0},
        {"HolyBro S500 V2", 1.3, 2.0, 10.0, 2.0, 10.0, 15.0, 2.0},
    };
    return profiles;
}

std::optional<VehicleProfile> find_profile(const std::string& name) {
    const auto& all = builtin_profiles();
    const auto it = std::find_if(all.begin(), all.end(), [&](const VehicleProfile& p) { return p.name == name; });
    if (it == all.end()) return std::nullopt;
    return *it;
}

}  // namespace vertisim::sim
