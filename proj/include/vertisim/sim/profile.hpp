#pragma once

#include <optional>
#include <string>
#include <vector>

namespace vertisim::sim {

struct VehicleProfile {
    std::string name;
    double empty_weight_kg = 0.0;
    double cruise_speed_mps = 2.0;
    double max_speed_mps = 10.0;
    double climb_rate_mps = 2.0;
    double max_wind_mps = 11.0;
    double endurance_min = 20.0;
    double report_rate_hz = 2.0;

    /// Empty when usable, otherwise what is wrong.
    std::optional<std::string> invalid() const;
};

const std::vector<VehicleProfile>& builtin_profiles();
std::optional<VehicleProfile> find_profile(const std::string& name);

}  // namespace vertisim::sim
