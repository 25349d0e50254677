#pragma once

#include <vector>

#include "vertisim/messages/types.hpp"

namespace vertisim::vertidrome {

struct WeatherLimits {
    double wind_limit_mps = 11.0;   // inclusive
    double caution_mps = 8.0;
    double caution_factor = 1.5;
};

struct ForecastPoint {
    SimTime time = 0;
    double direction_deg = 0.0;
    double speed_mps = 0.0;
};

struct WeatherState {
    double direction_deg = 0.0;
    double speed_mps = 0.0;
    std::vector<ForecastPoint> forecast;
    WeatherSource source = WeatherSource::LocalSensor;
};

struct PadUsability {
    bool usable = true;            // false: every pad unusable for new operations
    double extension_factor = 1.0;
};

PadUsability evaluate_weather(const WeatherState& w, const WeatherLimits& limits);

/// "Direction: 060° Speed: 3 m/s"
std::string weather_text(const WeatherState& w);

}  // namespace vertisim::vertidrome
