#include "vertisim/vertidrome/weather.hpp"

#include <cmath>
#include <cstdio>

namespace vertisim::vertidrome {

PadUsability evaluate_weather(const WeatherState& w, const WeatherLimits& limits) {
    if (w.speed_mps > limits.wind_limit_mps) return {false, 1.0};
    if (w.speed_mps >= limits.caution_mps) return {true, limits.caution_factor};
    return {true, 1.0};
}

std::string weather_text(const WeatherState& w) {
    const long dir = std::lround(w.direction_deg) % 360;
    char buf[64];
    std::snprintf(buf, sizeof buf, "Direction: %03ld\xC2\xB0 Speed: %ld m/s", dir, std::lround(w.speed_mps));
    return buf;
}

}  // namespace vertisim::vertidrome
