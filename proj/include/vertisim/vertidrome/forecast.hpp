#pragma once

#include <functional>
#include <string>
#include <vector>

#include "vertisim/messages/types.hpp"
#include "vertisim/vertidrome/schedule.hpp"

namespace vertisim::vertidrome {

inline constexpr SimTime kMinute = 60000;
inline constexpr int kForecastRowsBefore = 2;
inline constexpr int kForecastRowsAfter = 8;

/// Row a slot is listed in: its start rounded to the nearest minute (half up).
SimTime forecast_minute(SimTime slot_start);

/// Status callback so the forecast can show AIRBORNE for tracked flights.
using AirborneFn = std::function<bool(const std::string& callsign)>;

/// 11 one-minute rows around `now`; every row has one entry per pad (blank
/// when free, priority 0) plus one per additional slot in that minute.
SlotForecast operational_forecast(const std::string& vertidrome, const std::vector<std::string>& pads,
                                  const PadSchedule& schedule, SimTime now, const AirborneFn& airborne = {});

}  // namespace vertisim::vertidrome
