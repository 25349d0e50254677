#include "vertisim/vertidrome/forecast.hpp"

namespace vertisim::vertidrome {

namespace {

SimTime floor_minute(SimTime t) {
    SimTime m = t / kMinute * kMinute;
    return m > t ? m - kMinute : m;
}

ForecastStatus status_of(const Slot& s, const AirborneFn& airborne) {
    switch (s.state) {
        case SlotState::Completed: return s.operation == Operation::ARR ? ForecastStatus::LANDED : ForecastStatus::DEPARTED;
        case SlotState::Displaced:
        case SlotState::Cancelled: return ForecastStatus::CANCELLED;
        default: break;
    }
    if (s.state == SlotState::InProgress) return ForecastStatus::AIRBORNE;
    return airborne && airborne(s.callsign) ? ForecastStatus::AIRBORNE : ForecastStatus::SCHEDULED;
}

}  // namespace

SimTime forecast_minute(SimTime slot_start) { return floor_minute(slot_start + kMinute / 2); }

SlotForecast operational_forecast(const std::string& vertidrome, const std::vector<std::string>& pads,
                                  const PadSchedule& schedule, SimTime now, const AirborneFn& airborne) {
    SlotForecast f{vertidrome, {}};
    const SimTime first = floor_minute(now) - kForecastRowsBefore * kMinute;
    for (int i = 0; i <= kForecastRowsBefore + kForecastRowsAfter; ++i) {
        ForecastRow row{first + i * kMinute, {}};
        for (const auto& pad : pads) {
            bool any = false;
            for (const auto& s : schedule.slots()) {
                if (s.pad != pad || forecast_minute(s.start) != row.minute) continue;
                row.entries.push_back(
                    {pad, s.callsign, s.aircraft_type, s.priority, s.operation, s.from_to, status_of(s, airborne)});
                any = true;
            }
            if (!any) row.entries.push_back(ForecastEntry{pad});
        }
        f.rows.push_back(std::move(row));
    }
    return f;
}

}  // namespace vertisim::vertidrome
