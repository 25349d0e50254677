#include "vertisim/uspace/surveillance.hpp"

namespace vertisim::uspace {

RelayVerdict SurveillanceRelay::accept(const PositionReport& report, bool registered) {
    if (!registered) {
        ++stats_.dropped_unregistered;
        return RelayVerdict::Unregistered;
    }
    const auto it = last_.find(report.callsign);
    if (it != last_.end() && report.timestamp <= it->second.timestamp) {
        ++stats_.dropped_stale;
        return RelayVerdict::Stale;
    }
    last_[report.callsign] = report;
    ++stats_.relayed;
    return RelayVerdict::Relayed;
}

std::optional<PositionReport> SurveillanceRelay::last_known(const std::string& callsign) const {
    const auto it = last_.find(callsign);
    if (it == last_.end()) return std::nullopt;
    return it->second;
}

}  // namespace vertisim::uspace
