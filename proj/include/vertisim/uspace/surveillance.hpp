#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

#include "vertisim/messages/types.hpp"

namespace vertisim::uspace {

enum class RelayVerdict { Relayed, Unregistered, Stale };

struct RelayStats {
    std::uint64_t relayed = 0;
    std::uint64_t dropped_unregistered = 0;
    std::uint64_t dropped_stale = 0;
};

/// Position fan-out gate: drops unregistered callsigns and reports whose
/// timestamp is not newer than the last one seen for that callsign.
class SurveillanceRelay {
public:
    RelayVerdict accept(const PositionReport& report, bool registered);
    std::optional<PositionReport> last_known(const std::string& callsign) const;
    const RelayStats& stats() const { return stats_; }

private:
    std::map<std::string, PositionReport> last_;
    RelayStats stats_;
};

}  // namespace vertisim::uspace
