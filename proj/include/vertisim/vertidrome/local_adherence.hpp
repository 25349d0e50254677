#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "vertisim/messages/types.hpp"
#include "vertisim/uspace/adherence.hpp"

namespace vertisim::vertidrome {

struct AvoidArea {
    std::string id;
    std::vector<Point2> polygon;
};

struct LocalDeviation {
    DeviationKind kind = DeviationKind::Spatial;
    double magnitude = 0.0;
    std::string area;  // AvoidArea only
};

/// Path tolerance, avoid-area incursion and predicted lateness against the slot.
std::vector<LocalDeviation> local_adherence(const PositionReport& report, const FlightPlan& plan, SimTime slot_end,
                                            const uspace::AdherenceCriteria& criteria,
                                            const std::vector<AvoidArea>& areas);

/// Emits only when a flight's set of deviation kinds changes.
class DeviationLatch {
public:
    /// Deviations to alert on now (empty when nothing changed or conforming).
    std::vector<LocalDeviation> update(const std::string& callsign, std::vector<LocalDeviation> current);
    void forget(const std::string& callsign) { last_.erase(callsign); }

private:
    std::map<std::string, std::set<std::pair<DeviationKind, std::string>>> last_;
};

}  // namespace vertisim::vertidrome
