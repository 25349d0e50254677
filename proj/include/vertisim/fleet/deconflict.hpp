#pragma once

#include <vector>

#include "vertisim/messages/types.hpp"
#include "vertisim/uspace/conflict.hpp"

namespace vertisim::fleet {

/// Same geometry, every waypoint ETA and the slot moved by `delay`.
FlightPlan shifted(const FlightPlan& plan, SimTime delay);

/// Delays each plan, in order, by the smallest multiple of the temporal
/// separation that clears it against `fixed` and every plan before it.
/// Plans are updated in place; returns the delay applied to each.
std::vector<SimTime> strategic_self_deconflict(std::vector<FlightPlan>& plans,
                                               const uspace::SeparationMinima& minima,
                                               const std::vector<FlightPlan>& fixed = {});

}  // namespace vertisim::fleet
