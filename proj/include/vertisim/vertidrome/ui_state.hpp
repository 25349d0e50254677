#pragma once

#include <string>
#include <vector>

#include "json.hpp"

namespace vertisim::vertidrome {

/// Panel names of the VSO interface state, in snapshot order.
const std::vector<std::string>& ui_panels();

/// Panels whose content differs between two states (missing panels count as changed).
std::vector<std::string> changed_panels(const nlohmann::json& before, const nlohmann::json& after);

}  // namespace vertisim::vertidrome
