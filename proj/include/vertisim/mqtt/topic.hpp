#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace vertisim::mqtt {

/// Topic names are non-empty, carry no wildcard characters, and fit a
/// 16-bit length prefix.
bool valid_topic_name(std::string_view topic);

/// Filters may use `+` as a whole level and `#` as the whole final level.
bool valid_topic_filter(std::string_view filter);

/// Level-wise match of a topic name against a (valid) filter.
bool topic_matches(std::string_view filter, std::string_view topic);

std::vector<std::string_view> split_levels(std::string_view topic);

}  // namespace vertisim::mqtt
