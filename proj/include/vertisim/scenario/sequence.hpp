#pragma once

#include <optional>
#include <string>
#include <vector>

#include "vertisim/scenario/event_log.hpp"

namespace vertisim::scenario {

struct SequenceResult {
    bool ok = true;
    std::size_t matched = 0;      // template entries found in order
    std::string missing;          // first template kind not found
    std::vector<std::string> forbidden_seen;
    std::string message() const;
};

/// `expected` must appear in order as a subsequence of the log's kinds; none
/// of `forbidden` may appear anywhere.
SequenceResult assert_sequence(const std::vector<std::string>& kinds, const std::vector<std::string>& expected,
                               const std::vector<std::string>& forbidden = {});
SequenceResult assert_sequence(const EventLog& log, const std::vector<std::string>& expected,
                               const std::vector<std::string>& forbidden = {});

}  // namespace vertisim::scenario
