#include "vertisim/scenario/sequence.hpp"

#include <algorithm>

namespace vertisim::scenario {

std::string SequenceResult::message() const {
    if (ok) return "sequence matched (" + std::to_string(matched) + " events)";
    std::string m;
    if (!missing.empty()) m = "missing '" + missing + "' after " + std::to_string(matched) + " matched events";
    for (const auto& f : forbidden_seen) m += (m.empty() ? "" : "; ") + std::string("forbidden '") + f + "' seen";
    return m;
}

SequenceResult assert_sequence(const std::vector<std::string>& kinds, const std::vector<std::string>& expected,
                               const std::vector<std::string>& forbidden) {
    SequenceResult r;
    auto it = kinds.begin();
    for (const auto& want : expected) {
        it = std::find(it, kinds.end(), want);
        if (it == kinds.end()) {
            r.ok = false;
            r.missing = want;
            break;
        }
        ++it;
        ++r.matched;
    }
    for (const auto& f : forbidden) {
        if (std::find(kinds.begin(), kinds.end(), f) != kinds.end()) {
            r.ok = false;
            r.forbidden_seen.push_back(f);
        }
    }
    return r;
}

SequenceResult assert_sequence(const EventLog& log, const std::vector<std::string>& expected,
                               const std::vector<std::string>& forbidden) {
    return assert_sequence(log.kinds(), expected, forbidden);
}

}  // namespace vertisim::scenario
