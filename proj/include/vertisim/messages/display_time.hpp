#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include "vertisim/messages/geometry.hpp"

namespace vertisim {

/// Maps simulated time onto a wall-clock display epoch (UTC seconds).
class DisplayClock {
public:
    DisplayClock() = default;
    explicit DisplayClock(std::int64_t epoch_unix_seconds) : epoch_(epoch_unix_seconds) {}

    /// "2023-06-14T22:54:00" (UTC, no offset).
    static std::optional<DisplayClock> from_iso(std::string_view text);

    /// "22:56:45"
    std::string clock(SimTime t) const;
    /// "14-Jun-2023 22:56:45"
    std::string date_time(SimTime t) const;

    std::int64_t epoch() const { return epoch_; }

private:
    std::int64_t epoch_ = 0;
};

}  // namespace vertisim
