#pragma once

#include <cstdint>
#include <map>
#include <set>
#include <stdexcept>
#include <string>

#include "vertisim/messages/types.hpp"

namespace vertisim::uspace {

class UnknownVertidrome : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Emergency management service: issues maximum-priority pad demands and
/// tracks their confirmations.
class EmergencyService {
public:
    explicit EmergencyService(std::set<std::string> vertidromes) : vertidromes_(std::move(vertidromes)) {}

    /// Throws UnknownVertidrome. An empty pad lets the vertidrome choose.
    EmsDemand demand(const std::string& vertidrome, const std::string& pad, const std::string& callsign,
                     SimTime slot_start, SimTime slot_end);

    /// False for a confirmation that matches no open demand.
    bool confirm(const EmsConfirmation& confirmation);

    const std::map<std::int64_t, EmsDemand>& open() const { return open_; }
    const std::map<std::int64_t, EmsConfirmation>& confirmed() const { return confirmed_; }

private:
    std::set<std::string> vertidromes_;
    std::int64_t next_id_ = 1;
    std::map<std::int64_t, EmsDemand> open_;
    std::map<std::int64_t, EmsConfirmation> confirmed_;
};

}  // namespace vertisim::uspace
