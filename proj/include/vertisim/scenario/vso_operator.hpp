#pragma once

#include <atomic>
#include <chrono>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"

namespace vertisim::scenario {

/// Headless stand-in for the VSO console: connects to the gateway,
/// acknowledges every flight-request pop-up and approves every pending
/// decision. Runs its own io thread.
class ScriptedOperator {
public:
    ScriptedOperator(std::string host, std::uint16_t port);
    ~ScriptedOperator();
    ScriptedOperator(const ScriptedOperator&) = delete;
    ScriptedOperator& operator=(const ScriptedOperator&) = delete;

    /// Connects and starts reading. Throws on connection failure.
    void start();
    void stop();

    std::size_t acknowledged() const { return acknowledged_; }
    std::size_t approved() const { return approved_; }
    std::size_t events() const { return events_; }
    /// command_result events received, in order.
    std::vector<nlohmann::json> results() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
    std::atomic<std::size_t> acknowledged_{0}, approved_{0}, events_{0};
};

}  // namespace vertisim::scenario
