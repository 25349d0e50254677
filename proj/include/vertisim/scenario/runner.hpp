#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "json.hpp"
#include "vertisim/mqtt/client.hpp"
#include "vertisim/scenario/config.hpp"
#include "vertisim/scenario/event_log.hpp"
#include "vertisim/scenario/sequence.hpp"
#include "vertisim/scenario/tracks.hpp"

namespace vertisim::scenario {

enum class Transport { InProcess, Tcp };

struct RunOptions {
    Transport transport = Transport::InProcess;
    std::string broker_host = "127.0.0.1";
    std::uint16_t broker_port = 0;  // 0 with Tcp: start an embedded broker on a free port
    bool external_broker = false;   // Tcp: connect to broker_host:broker_port instead of embedding one
    mqtt::Millis latency{0};        // in-process link latency
    std::optional<std::uint16_t> gateway_port;  // VSO WebSocket gateway (0 = any free port)
    std::string gateway_vertidrome;             // default: the first vertidrome
    std::function<void(const nlohmann::json&)> gateway_recorder;
    /// Called once the gateway listens, before the first tick.
    std::function<void(std::uint16_t port)> on_gateway_ready;
    std::optional<bool> auto_ack;        // overrides the scenario mode
    std::optional<std::uint64_t> seed;   // overrides the scenario seed
    double speedup = 0.0;                // sim seconds per wall second; 0 = unpaced
    /// Called every tick after the pump, with the current sim time.
    std::function<void(SimTime)> on_tick;
};

struct LandingResult {
    bool ok = false;
    std::string detail;
    std::optional<SimTime> takeoff;
    std::optional<SimTime> landed;
    std::string vertidrome;
    std::string pad;
};

struct RunResult {
    std::string name;
    EventLog log;
    Tracks tracks;
    SequenceResult sequence;
    std::optional<LandingResult> landing;
    bool timed_out = false;
    SimTime end_time = 0;
    double wall_seconds = 0.0;
    std::map<std::string, std::string> final_states;  // callsign -> flight state
    std::uint64_t parse_errors = 0;
    std::optional<std::uint16_t> gateway_port;

    bool passed() const;
    std::string summary() const;
};

/// Wires U-space, the vertidromes, the fleets and the vehicles to one broker
/// and drives them from a simulated clock.
class ScenarioRunner {
public:
    explicit ScenarioRunner(ScenarioConfig config, RunOptions options = {});
    ~ScenarioRunner();
    ScenarioRunner(const ScenarioRunner&) = delete;
    ScenarioRunner& operator=(const ScenarioRunner&) = delete;

    RunResult run();

    const ScenarioConfig& config() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

/// Convenience: load, run, return.
RunResult run_scenario(const ScenarioConfig& config, RunOptions options = {});

}  // namespace vertisim::scenario
