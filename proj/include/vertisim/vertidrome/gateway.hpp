#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "json.hpp"
#include "vertisim/vertidrome/vso_command.hpp"

namespace vertisim::vertidrome {

struct GatewayCommand {
    std::uint64_t session = 0;
    nlohmann::json id;  // echoed in the result
    VsoCommand command;
};

/// WebSocket endpoint for the VSO console. Sends a full snapshot on connect,
/// then "update" events carrying the panels that changed; accepts "command"
/// objects and answers each with a "command_result". Runs on its own thread;
/// publish/take_commands/reply are called from the simulation loop.
class VsoGateway {
public:
    struct Options {
        std::uint16_t port = 8080;  // 0 picks a free port
        std::string bind = "127.0.0.1";
    };

    explicit VsoGateway(Options options);
    ~VsoGateway();
    VsoGateway(const VsoGateway&) = delete;
    VsoGateway& operator=(const VsoGateway&) = delete;

    void start();
    void stop();
    std::uint16_t port() const;
    std::size_t session_count() const;

    /// New authoritative state. Diffs against the previous one and broadcasts.
    void publish(const nlohmann::json& state);

    /// Valid commands received since the last call, in arrival order.
    /// Malformed ones were already answered with ok=false.
    std::vector<GatewayCommand> take_commands();
    void reply(const GatewayCommand& cmd, const CommandResult& result);

    /// Called (on the publishing thread) with every snapshot/update event
    /// the gateway derives, independent of connected sessions.
    void set_recorder(std::function<void(const nlohmann::json&)> recorder);

    /// Event builders, shared with tests and the scripted operator.
    static nlohmann::json snapshot_event(std::uint64_t seq, const nlohmann::json& state);
    static nlohmann::json update_event(std::uint64_t seq, const nlohmann::json& before, const nlohmann::json& after);
    static nlohmann::json result_event(const nlohmann::json& id, const CommandResult& result);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace vertisim::vertidrome
