#include <atomic>
#include <csignal>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

#include "CLI11.hpp"
#include "vertisim/mqtt/tcp.hpp"
#include "vertisim/scenario/runner.hpp"
#include "vertisim/scenario/vso_operator.hpp"

using namespace vertisim;

namespace {

std::atomic<bool> interrupted{false};

void on_signal(int) { interrupted = true; }

struct RunArgs {
    std::string scenario;
    std::string log;
    std::string tracks;
    std::string gateway_log;
    std::string broker_host = "127.0.0.1";
    std::uint16_t broker_port = 0;
    std::optional<std::uint16_t> gateway_port;
    bool tcp = false;
    bool external = false;
    bool auto_ack = false;
    bool person_in_loop = false;
    bool scripted_vso = false;
    bool quiet = false;
    double speedup = 0.0;
    std::optional<std::uint64_t> seed;
};

int run_scenario(const RunArgs& a) {
    const auto config = scenario::load_scenario(a.scenario);

    scenario::RunOptions options;
    options.transport = a.tcp || a.external ? scenario::Transport::Tcp : scenario::Transport::InProcess;
    options.broker_host = a.broker_host;
    options.broker_port = a.broker_port;
    options.external_broker = a.external;
    options.gateway_port = a.gateway_port;
    if (a.auto_ack) options.auto_ack = true;
    if (a.person_in_loop) options.auto_ack = false;
    options.seed = a.seed;
    options.speedup = a.speedup;
    options.on_tick = [](SimTime) {
        if (interrupted) throw std::runtime_error("interrupted");
    };

    std::ofstream gateway_log;
    if (!a.gateway_log.empty()) {
        gateway_log.open(a.gateway_log);
        if (!gateway_log) throw std::runtime_error("cannot write " + a.gateway_log);
        options.gateway_recorder = [&gateway_log](const nlohmann::json& e) { gateway_log << e.dump() << '\n'; };
    }

    std::unique_ptr<scenario::ScriptedOperator> vso;
    if (a.scripted_vso) {
        if (!options.gateway_port) options.gateway_port = 0;
        options.on_gateway_ready = [&vso](std::uint16_t port) {
            vso = std::make_unique<scenario::ScriptedOperator>("127.0.0.1", port);
            vso->start();
        };
    }
    if (options.gateway_port && !a.quiet) {
        auto user = options.on_gateway_ready;
        options.on_gateway_ready = [user](std::uint16_t port) {
            std::cerr << "VSO gateway on ws://127.0.0.1:" << port << "/" << std::endl;
            if (user) user(port);
        };
    }

    const auto result = scenario::run_scenario(config, options);
    if (vso) vso->stop();

    if (!a.log.empty()) {
        std::ofstream out(a.log);
        result.log.write_jsonl(out);
    }
    if (!a.tracks.empty()) {
        std::ofstream out(a.tracks);
        result.tracks.write_csv(out);
    }
    if (!a.quiet) std::cout << result.summary() << std::endl;
    return result.passed() ? 0 : 1;
}

int run_broker(std::uint16_t port, const std::string& bind) {
    mqtt::TcpBrokerServer server(port, {}, bind);
    std::cerr << "MQTT broker listening on " << bind << ":" << server.port() << std::endl;
    server.start();
    while (!interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(100));
    server.stop();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Vertidrome airside simulation"};
    app.require_subcommand(1);

    RunArgs a;
    auto* run = app.add_subcommand("run", "Run a scenario file");
    run->add_option("scenario", a.scenario, "Scenario JSON")->required()->check(CLI::ExistingFile);
    run->add_flag("--tcp", a.tcp, "MQTT over TCP against an embedded broker");
    run->add_option("--broker-host", a.broker_host, "Broker host");
    run->add_option("--broker-port", a.broker_port, "Broker port (0 = any free port for the embedded broker)");
    run->add_flag("--external-broker", a.external, "Use the broker at --broker-host/--broker-port (implies --tcp)");
    run->add_option("--gateway-port", a.gateway_port, "Serve the VSO WebSocket gateway (0 = any free port)");
    auto* ack = run->add_flag("--auto-ack", a.auto_ack, "Decide slot requests without the operator");
    auto* pil = run->add_flag("--person-in-loop", a.person_in_loop, "Hold slot decisions for VSO approval");
    ack->excludes(pil);
    run->add_flag("--scripted-vso", a.scripted_vso, "Attach a scripted operator that approves every request");
    run->add_option("--speedup", a.speedup, "Sim seconds per wall second (0 = unpaced)")->check(CLI::NonNegativeNumber);
    run->add_option("--seed", a.seed, "Override the scenario seed");
    run->add_option("--log", a.log, "Write the event log as JSON lines");
    run->add_option("--export-tracks", a.tracks, "Write flown tracks as CSV");
    run->add_option("--gateway-log", a.gateway_log, "Write every gateway snapshot/update as JSON lines");
    run->add_flag("-q,--quiet", a.quiet, "Suppress the summary");

    auto* broker = app.add_subcommand("broker", "Run the MQTT 3.1.1 broker");
    std::uint16_t port = 1883;
    std::string bind = "127.0.0.1";
    broker->add_option("--port", port, "Listen port (0 = any)");
    broker->add_option("--bind", bind, "Bind address");

    CLI11_PARSE(app, argc, argv);
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);

    try {
        if (*run) return run_scenario(a);
        if (*broker) return run_broker(port, bind);
    } catch (const scenario::ConfigError& e) {
        std::cerr << "scenario error: " << e.what() << std::endl;
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << std::endl;
        return 3;
    }
    return 0;
}
