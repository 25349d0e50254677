#include "vertisim/scenario/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "vertisim/fleet/fleet_manager.hpp"
#include "vertisim/messages/topics.hpp"
#include "vertisim/mqtt/tcp.hpp"
#include "vertisim/scenario/node.hpp"
#include "vertisim/sim/vehicle.hpp"
#include "vertisim/uspace/uspace_services.hpp"
#include "vertisim/vertidrome/gateway.hpp"
#include "vertisim/vertidrome/manager.hpp"

namespace vertisim::scenario {

using nlohmann::json;

namespace {

constexpr SimTime kGraceMs = 2000;

SimTime ms(double seconds) { return static_cast<SimTime>(std::llround(seconds * 1000.0)); }

vertidrome::VertidromeConfig vertidrome_config(const ScenarioConfig& c, const VertidromeConfig& v, bool auto_ack) {
    vertidrome::VertidromeConfig out;
    out.id = v.id;
    out.name = v.name;
    for (const auto& p : v.pads) {
        vertidrome::Pad pad;
        pad.id = p.id;
        pad.label = p.label;
        pad.center = {p.east, p.north, v.elevation_m};
        pad.configured_mode = p.mode;
        if (p.approach_arc) {
            const auto& a = *p.approach_arc;
            // full circle: from == to means any direction
            pad.arc = a.to_deg - a.from_deg >= 360.0 ? vertidrome::ApproachArc{0, 0, a.radius_m}
                                                     : vertidrome::ApproachArc{a.from_deg, a.to_deg, a.radius_m};
        }
        out.pads.push_back(pad);
    }
    out.sector = {v.sector_radius_m, v.sector_height_m};
    out.weather = {v.wind_limit_mps, v.caution_mps, v.caution_factor};
    out.adherence = c.adherence;
    out.auto_ack = auto_ack;
    out.display = c.display();
    return out;
}

struct TimedScript {
    SimTime at = 0;
    const ScriptEntry* entry = nullptr;
};

std::string fleet_sender(const std::string& op) { return "fleet-" + op; }

}  // namespace

struct ScenarioRunner::Impl {
    ScenarioConfig config;
    RunOptions options;
    EventLog log;
    Tracks tracks;

    std::unique_ptr<mqtt::TcpBrokerServer> broker;
    std::unique_ptr<Bus> bus;

    std::unique_ptr<uspace::UspaceServices> uspace;
    std::vector<std::unique_ptr<vertidrome::VertidromeManager>> vertidromes;
    std::vector<std::unique_ptr<fleet::FleetManager>> fleets;
    std::vector<std::unique_ptr<sim::Vehicle>> vehicles;

    std::unique_ptr<Node> uspace_node;
    std::vector<std::unique_ptr<Node>> vertidrome_nodes;
    std::vector<std::unique_ptr<Node>> fleet_nodes;
    std::vector<std::unique_ptr<Node>> vehicle_nodes;
    std::map<std::string, std::unique_ptr<Node>> script_nodes;  // by sender

    std::unique_ptr<vertidrome::VsoGateway> gateway;
    vertidrome::VertidromeManager* gateway_manager = nullptr;

    std::vector<TimedScript> script;
    std::size_t next_script = 0;
    std::vector<WeatherEvent> weather;
    std::size_t next_weather = 0;

    std::map<std::string, std::set<std::string>> tracking;  // callsign -> sources seen
    std::set<std::string> tracking_active;
    std::vector<std::string> probe_requests;  // vertidromes whose retained status to probe
    int probes = 0;

    Impl(ScenarioConfig c, RunOptions o) : config(std::move(c)), options(std::move(o)) {}

    ~Impl() {
        // links before the bus, the bus before the broker
        script_nodes.clear();
        vehicle_nodes.clear();
        fleet_nodes.clear();
        vertidrome_nodes.clear();
        uspace_node.reset();
        bus.reset();
        if (gateway) gateway->stop();
        if (broker) broker->stop();
    }

    Node& script_node(const std::string& sender) {
        auto& n = script_nodes[sender];
        if (!n) n = std::make_unique<Node>(sender, bus->connect("script-" + sender));
        return *n;
    }

    void setup() {
        if (options.seed) config.seed = *options.seed;
        const bool auto_ack = options.auto_ack.value_or(config.auto_ack);

        if (options.transport == Transport::Tcp) {
            if (!options.external_broker) {
                broker = std::make_unique<mqtt::TcpBrokerServer>(options.broker_port, mqtt::BrokerOptions{},
                                                                 options.broker_host);
                broker->start();
                options.broker_port = broker->port();
            }
            bus = std::make_unique<TcpBus>(options.broker_host, options.broker_port);
        } else {
            bus = std::make_unique<SimBus>(mqtt::SimNetwork::Options{options.latency, {}});
        }

        log.on_record([this](const LogEntry& e) { observe(e); });

        uspace::UspaceConfig uc;
        uc.minima = config.separation;
        uc.adherence = config.adherence;
        for (const auto& v : config.vertidromes) uc.vertidromes.insert(v.id);
        uspace = std::make_unique<uspace::UspaceServices>(uc, log);
        uspace_node = std::make_unique<Node>(uspace::kUspaceId, bus->connect("uspace", status_will("uspace")));
        uspace_node->subscribe({topics::kRegistryRequest, topics::kFlightPlanRequest, "uspace/position/+",
                                topics::kEmergency, "vertidrome/+/decision"});

        for (const auto& v : config.vertidromes) {
            vertidromes.push_back(
                std::make_unique<vertidrome::VertidromeManager>(vertidrome_config(config, v, auto_ack), log));
            auto node = std::make_unique<Node>(v.id, bus->connect("vertidrome-" + v.id, status_will(v.id)));
            node->subscribe({topics::vertidrome(v.id, "request"), topics::vertidrome(v.id, "weather"),
                             topics::vertidrome(v.id, "gfmu"), topics::vertidrome(v.id, "padstatus"),
                             "uspace/position/+", "uspace/adherence/+", topics::kEmergency});
            vertidrome_nodes.push_back(std::move(node));
        }

        const auto world = world_map(config);
        std::vector<sim::KnownPad> known;
        for (const auto& v : config.vertidromes)
            for (const auto& p : v.pads) known.push_back({v.id, p.id, {p.east, p.north, v.elevation_m}});

        for (std::size_t i = 0; i < config.fleets.size(); ++i) {
            const auto& fc = config.fleets[i];
            fleet::FleetConfig cfg;
            cfg.operator_id = fc.operator_id;
            cfg.source = fleet_sender(fc.operator_id);
            cfg.planner.cruise_speed_mps = fc.cruise_speed_mps;
            cfg.planner.climb_rate_mps = fc.cruise_speed_mps;
            cfg.planner.cruise_altitude_m = fc.cruise_altitude_m;
            cfg.planner.clearance_m = fc.clearance_m;
            cfg.planner.grid_m = fc.grid_m;
            cfg.minima = config.separation;
            cfg.departure_lead_ms = ms(fc.departure_lead_s);
            cfg.takeoff_timeout_ms = ms(fc.takeoff_timeout_s);
            cfg.slot_lead_ms = ms(fc.slot_lead_s);
            cfg.slot_duration_ms = ms(fc.slot_duration_s);
            cfg.request_id_base = static_cast<std::int64_t>(i) * 1'000'000;

            std::vector<fleet::FlightSpec> specs;
            for (const auto& f : config.flights) {
                const auto v = std::find_if(config.vehicles.begin(), config.vehicles.end(),
                                            [&](const VehicleConfig& vc) { return vc.callsign == f.callsign; });
                if (v->operator_id != fc.operator_id) continue;
                fleet::FlightSpec s;
                s.callsign = f.callsign;
                s.serial = v->serial;
                s.aircraft_type = f.aircraft_type;
                s.priority = f.priority;
                s.origin_id = f.origin;
                s.start = v->start;
                s.destination = {f.destination, f.pad};
                s.alternates = f.alternates;
                s.file_at = ms(f.file_at_s);
                specs.push_back(s);
            }
            fleets.push_back(std::make_unique<fleet::FleetManager>(cfg, world, std::move(specs), log));
            auto node = std::make_unique<Node>(cfg.source, bus->connect(cfg.source, status_will(cfg.source)));
            node->subscribe({topics::kRegistryResponse, "uspace/flightplan/decision/+", "uspace/position/+",
                             "uspace/adherence/+", "vertidrome/+/padstatus", "vertidrome/+/decision",
                             "fleet/+/command"});
            fleet_nodes.push_back(std::move(node));
        }

        for (const auto& v : config.vehicles) {
            vehicles.push_back(std::make_unique<sim::Vehicle>(
                sim::VehicleSetup{v.callsign, v.profile, v.start, known, 20.0, 1.0}, log));
            auto node = std::make_unique<Node>(v.callsign, bus->connect("uas-" + v.callsign, status_will(v.callsign)));
            node->subscribe({topics::fleet_command(v.callsign)});
            vehicle_nodes.push_back(std::move(node));
        }

        std::mt19937_64 rng(config.seed);
        for (const auto& s : config.script) {
            double at = s.at_s;
            if (s.jitter_s > 0) at += std::uniform_real_distribution<double>(0.0, s.jitter_s)(rng);
            script.push_back({ms(at), &s});
        }
        std::stable_sort(script.begin(), script.end(), [](const auto& a, const auto& b) { return a.at < b.at; });
        weather = config.weather;
        std::stable_sort(weather.begin(), weather.end(), [](const auto& a, const auto& b) { return a.at_s < b.at_s; });

        if (options.gateway_port || options.gateway_recorder) {
            const auto& id = options.gateway_vertidrome.empty() ? config.vertidromes.front().id
                                                                : options.gateway_vertidrome;
            for (auto& m : vertidromes)
                if (m->id() == id) gateway_manager = m.get();
            if (gateway_manager == nullptr) throw ConfigError("gateway vertidrome '" + id + "' is not in the scenario");
            gateway = std::make_unique<vertidrome::VsoGateway>(
                vertidrome::VsoGateway::Options{options.gateway_port.value_or(0), "127.0.0.1"});
            if (options.gateway_recorder) gateway->set_recorder(options.gateway_recorder);
            gateway->start();
            gateway->publish(gateway_manager->ui_state(0));
            if (options.on_gateway_ready) options.on_gateway_ready(gateway->port());
        }
        bus->flush();
    }

    static std::optional<mqtt::Will> status_will(const std::string& who) {
        const std::string text = "offline";
        return mqtt::Will{"vertisim/status/" + who, mqtt::Bytes(text.begin(), text.end()), mqtt::QoS::AtLeastOnce,
                          true};
    }

    void observe(const LogEntry& e) {
        if (e.kind == "tracking-fleet" || e.kind == "tracking-vertidrome") {
            const auto cs = e.data.value("callsign", std::string{});
            auto& seen = tracking[cs];
            seen.insert(e.kind);
            if (seen.size() == 2 && tracking_active.insert(cs).second)
                log.record(e.time, "scenario", "tracking-active", {{"callsign", cs}});
        } else if (e.kind == "pad-closed") {
            probe_requests.push_back(e.source);
        }
    }

    void send_from(Node& node, Outbox outbox, SimTime now) { node.send(outbox, now); }

    void dispatch_vehicle(std::size_t i, const Envelope& env, SimTime now) {
        if (const auto* cmd = env.get_if<FleetCommand>()) {
            if (cmd->callsign == vehicles[i]->callsign()) vehicles[i]->handle_command(*cmd, now);
        }
    }

    void collect_vehicle(std::size_t i, SimTime now) {
        auto outbox = vehicles[i]->take_outbox();
        for (const auto& o : outbox) {
            if (const auto* r = std::get_if<PositionReport>(&o.body))
                tracks.add({r->timestamp, r->callsign, r->position, vehicles[i]->leg_label()});
        }
        vehicle_nodes[i]->send(outbox, now);
    }

    void pump(SimTime now) {
        for (int round = 0; round < 10000; ++round) {
            bus->flush();
            std::size_t handled = 0;
            for (const auto& env : uspace_node->receive()) {
                uspace->handle(env, now);
                ++handled;
            }
            uspace_node->send(uspace->take_outbox(), now);
            for (std::size_t i = 0; i < vertidromes.size(); ++i) {
                for (const auto& env : vertidrome_nodes[i]->receive()) {
                    if (env.sender == vertidrome_nodes[i]->sender()) continue;
                    vertidromes[i]->handle(env, now);
                    ++handled;
                }
                vertidrome_nodes[i]->send(vertidromes[i]->take_outbox(), now);
            }
            for (std::size_t i = 0; i < fleets.size(); ++i) {
                for (const auto& env : fleet_nodes[i]->receive()) {
                    if (env.type == MessageType::FleetCommand) continue;  // our own
                    fleets[i]->handle(env, now);
                    ++handled;
                }
                fleet_nodes[i]->send(fleets[i]->take_outbox(), now);
            }
            for (std::size_t i = 0; i < vehicles.size(); ++i) {
                for (const auto& env : vehicle_nodes[i]->receive()) {
                    dispatch_vehicle(i, env, now);
                    ++handled;
                }
                collect_vehicle(i, now);
            }
            if (handled == 0) return;
        }
        throw std::runtime_error("message storm: pump did not settle");
    }

    void apply_weather(SimTime now) {
        while (next_weather < weather.size() && ms(weather[next_weather].at_s) <= now) {
            const auto& w = weather[next_weather++];
            for (const auto& v : config.vertidromes) {
                if (w.vertidrome && *w.vertidrome != v.id) continue;
                script_node("wx-" + v.id)
                    .send(outgoing(WeatherReport{v.id, w.direction_deg, w.speed_mps, WeatherSource::LocalSensor}), now);
            }
            if (!w.vertidrome)
                for (auto& veh : vehicles) veh->set_wind(w.speed_mps);
        }
    }

    vertidrome::VertidromeManager* manager(const std::string& id) {
        for (auto& m : vertidromes)
            if (m->id() == id) return m.get();
        return nullptr;
    }

    void apply_script(SimTime now) {
        while (next_script < script.size() && script[next_script].at <= now) {
            const auto& e = *script[next_script++].entry;
            const auto& f = e.fields;
            const auto vd = f.value("vertidrome", config.vertidromes.front().id);
            if (e.kind == "detection") {
                sim::Detection d;
                d.at = now;
                d.reporter = f.value("reporter", std::string("sensor-" + vd));
                d.kind = *enum_from_string<EmergencyKind>(f.value("detection", std::string("PersonOnPad")));
                d.vertidrome = vd;
                if (f.contains("pad")) d.pad = f.at("pad").get<std::string>();
                d.detail = f.value("detail", std::string{});
                const auto report = sim::scripted_detection(d, log);
                script_node(d.reporter).send(outgoing(report), now);
            } else if (e.kind == "ems_demand") {
                const SimTime start = f.contains("slot_start_s") ? ms(f.at("slot_start_s").get<double>()) : now + 30000;
                const SimTime end = start + ms(f.value("duration_s", 60.0));
                uspace->place_ems_demand(vd, f.value("pad", std::string{}), f.value("callsign", std::string("EMS1")),
                                         start, end, now);
                uspace_node->send(uspace->take_outbox(), now);
            } else if (e.kind == "vso") {
                auto* m = manager(vd);
                try {
                    const auto cmd = vertidrome::parse_vso_command(f.at("command"));
                    const auto result = m->command(cmd, now);
                    if (!result.ok)
                        log.record(now, "scenario", "vso-script-rejected",
                                   {{"command", f.at("command")}, {"reason", result.reason}});
                } catch (const vertidrome::CommandError& err) {
                    log.record(now, "scenario", "vso-script-rejected",
                               {{"command", f.at("command")}, {"reason", err.what()}});
                }
                send_vertidrome(*m, now);
            } else if (e.kind == "gfmu") {
                script_node("gfmu-" + vd).send(outgoing(GfmuPreference{vd, f.value("pad", std::string{})}), now);
            } else if (e.kind == "infra") {
                script_node("infra-" + vd)
                    .send(outgoing(InfrastructureHealth{vd, f.value("component", std::string("lighting")),
                                                        f.value("healthy", false), f.value("detail", std::string{})}),
                          now);
            }
        }
    }

    void send_vertidrome(vertidrome::VertidromeManager& m, SimTime now) {
        for (std::size_t i = 0; i < vertidromes.size(); ++i)
            if (vertidromes[i].get() == &m) vertidrome_nodes[i]->send(m.take_outbox(), now);
    }

    void gateway_commands(SimTime now) {
        if (!gateway) return;
        for (const auto& c : gateway->take_commands()) {
            const auto result = gateway_manager->command(c.command, now);
            gateway->reply(c, result);
        }
        send_vertidrome(*gateway_manager, now);
    }

    /// A fresh session subscribing after the fact must get the retained pad status.
    void run_probes(SimTime now) {
        for (const auto& vd : std::exchange(probe_requests, {})) {
            auto link = bus->connect("late-subscriber-" + std::to_string(++probes));
            const auto topic = topics::vertidrome(vd, "padstatus");
            link->subscribe(topic, mqtt::QoS::AtLeastOnce);
            bus->flush();
            json seen = json::array();
            for (const auto& m : link->drain()) {
                try {
                    const auto env = parse(m.payload);
                    if (const auto* n = env.get_if<PadStatusNotice>())
                        seen.push_back({{"pad", n->pad}, {"status", to_string(n->status)}, {"retain", m.retain}});
                } catch (const ParseError&) {
                }
            }
            log.record(now, "scenario", "retained-probe", {{"topic", topic}, {"notices", seen}});
            link->close();
            bus->flush();
        }
    }

    bool all_terminal() const {
        return std::all_of(fleets.begin(), fleets.end(), [](const auto& f) { return f->all_terminal(); });
    }

    RunResult run() {
        const auto wall_start = std::chrono::steady_clock::now();
        setup();
        SimTime now = 0;
        const SimTime timeout = ms(config.timeout_s);
        log.record(now, "scenario", "scenario-start", {{"name", config.name}, {"seed", config.seed}});

        for (std::size_t i = 0; i < vertidromes.size(); ++i) {
            vertidromes[i]->start(now);
            vertidrome_nodes[i]->send(vertidromes[i]->take_outbox(), now);
        }
        for (std::size_t i = 0; i < fleets.size(); ++i) {
            fleets[i]->start(now);
            fleet_nodes[i]->send(fleets[i]->take_outbox(), now);
        }
        pump(now);  // registrations complete before the first tick

        RunResult result;
        std::optional<SimTime> done_at;
        for (;;) {
            bus->advance_to(now);
            apply_weather(now);
            apply_script(now);
            gateway_commands(now);
            for (std::size_t i = 0; i < vehicles.size(); ++i) {
                vehicles[i]->advance(now);
                collect_vehicle(i, now);
            }
            for (std::size_t i = 0; i < fleets.size(); ++i) {
                fleets[i]->tick(now);
                fleet_nodes[i]->send(fleets[i]->take_outbox(), now);
            }
            for (std::size_t i = 0; i < vertidromes.size(); ++i) {
                vertidromes[i]->tick(now);
                vertidrome_nodes[i]->send(vertidromes[i]->take_outbox(), now);
            }
            pump(now);
            run_probes(now);
            if (gateway) gateway->publish(gateway_manager->ui_state(now));
            if (options.on_tick) options.on_tick(now);

            if (!config.flights.empty() && all_terminal() && !done_at) done_at = now;
            if (done_at && now >= *done_at + kGraceMs) break;
            if (now >= timeout) {
                result.timed_out = true;
                log.record(now, "scenario", "scenario-timeout", {});
                break;
            }
            now += config.tick_ms;
            if (options.speedup > 0) {
                const auto due = wall_start + std::chrono::microseconds(
                                                  static_cast<std::int64_t>(now * 1000.0 / options.speedup));
                std::this_thread::sleep_until(due);
            }
        }

        json states = json::object();
        for (const auto& f : fleets)
            for (const auto& fl : f->flights()) {
                result.final_states[fl.spec.callsign] = std::string(fleet::to_string(fl.state));
                states[fl.spec.callsign] = result.final_states[fl.spec.callsign];
            }
        log.record(now, "scenario", "scenario-end", {{"states", states}, {"timed_out", result.timed_out}});

        result.name = config.name;
        result.end_time = now;
        result.tracks = tracks;
        result.log = log.detached();
        result.sequence = assert_sequence(result.log, config.expect.sequence, config.expect.forbidden);
        if (config.expect.landing) result.landing = check_landing(*config.expect.landing);
        result.parse_errors = uspace_node->parse_errors();
        for (const auto* group : {&vertidrome_nodes, &fleet_nodes, &vehicle_nodes})
            for (const auto& n : *group) result.parse_errors += n->parse_errors();
        if (gateway) result.gateway_port = gateway->port();
        result.wall_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
        return result;
    }

    LandingResult check_landing(const LandingExpectation& x) const {
        LandingResult r;
        for (const auto& e : log.entries()) {
            if (!r.takeoff && e.kind == "takeoff" && e.source == x.callsign) r.takeoff = e.time;
            if (!r.landed && e.data.value("callsign", std::string{}) == x.callsign &&
                (e.kind == "landed-within-slot" || e.kind == "landed-outside-slot" || e.kind == "landed-at-alternate")) {
                r.landed = e.time;
                r.vertidrome = e.data.value("vertidrome", std::string{});
                r.pad = e.data.value("pad", std::string{});
            }
        }
        std::ostringstream why;
        if (!r.takeoff || !r.landed) {
            why << x.callsign << (r.takeoff ? " never landed" : " never took off");
            r.detail = why.str();
            return r;
        }
        r.ok = true;
        if (r.vertidrome != x.vertidrome || r.pad != x.pad) {
            r.ok = false;
            why << "landed at " << r.vertidrome << "/" << r.pad << ", expected " << x.vertidrome << "/" << x.pad << "; ";
        }
        const double flown = static_cast<double>(*r.landed - *r.takeoff) / 1000.0;
        if (x.after_takeoff_s && std::abs(flown - *x.after_takeoff_s) > x.tolerance_s) {
            r.ok = false;
            why << "landed " << flown << " s after take-off, expected " << *x.after_takeoff_s << " +- "
                << x.tolerance_s << " s; ";
        }
        if (x.within_slot) {
            bool inside = false;
            for (const auto& f : fleets) {
                const auto* fl = f->flight(x.callsign);
                if (fl && fl->authorisation)
                    inside = *r.landed >= fl->authorisation->slot_start && *r.landed <= fl->authorisation->slot_end;
            }
            if (!inside) {
                r.ok = false;
                why << "landing outside the approved slot; ";
            }
        }
        if (r.ok) why << "landed at " << r.pad << " " << flown << " s after take-off";
        r.detail = why.str();
        return r;
    }
};

ScenarioRunner::ScenarioRunner(ScenarioConfig config, RunOptions options)
    : impl_(std::make_unique<Impl>(std::move(config), std::move(options))) {}

ScenarioRunner::~ScenarioRunner() = default;

RunResult ScenarioRunner::run() { return impl_->run(); }

const ScenarioConfig& ScenarioRunner::config() const { return impl_->config; }

bool RunResult::passed() const { return !timed_out && sequence.ok && (!landing || landing->ok) && parse_errors == 0; }

std::string RunResult::summary() const {
    std::ostringstream out;
    out << name << ": " << (passed() ? "PASS" : "FAIL") << "\n  " << sequence.message();
    if (landing) out << "\n  landing: " << landing->detail;
    if (timed_out) out << "\n  timed out at " << end_time / 1000.0 << " s";
    if (parse_errors) out << "\n  " << parse_errors << " unparseable messages";
    for (const auto& [cs, s] : final_states) out << "\n  " << cs << ": " << s;
    out << "\n  sim " << end_time / 1000.0 << " s, wall " << wall_seconds << " s";
    return out.str();
}

RunResult run_scenario(const ScenarioConfig& config, RunOptions options) {
    ScenarioRunner runner(config, std::move(options));
    return runner.run();
}

}  // namespace vertisim::scenario
