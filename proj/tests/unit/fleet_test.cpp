#include <random>

#include "doctest.h"
#include "oracles/conflict_oracle.hpp"
#include "oracles/geometry_oracle.hpp"
#include "vertisim/fleet/deconflict.hpp"
#include "vertisim/fleet/fleet_manager.hpp"
#include "vertisim/fleet/route_planner.hpp"

using namespace vertisim;
using namespace vertisim::fleet;

namespace {

std::vector<Point2> square(double e, double n, double half) {
    return {{e - half, n - half}, {e + half, n - half}, {e + half, n + half}, {e - half, n + half}};
}

PadSite site(const std::string& vd, const std::string& pad, double e, double n) {
    return {{vd, pad}, {e, n, 0}, std::nullopt};
}

template <class T>
std::vector<T> bodies(const Outbox& out) {
    std::vector<T> v;
    for (const auto& o : out) {
        if (const auto* b = std::get_if<T>(&o.body)) v.push_back(*b);
    }
    return v;
}

std::vector<FleetCommand> commands(const Outbox& out, CommandKind kind) {
    std::vector<FleetCommand> v;
    for (const auto& c : bodies<FleetCommand>(out)) {
        if (c.command == kind) v.push_back(c);
    }
    return v;
}

Envelope env(const std::string& sender, Body body) {
    Envelope e;
    e.type = default_type(body);
    e.sender = sender;
    e.body = std::move(body);
    return e;
}

struct Recorder : EventSink {
    std::vector<std::string> kinds;
    void record(SimTime, const std::string&, const std::string& kind, nlohmann::json) override { kinds.push_back(kind); }
    bool has(const std::string& k) const { return std::find(kinds.begin(), kinds.end(), k) != kinds.end(); }
};

WorldMap demo_world() {
    WorldMap w;
    w.add_pad(site("VD_A", "PAD1", 0, 0));
    w.add_pad(site("VD_A", "PAD2", 30, 0));
    w.add_pad(site("VD_B", "MS1", -200, -150));
    return w;
}

FlightSpec uav(const std::string& cs, std::vector<PadRef> alternates = {{"VD_B", "MS1"}}) {
    FlightSpec s;
    s.callsign = cs;
    s.serial = "SN-" + cs;
    s.start = {0, 300, 0};
    s.destination = {"VD_A", "PAD1"};
    s.alternates = std::move(alternates);
    return s;
}

FlightAuthorisation approve(const FlightPlan& p, std::string pad = "") {
    return {p.callsign, p.request_id, AuthVerdict::Approved, "", p.destination,
            pad.empty() ? p.requested_pad : pad, p.slot_start, p.slot_end};
}

// drives one flight to Active at 5 s
struct Harness {
    Recorder events;
    FleetManager fm;
    explicit Harness(std::vector<FlightSpec> specs = {uav("UAV1")}) : fm({}, demo_world(), std::move(specs), events) {
        fm.start(0);
        for (const auto& r : bodies<RegistrationRequest>(fm.take_outbox())) {
            fm.handle(env("uspace", RegistrationResponse{r.operator_id, r.serial, r.callsign, true, "UAS-" + r.callsign}), 0);
        }
    }
    FlightPlan file(SimTime now = 0) {
        fm.tick(now);
        const auto plans = bodies<FlightPlan>(fm.take_outbox());
        REQUIRE(plans.size() == 1);
        return plans[0];
    }
    FlightPlan activate() {
        const auto plan = file();
        fm.handle(env("uspace", approve(plan)), 0);
        fm.tick(5000);
        fm.take_outbox();
        fm.handle(env("uspace", PositionReport{"UAV1", {0, 300, 1}, 2, 5500}), 5500);
        fm.take_outbox();
        return plan;
    }
};

}  // namespace

TEST_CASE("plan_route without geofences is the direct climb-cruise-descent") {
    WorldMap w;
    const auto pad = site("VD", "P", 0, 0);
    w.add_pad(pad);
    const auto route = plan_route({0, 360, 0}, pad, 5000, w, {});
    REQUIRE(route.size() == 4);
    CHECK(plan_horizontal({0, 360}, {0, 0}, w, {}).size() == 2);
    CHECK(route[0].eta == 5000);
    CHECK(route[1].position == Vec3{0, 360, 30});
    CHECK(route[2].eta - route[1].eta == 180000);
    CHECK(route[3].position == pad.center);

    // 300 m leg + 30 m climb + 30 m descent: 180 s door to door
    const auto demo = plan_route({0, 300, 0}, pad, 5000, w, {});
    CHECK(demo.back().eta - demo.front().eta == 180000);
}

TEST_CASE("plan_route avoids a blocking geofence") {
    WorldMap w;
    w.add_geofence({"park", square(0, 150, 40)});
    const auto pad = site("VD", "P", 0, 0);
    w.add_pad(pad);
    const auto route = plan_route({0, 300, 0}, pad, 0, w, {});
    const auto path = oracle::horizontal(route);
    CHECK(oracle::polyline_clear(path, w));
    CHECK(oracle::polyline_length(path) > 300.0);
    for (std::size_t i = 1; i + 1 < path.size(); ++i) {
        CHECK(w.clearance(path[i]) >= 2.0 - 1e-9);
    }
    // ETA differences follow segment length / speed
    for (std::size_t i = 1; i < route.size(); ++i) {
        const double len = distance(route[i].position, route[i - 1].position);
        const double dt = static_cast<double>(route[i].eta - route[i - 1].eta) / 1000.0;
        CHECK(dt == doctest::Approx(len / 2.0).epsilon(0.01));
    }
}

TEST_CASE("planning errors") {
    WorldMap w;
    w.add_geofence({"park", square(0, 0, 10)});
    CHECK_THROWS_AS(plan_route({0, 100, 0}, site("VD", "P", 0, 0), 0, w, {}), PlanningError);
    CHECK_THROWS_AS(plan_route({0, 0, 0}, site("VD", "P", 0, 100), 0, w, {}), PlanningError);
    // destination enclosed by a ring of fences
    WorldMap ring;
    ring.add_geofence({"n", {{-30, 20}, {30, 20}, {30, 30}, {-30, 30}}});
    ring.add_geofence({"s", {{-30, -30}, {30, -30}, {30, -20}, {-30, -20}}});
    ring.add_geofence({"e", {{20, -30}, {30, -30}, {30, 30}, {20, 30}}});
    ring.add_geofence({"w", {{-30, -30}, {-20, -30}, {-20, 30}, {-30, 30}}});
    CHECK_THROWS_AS(plan_route({0, 100, 0}, site("VD", "P", 0, 0), 0, ring, {}), PlanningError);
    CHECK_THROWS_AS(w.add_pad(site("VD", "Q", 1, 1)), WorldError);
    CHECK_THROWS_AS(w.add_geofence({"bow", {{0, 0}, {10, 10}, {10, 0}, {0, 10}}}), WorldError);
}

TEST_CASE("approach arc is respected") {
    WorldMap w;
    PadSite pad{{"VD", "P"}, {0, 0, 0}, Arc{90, 180, 20}};
    w.add_pad(pad);
    const auto path = oracle::horizontal(plan_route({0, 300, 0}, pad, 0, w, {}));
    REQUIRE(path.size() >= 3);
    const auto before = path[path.size() - 2];
    CHECK(pad.arc->contains(bearing_deg({0, 0}, before) + 1e-9));
    CHECK(std::hypot(before.east, before.north) == doctest::Approx(20.0));
    // origin already inside the arc: straight in
    const auto direct = oracle::horizontal(plan_route({200, -200, 0}, pad, 0, w, {}));
    CHECK(direct.size() == 2);
}

TEST_CASE("planned routes clear random geofences") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> coord(-100, 100), half(5, 25);
    int planned = 0;
    for (int trial = 0; trial < 60; ++trial) {
        WorldMap w;
        const int n = 1 + trial % 3;
        for (int i = 0; i < n; ++i) w.add_geofence({"g" + std::to_string(i), square(coord(rng), coord(rng), half(rng))});
        Point2 a{coord(rng), coord(rng)}, b{coord(rng), coord(rng)};
        if (w.inside_geofence(a) || w.inside_geofence(b)) continue;
        try {
            const auto path = plan_horizontal(a, b, w, {});
            ++planned;
            CHECK(oracle::polyline_clear(path, w));
            CHECK(path.front() == a);
            CHECK(path.back() == b);
        } catch (const PlanningError&) {
            // squares never enclose a free region here, so a failure is a bug
            FAIL("no path in trial " << trial);
        }
    }
    CHECK(planned > 30);
}

TEST_CASE("strategic self-deconfliction") {
    WorldMap w;
    const auto pad = site("VD", "P", 0, 0);
    FlightPlan base;
    base.callsign = "A";
    base.waypoints = plan_route({0, 300, 0}, pad, 0, w, {});
    base.slot_start = 1;
    base.slot_end = 2;
    uspace::SeparationMinima minima;

    SUBCASE("identical routes") {
        // a trailing copy stays inside the temporal window at one interval; two are needed
        std::vector<FlightPlan> plans{base, base};
        plans[1].callsign = "B";
        const auto d = strategic_self_deconflict(plans, minima);
        CHECK(d == std::vector<SimTime>{0, 2 * minima.temporal_ms});
        CHECK_FALSE(oracle::conflict(plans[0].waypoints, plans[1].waypoints, minima));
        CHECK(plans[1].waypoints[1].position == base.waypoints[1].position);
    }
    SUBCASE("disjoint routes") {
        std::vector<FlightPlan> plans{base, base};
        for (auto& wp : plans[1].waypoints) wp.position.east += 500;
        CHECK(strategic_self_deconflict(plans, minima) == std::vector<SimTime>{0, 0});
    }
    SUBCASE("three flights on one corridor") {
        std::vector<FlightPlan> plans{base, base, base};
        strategic_self_deconflict(plans, minima);
        for (int i = 0; i < 3; ++i) {
            for (int j = i + 1; j < 3; ++j) CHECK_FALSE(oracle::conflict(plans[i].waypoints, plans[j].waypoints, minima));
        }
    }
    SUBCASE("random sets") {
        std::mt19937 rng(8);
        for (int t = 0; t < 100; ++t) {
            std::vector<FlightPlan> plans;
            for (int i = 0; i < 4; ++i) plans.push_back(oracle::random_plan(rng, "U" + std::to_string(i), i + 1));
            const auto before = plans;
            const auto delays = strategic_self_deconflict(plans, minima);
            for (std::size_t i = 0; i < plans.size(); ++i) {
                CHECK(delays[i] % minima.temporal_ms == 0);
                for (std::size_t j = i + 1; j < plans.size(); ++j) {
                    CHECK_FALSE(oracle::conflict(plans[i].waypoints, plans[j].waypoints, minima));
                }
                // minimal: one step less still conflicts
                if (delays[i] > 0) {
                    const auto earlier = shifted(before[i], delays[i] - minima.temporal_ms);
                    bool conflicts = false;
                    for (std::size_t j = 0; j < i; ++j) conflicts |= oracle::conflict(earlier.waypoints, plans[j].waypoints, minima);
                    CHECK(conflicts);
                }
            }
        }
    }
}

TEST_CASE("fleet: nominal lifecycle") {
    Harness h;
    const auto plan = h.file();
    CHECK(h.fm.flight("UAV1")->state == FlightState::Filed);
    CHECK(plan.slot_start == 170000);
    CHECK(plan.slot_end == 230000);
    CHECK(plan.waypoints.front().eta == 5000);
    CHECK(plan.waypoints.back().eta == 185000);
    CHECK(plan.requested_pad == "PAD1");

    SUBCASE("take-off waits for approval") {
        h.fm.tick(6000);
        CHECK(commands(h.fm.take_outbox(), CommandKind::TakeOff).empty());
        CHECK(h.fm.flight("UAV1")->state == FlightState::Filed);
    }
    SUBCASE("approved, active, landed") {
        h.fm.handle(env("uspace", approve(plan)), 10);
        CHECK(h.fm.flight("UAV1")->state == FlightState::Approved);
        h.fm.tick(4900);
        CHECK(h.fm.take_outbox().empty());
        h.fm.tick(5000);
        auto out = h.fm.take_outbox();
        CHECK(commands(out, CommandKind::TakeOff).size() == 1);
        CHECK(commands(out, CommandKind::UploadRoute).size() == 1);
        CHECK(bodies<FlightStatus>(out).empty());
        CHECK(h.fm.flight("UAV1")->state == FlightState::Approved);

        // raw vehicle reports do not count
        h.fm.handle(env("UAV1", PositionReport{"UAV1", {0, 300, 1}, 0, 5500}), 5500);
        CHECK(h.fm.flight("UAV1")->state == FlightState::Approved);
        // the first relayed report activates the plan
        h.fm.handle(env("uspace", PositionReport{"UAV1", {0, 300, 1}, 0, 5500}), 5500);
        CHECK(h.fm.flight("UAV1")->state == FlightState::Active);
        CHECK(bodies<FlightStatus>(h.fm.take_outbox()).at(0).status == FlightStatusKind::Activate);
        CHECK(h.events.has("tracking-fleet"));
        h.fm.handle(env("uspace", PositionReport{"UAV1", {0.2, 0.1, 0}, 0, 185000}), 185000);
        CHECK(h.fm.flight("UAV1")->state == FlightState::Landed);
        CHECK(h.events.has("landed-within-slot"));
        out = h.fm.take_outbox();
        CHECK(bodies<FlightStatus>(out).at(0).status == FlightStatusKind::Conclude);
        CHECK(h.fm.all_terminal());
    }
    SUBCASE("denied stays planned with the reason") {
        h.fm.handle(env("uspace", FlightAuthorisation{"UAV1", plan.request_id, AuthVerdict::Denied, "vertidrome rejected: no slot"}), 10);
        CHECK(h.fm.flight("UAV1")->state == FlightState::Planned);
        CHECK(h.fm.flight("UAV1")->reason == "vertidrome rejected: no slot");
        h.fm.tick(1000);
        CHECK(bodies<FlightPlan>(h.fm.take_outbox()).empty());
    }
    SUBCASE("authorisation for another request is ignored") {
        auto a = approve(plan);
        a.request_id += 100;
        h.fm.handle(env("uspace", a), 10);
        CHECK(h.fm.flight("UAV1")->state == FlightState::Filed);
    }
}

TEST_CASE("fleet: take-off refused leads to cancellation") {
    Harness h;
    const auto plan = h.file();
    h.fm.handle(env("uspace", approve(plan)), 0);
    h.fm.tick(5000);
    h.fm.take_outbox();
    h.fm.tick(9900);
    CHECK(h.fm.flight("UAV1")->state == FlightState::Approved);
    h.fm.tick(10000);
    const auto out = h.fm.take_outbox();
    CHECK(h.fm.flight("UAV1")->state == FlightState::Cancelled);
    CHECK(bodies<FlightStatus>(out).at(0).status == FlightStatusKind::Cancel);
    CHECK(bodies<SlotCancel>(out).at(0).request_id == plan.request_id);
    CHECK(h.events.has("flight-cancelled"));
}

TEST_CASE("fleet: pad closure reroute") {
    Harness h;
    const auto plan = h.activate();
    h.fm.handle(env("uspace", PositionReport{"UAV1", {0, 220, 30}, 0, 60000}), 60000);

    SUBCASE("closure of another pad is ignored") {
        h.fm.handle(env("VD_A", PadStatusNotice{"VD_A", "PAD2", PadStatus::CLOSED, PadMode::NONE}), 60000);
        CHECK(h.fm.take_outbox().empty());
        CHECK(h.fm.flight("UAV1")->state == FlightState::Active);
    }
    SUBCASE("alternate filed, approved, landed at") {
        h.fm.handle(env("VD_A", PadStatusNotice{"VD_A", "PAD1", PadStatus::CLOSED, PadMode::NONE,
                                                ClosureCause::ForeignObject}),
                    60000);
        auto out = h.fm.take_outbox();
        CHECK(commands(out, CommandKind::Hold).size() == 1);
        const auto alt = bodies<FlightPlan>(out);
        REQUIRE(alt.size() == 1);
        CHECK(alt[0].destination == "VD_B");
        CHECK(alt[0].requested_pad == "MS1");
        CHECK(alt[0].supersedes == plan.request_id);
        CHECK(alt[0].waypoints.front().position == Vec3{0, 220, 30});
        CHECK(alt[0].waypoints.front().eta == 65000);
        CHECK(h.fm.flight("UAV1")->state == FlightState::Rerouting);
        CHECK(h.events.has("closure-received-by-fleet"));
        CHECK(h.events.has("alternate-filed"));

        // the displacement that follows the closure changes nothing
        h.fm.handle(env("VD_A", SlotDisplaced{"VD_A", "UAV1", plan.request_id, "PAD1", "pad closed"}), 60000);
        CHECK(h.fm.take_outbox().empty());

        h.fm.handle(env("uspace", approve(alt[0])), 60100);
        out = h.fm.take_outbox();
        REQUIRE(commands(out, CommandKind::UploadRoute).size() == 1);
        CHECK(commands(out, CommandKind::UploadRoute)[0].waypoints == alt[0].waypoints);
        REQUIRE(bodies<SlotCancel>(out).size() == 1);
        CHECK(bodies<SlotCancel>(out)[0].request_id == plan.request_id);
        CHECK(bodies<SlotCancel>(out)[0].vertidrome == "VD_A");
        CHECK(h.fm.flight("UAV1")->state == FlightState::Active);
        CHECK(h.fm.flight("UAV1")->leg == 1);

        h.fm.handle(env("uspace", PositionReport{"UAV1", {-200, -150, 0}, 0, 300000}), 300000);
        CHECK(h.fm.flight("UAV1")->state == FlightState::Landed);
        CHECK(h.events.has("landed-at-alternate"));
    }
    SUBCASE("no alternate left declares distress") {
        h.fm.handle(env("VD_B", PadStatusNotice{"VD_B", "MS1", PadStatus::CLOSED, PadMode::NONE}), 59000);
        h.fm.take_outbox();
        h.fm.handle(env("VD_A", PadStatusNotice{"VD_A", "PAD1", PadStatus::CLOSED, PadMode::NONE}), 60000);
        const auto out = h.fm.take_outbox();
        const auto e = bodies<EmergencyReport>(out);
        REQUIRE(e.size() == 1);
        CHECK(e[0].kind == EmergencyKind::VehicleDistress);
        CHECK(e[0].reporter == "UAV1");
        CHECK(h.fm.flight("UAV1")->distress);
    }
    SUBCASE("denied alternate falls through to distress") {
        h.fm.handle(env("VD_A", PadStatusNotice{"VD_A", "PAD1", PadStatus::CLOSED, PadMode::NONE}), 60000);
        const auto alt = bodies<FlightPlan>(h.fm.take_outbox()).at(0);
        h.fm.handle(env("uspace", FlightAuthorisation{"UAV1", alt.request_id, AuthVerdict::Denied, "no slot"}), 60100);
        CHECK(bodies<EmergencyReport>(h.fm.take_outbox()).size() == 1);
    }
}

TEST_CASE("fleet: vertidrome assigns a different pad") {
    Harness h;
    const auto plan = h.file();
    h.fm.handle(env("uspace", approve(plan, "PAD2")), 10);
    const auto out = h.fm.take_outbox();
    CHECK(bodies<SlotCancel>(out).at(0).request_id == plan.request_id);
    const auto refiled = bodies<FlightPlan>(out);
    REQUIRE(refiled.size() == 1);
    CHECK(refiled[0].requested_pad == "PAD2");
    CHECK(refiled[0].waypoints.back().position == Vec3{30, 0, 0});
    CHECK(refiled[0].waypoints.front().eta == plan.waypoints.front().eta);
}

TEST_CASE("fleet: simultaneous filings are self-deconflicted") {
    Harness h({uav("UAV1"), uav("UAV2")});
    h.fm.tick(0);
    const auto plans = bodies<FlightPlan>(h.fm.take_outbox());
    REQUIRE(plans.size() == 2);
    CHECK(plans[1].waypoints.front().eta - plans[0].waypoints.front().eta == 20000);
    CHECK(h.events.has("self-deconflicted"));
    CHECK(plans[0].request_id != plans[1].request_id);
}
