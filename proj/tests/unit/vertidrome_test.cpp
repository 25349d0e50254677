#include <boost/asio.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/websocket.hpp>
#include <chrono>
#include <cmath>
#include <numbers>
#include <random>
#include <thread>

#include "doctest.h"
#include "oracles/schedule_oracle.hpp"
#include "vertisim/vertidrome/forecast.hpp"
#include "vertisim/vertidrome/gateway.hpp"
#include "vertisim/vertidrome/manager.hpp"

using namespace vertisim;
using namespace vertisim::vertidrome;
using oracle::envelope;

namespace {

const DisplayClock kClock = *DisplayClock::from_iso("2023-06-14T22:54:00");

// 22:56:45 - 22:57:45 relative to the 22:54:00 epoch
constexpr SimTime kRefStart = 165000;
constexpr SimTime kRefEnd = 225000;

FlightPlan land_request(const std::string& cs, std::int64_t id, SimTime start, SimTime end,
                        const std::string& pad = "PAD1") {
    FlightPlan p;
    p.callsign = cs;
    p.aircraft_type = "MOTT";
    p.priority = 1;
    p.operation = Operation::ARR;
    p.origin = "EDEC";
    p.destination = "VD1";
    p.requested_pad = pad;
    p.slot_start = start;
    p.slot_end = end;
    p.waypoints = {{{0, 300, 30}, start - 150000}, {{0, 0, 30}, start + 0}, {{0, 0, 0}, start + 15000}};
    p.request_id = id;
    return p;
}

OperationalConstraintSet clear_constraints() {
    OperationalConstraintSet c;
    c.pads["PAD1"] = {true, PadMode::BOTH};
    c.pads["PAD2"] = {true, PadMode::ARR};
    return c;
}

template <class T>
std::vector<T> bodies(const Outbox& out) {
    std::vector<T> v;
    for (const auto& o : out) {
        if (const auto* b = std::get_if<T>(&o.body)) v.push_back(*b);
    }
    return v;
}

VertidromeConfig config_with_clock() {
    auto c = oracle::two_pad_config();
    c.display = kClock;
    return c;
}

}  // namespace

TEST_CASE("weather evaluation") {
    WeatherLimits lim;
    auto u = evaluate_weather({60, 3}, lim);
    CHECK(u.usable);
    CHECK(u.extension_factor == 1.0);
    CHECK_FALSE(evaluate_weather({60, 12}, lim).usable);
    CHECK(evaluate_weather({60, 11.0}, lim).usable);
    CHECK(evaluate_weather({60, 8.0}, lim).extension_factor == 1.5);
    CHECK(weather_text({60, 3}) == "Direction: 060\xC2\xB0 Speed: 3 m/s");
}

TEST_CASE("weather monotonicity of rejections") {
    for (double s = 0.0; s <= 20.0; s += 0.25) {
        PadSchedule sched;
        auto c = clear_constraints();
        if (!evaluate_weather({0, s}, {}).usable) c.weather_reason = "weather";
        const auto d = handle_flight_request(land_request("UAV1", 1, kRefStart, kRefEnd), "VD1", c, sched, {});
        CHECK((d.reason == "weather") == (s > 11.0));
    }
}

TEST_CASE("flight request handling") {
    PadSchedule sched;
    auto c = clear_constraints();

    SUBCASE("reference land request is accepted on PAD1 and forecast at 22:57:00") {
        const auto d = handle_flight_request(land_request("UAV1", 1, kRefStart, kRefEnd), "VD1", c, sched, {});
        CHECK(d.verdict == SlotVerdict::Accepted);
        CHECK(d.pad == "PAD1");
        CHECK(kClock.clock(d.slot_start) == "22:56:45");
        CHECK(kClock.clock(d.slot_end) == "22:57:45");
        const auto f = operational_forecast("VD1", {"PAD1", "PAD2"}, sched, 180000);
        REQUIRE(f.rows.size() == 11);
        CHECK(kClock.clock(f.rows.front().minute) == "22:55:00");
        CHECK(kClock.clock(f.rows.back().minute) == "23:05:00");
        bool found = false;
        for (const auto& row : f.rows) {
            for (const auto& e : row.entries) {
                if (e.callsign != "UAV1") continue;
                found = true;
                CHECK(kClock.clock(row.minute) == "22:57:00");
                CHECK(e.pad == "PAD1");
                CHECK(e.aircraft_type == "MOTT");
                CHECK(e.priority == 1);
                CHECK(e.operation == Operation::ARR);
                CHECK(e.from_to == "EDEC");
            }
        }
        CHECK(found);
    }
    SUBCASE("closed requested pad falls back to PAD2") {
        c.pads["PAD1"].usable = false;
        const auto d = handle_flight_request(land_request("UAV1", 1, kRefStart, kRefEnd), "VD1", c, sched, {});
        CHECK(d.verdict == SlotVerdict::Accepted);
        CHECK(d.pad == "PAD2");
        CHECK(sched.overlapping("PAD2", d.slot_start, d.slot_end).size() == 1);
    }
    SUBCASE("GFMU preference comes before lowest id") {
        c.pads["PAD3"] = {true, PadMode::BOTH};
        c.pads["PAD1"].usable = false;
        const auto d = handle_flight_request(land_request("UAV1", 1, kRefStart, kRefEnd), "VD1", c, sched, "PAD3");
        CHECK(d.pad == "PAD3");
    }
    SUBCASE("full schedule on the only usable pad") {
        c.pads.erase("PAD2");
        REQUIRE(handle_flight_request(land_request("A", 1, 0, 60000), "VD1", c, sched, {}).verdict == SlotVerdict::Accepted);
        const auto d = handle_flight_request(land_request("B", 2, 30000, 90000), "VD1", c, sched, {});
        CHECK(d.verdict == SlotVerdict::Rejected);
        CHECK(d.reason == "no slot");
    }
    SUBCASE("departure cannot use an ARR-only pad") {
        c.pads["PAD1"].usable = false;
        auto p = land_request("UAV1", 1, 0, 60000);
        p.operation = Operation::DEP;
        p.origin = "VD1";
        p.destination = "EDEC";
        CHECK(handle_flight_request(p, "VD1", c, sched, {}).reason == "no slot");
    }
    SUBCASE("caution band stretches the slot") {
        c.extension_factor = 1.5;
        const auto d = handle_flight_request(land_request("UAV1", 1, 0, 60000), "VD1", c, sched, {});
        CHECK(d.slot_end == 90000);
    }
    SUBCASE("malformed plan") {
        auto p = land_request("UAV1", 1, 0, 60000);
        p.waypoints.resize(1);
        CHECK(handle_flight_request(p, "VD1", c, sched, {}).reason == "invalid plan");
    }
}

TEST_CASE("EMS preemption") {
    PadSchedule sched;
    auto c = clear_constraints();
    SUBCASE("free window") {
        const auto out = preempt_for_ems({1, "VD1", "PAD1", "HEMS", 0, 60000}, c, sched);
        CHECK(out.accommodated);
        CHECK_FALSE(out.confirmation.moved);
        CHECK(sched.live_for("HEMS")->priority == kEmsPriority);
    }
    SUBCASE("displaces a reserved ordinary slot") {
        handle_flight_request(land_request("UAV1", 1, 0, 60000), "VD1", c, sched, {});
        const auto out = preempt_for_ems({1, "VD1", "PAD1", "HEMS", 30000, 90000}, c, sched);
        REQUIRE(out.displaced.size() == 1);
        CHECK(out.displaced[0].callsign == "UAV1");
        CHECK(sched.find(1)->state == SlotState::Displaced);
        CHECK(out.confirmation.slot_start == 30000);
    }
    SUBCASE("in-progress slot pushes the EMS window back") {
        handle_flight_request(land_request("UAV1", 1, 0, 60000), "VD1", c, sched, {});
        sched.set_state(1, SlotState::InProgress);
        const auto out = preempt_for_ems({1, "VD1", "PAD1", "HEMS", 30000, 90000}, c, sched);
        CHECK(out.confirmation.moved);
        CHECK(out.confirmation.slot_start == 60000);
        CHECK(out.displaced.empty());
    }
    SUBCASE("second simultaneous demand gets the next window") {
        preempt_for_ems({1, "VD1", "PAD1", "H1", 0, 60000}, c, sched);
        const auto out = preempt_for_ems({2, "VD1", "PAD1", "H2", 0, 60000}, c, sched);
        CHECK(out.confirmation.pad == "PAD1");
        CHECK(out.confirmation.slot_start == 60000);
        CHECK(out.confirmation.moved);
    }
}

TEST_CASE("sector view") {
    const Vec3 pad{0, 0, 0};
    SectorGeometry s;
    auto t = sector_view({"UAV1", {-12.99, -7.50, 91}, 2, 0}, "PAD1", pad, s);
    REQUIRE(t);
    CHECK(display_row(*t) == SectorRow{"PAD1", "UAV1", 240, 15, 91});
    t = sector_view({"UAV1", {0, 100, 0}, 2, 0}, "PAD1", pad, s);
    REQUIRE(t);
    CHECK(display_row(*t) == SectorRow{"PAD1", "UAV1", 0, 100, 0});
    t = sector_view({"UAV1", {100, 0, 0}, 2, 0}, "PAD1", pad, s);
    CHECK(t->azimuth_deg == doctest::Approx(90.0));
    CHECK_FALSE(sector_view({"UAV1", {10000, 0, 30}, 2, 0}, "PAD1", pad, s));
    CHECK_FALSE(sector_view({"UAV1", {0, 10, 121}, 2, 0}, "PAD1", pad, s));
}

TEST_CASE("sector inverse projection") {
    std::mt19937 rng(99);
    std::uniform_real_distribution<double> az(0, 360), dist(0, 150), alt(0, 120), pc(-500, 500);
    for (int i = 0; i < 10000; ++i) {
        const Vec3 pad{pc(rng), pc(rng), 0};
        SectorTrack want{"P", "X", az(rng), dist(rng), alt(rng)};
        const Vec3 pos = sector_position(want, pad);
        const auto got = sector_view({"X", pos, 0, 0}, "P", pad, {});
        REQUIRE(got);
        CHECK(got->distance_m == doctest::Approx(want.distance_m).epsilon(1e-9));
        CHECK(got->rel_altitude_m == doctest::Approx(want.rel_altitude_m));
        if (want.distance_m > 1e-6) {
            const double d = std::fmod(got->azimuth_deg - want.azimuth_deg + 540.0, 360.0) - 180.0;
            CHECK(std::abs(d) < 1e-6);
        }
        const Vec3 back = sector_position(*got, pad);
        CHECK(distance(back, pos) < 1e-6);
    }
}

TEST_CASE("forecast binning and blanks") {
    PadSchedule sched;
    auto f = operational_forecast("VD1", {"PAD1", "PAD2"}, sched, 0);
    REQUIRE(f.rows.size() == 11);
    for (const auto& r : f.rows) {
        REQUIRE(r.entries.size() == 2);
        for (const auto& e : r.entries) {
            CHECK(e.callsign.empty());
            CHECK(e.priority == 0);
        }
    }
    sched.reserve(Slot{"PAD1", "UAV1", 1, 70000, 170000});  // straddles 1:00 and 2:00
    f = operational_forecast("VD1", {"PAD1"}, sched, 60000);
    int rows_with = 0;
    for (const auto& r : f.rows) {
        for (const auto& e : r.entries) {
            if (e.callsign == "UAV1") {
                ++rows_with;
                CHECK(r.minute == 60000);
            }
        }
    }
    CHECK(rows_with == 1);
}

TEST_CASE("local adherence") {
    const auto plan = land_request("UAV1", 1, 100000, 160000);
    const uspace::AdherenceCriteria c;
    // on track
    PositionReport r{"UAV1", position_at(plan.waypoints, 50000), 2, 50000};
    CHECK(local_adherence(r, plan, plan.slot_end, c, {}).empty());
    // inside an avoid area
    std::vector<AvoidArea> areas{{"park", {{-5, 90}, {5, 90}, {5, 110}, {-5, 110}}}};
    const auto d = local_adherence(r, plan, plan.slot_end, c, areas);
    REQUIRE(d.size() == 1);
    CHECK(d[0].kind == DeviationKind::AvoidArea);
    CHECK(d[0].area == "park");
    // 20 s late at the same point: within tolerance but arrival drifts past a tight slot end
    PositionReport late{"UAV1", r.position, 2, 70000};
    const uspace::AdherenceCriteria loose{100, 30};
    CHECK(local_adherence(late, plan, plan.slot_end, loose, {}).empty());
    const auto tight = local_adherence(late, plan, 120000, loose, {});
    REQUIRE(tight.size() == 1);
    CHECK(tight[0].kind == DeviationKind::Temporal);
}

TEST_CASE("manager: emergency closes the pad and VSO clears it") {
    VertidromeManager m(config_with_clock());
    m.start(0);
    auto out = m.take_outbox();
    CHECK(bodies<PadStatusNotice>(out).size() == 2);

    m.handle(envelope("uspace", land_request("UAV1", 1, kRefStart, kRefEnd), true), 0);
    out = m.take_outbox();
    REQUIRE(bodies<SlotDecision>(out).size() == 1);
    CHECK(bodies<SlotDecision>(out)[0].verdict == SlotVerdict::Accepted);

    m.handle(envelope("UAV2", EmergencyReport{EmergencyKind::PersonOnPad, "VD1", "PAD1", "UAV2", "person"}), 60000);
    out = m.take_outbox();
    const auto notices = bodies<PadStatusNotice>(out);
    REQUIRE(notices.size() == 1);
    CHECK(notices[0].status == PadStatus::CLOSED);
    CHECK(notices[0].mode == PadMode::NONE);
    CHECK(notices[0].cause == ClosureCause::ForeignObject);
    const auto displaced = bodies<SlotDisplaced>(out);
    REQUIRE(displaced.size() == 1);
    CHECK(displaced[0].callsign == "UAV1");
    const auto ui = m.ui_state(60000);
    CHECK(ui["pads"][0]["status"] == "CLOSED");
    CHECK(ui["foreign_objects"].size() == 1);
    CHECK(ui["foreign_objects"][0]["kind"] == "PersonOnPad");

    // no second notice without a state change
    m.tick(61000);
    CHECK(bodies<PadStatusNotice>(m.take_outbox()).empty());

    VsoCommand clear;
    clear.kind = VsoCommandKind::ClearCloseOrder;
    clear.pad = "PAD1";
    CHECK(m.command(clear, 70000).ok);
    out = m.take_outbox();
    REQUIRE(bodies<PadStatusNotice>(out).size() == 1);
    CHECK(bodies<PadStatusNotice>(out)[0].status == PadStatus::CLEAR);
}

TEST_CASE("manager: unknown pad prompts classification") {
    VertidromeManager m(config_with_clock());
    m.start(0);
    m.take_outbox();
    m.handle(envelope("UAV2", EmergencyReport{EmergencyKind::ForeignObject, "VD1", "Z", "UAV2", "bag"}), 1000);
    CHECK(bodies<PadStatusNotice>(m.take_outbox()).empty());
    REQUIRE(m.prompts().size() == 1);
    VsoCommand classify;
    classify.kind = VsoCommandKind::ClassifyHazard;
    classify.prompt_id = m.prompts()[0].id;
    classify.pad = "PAD2";
    CHECK(m.command(classify, 2000).ok);
    CHECK(m.pad("PAD2")->closed_at(2000));
    CHECK(m.prompts().empty());
}

TEST_CASE("manager: VSO commands") {
    VertidromeManager m(config_with_clock());
    m.start(0);

    SUBCASE("close order") {
        const auto c = parse_vso_command({{"command", "CreateCloseOrder"}, {"pad", "PAD1"}, {"duration_s", 600}});
        CHECK(m.command(c, 1000).ok);
        CHECK(m.pad("PAD1")->status(1000) == PadStatus::CLOSED);
        CHECK(m.pad("PAD1")->cause(1000) == ClosureCause::Operator);
        CHECK(m.ui_state(1000)["close_orders"].size() == 1);
        CHECK(m.pad("PAD1")->status(601000) == PadStatus::CLEAR);
        m.take_outbox();
        m.tick(601000);
        const auto n = bodies<PadStatusNotice>(m.take_outbox());
        REQUIRE(n.size() == 1);
        CHECK(n[0].status == PadStatus::CLEAR);
    }
    SUBCASE("reassign into an occupied window is rejected") {
        m.handle(envelope("uspace", land_request("A", 1, 0, 60000, "PAD1"), true), 0);
        m.handle(envelope("uspace", land_request("B", 2, 0, 60000, "PAD2"), true), 0);
        const auto r = m.command(parse_vso_command({{"command", "ReassignSlot"}, {"callsign", "A"}, {"pad", "PAD2"}}), 0);
        CHECK_FALSE(r.ok);
        CHECK(r.reason == "window occupied");
        CHECK(m.schedule().find(1)->pad == "PAD1");
        CHECK(m.command(parse_vso_command({{"command", "ReassignSlot"}, {"request_id", 1}, {"pad", "PAD2"},
                                           {"slot_start_ms", 60000}, {"slot_end_ms", 120000}}),
                        0)
                  .ok);
        CHECK(m.schedule().find(1)->pad == "PAD2");
    }
    SUBCASE("pad mode change waits for incompatible slots") {
        auto p = land_request("A", 1, 0, 60000, "PAD1");
        m.handle(envelope("uspace", p, true), 0);
        CHECK(m.command(parse_vso_command({{"command", "SetPadMode"}, {"pad", "PAD1"}, {"mode", "DEP"}}), 0).ok);
        CHECK(m.ui_state(0)["pads"][0]["mode_text"] == "BOTH+DEP");
        m.handle(envelope("uspace", SlotCancel{"VD1", "A", 1}), 1000);
        CHECK(m.pad("PAD1")->configured_mode == PadMode::DEP);
    }
    SUBCASE("malformed commands") {
        CHECK_THROWS_AS(parse_vso_command({{"command", "Explode"}}), CommandError);
        CHECK_THROWS_AS(parse_vso_command({{"command", "CreateCloseOrder"}, {"pad", "PAD1"}}), CommandError);
        CHECK_THROWS_AS(parse_vso_command({{"command", "ApproveFlight"}, {"request_id", "x"}}), CommandError);
    }
    SUBCASE("command json round trip") {
        const auto c = parse_vso_command({{"command", "AddAvoidArea"}, {"id", "park"},
                                          {"polygon", {{0, 0}, {1, 0}, {1, 1}}}});
        CHECK(to_json(parse_vso_command(to_json(c))) == to_json(c));
    }
}

TEST_CASE("manager: person-in-loop holds decisions until approval") {
    auto cfg = config_with_clock();
    cfg.auto_ack = false;
    VertidromeManager m(cfg);
    m.start(0);
    m.take_outbox();
    m.handle(envelope("uspace", land_request("UAV1", 1, kRefStart, kRefEnd), true), 0);
    CHECK(bodies<SlotDecision>(m.take_outbox()).empty());
    const auto ui = m.ui_state(0);
    REQUIRE(ui["popups"].size() == 1);
    CHECK(ui["popups"][0]["callsign"] == "UAV1");
    CHECK(ui["popups"][0]["message_type"] == "LandRequest");
    CHECK(ui["popups"][0]["requested_slot"] == "14-Jun-2023 22:56:45 - 22:57:45");

    VsoCommand ack;
    ack.kind = VsoCommandKind::AcknowledgeRequest;
    ack.request_id = 1;
    CHECK(m.command(ack, 500).ok);
    CHECK(m.popups().empty());
    CHECK_FALSE(m.command(ack, 600).ok);
    CHECK(bodies<SlotDecision>(m.take_outbox()).empty());

    VsoCommand approve;
    approve.kind = VsoCommandKind::ApproveFlight;
    approve.request_id = 1;
    CHECK(m.command(approve, 1000).ok);
    const auto d = bodies<SlotDecision>(m.take_outbox());
    REQUIRE(d.size() == 1);
    CHECK(d[0].verdict == SlotVerdict::Accepted);
}

TEST_CASE("manager: tracking, sector rows and slot completion") {
    VertidromeManager m(config_with_clock());
    m.start(0);
    const auto plan = land_request("UAV1", 1, kRefStart, kRefEnd);
    m.handle(envelope("uspace", plan, true), 0);
    // raw vehicle reports are ignored; only the relay counts
    m.handle(envelope("UAV1", PositionReport{"UAV1", {-12.99, -7.5, 91}, 2, 1000}), 1000);
    CHECK(m.sector_tracks().empty());
    m.handle(envelope("uspace", PositionReport{"UAV1", {-12.99, -7.5, 91}, 2, 1000}), 1000);
    const auto ui = m.ui_state(1000);
    REQUIRE(ui["sector"].size() == 1);
    CHECK(ui["sector"][0]["pad"] == "A");
    CHECK(ui["sector"][0]["azimuth"] == 240);
    CHECK(ui["sector"][0]["distance"] == 15);
    CHECK(ui["sector"][0]["rel_altitude"] == 91);
    CHECK(m.schedule().find(1)->state == SlotState::InProgress);
    m.handle(envelope("uspace", PositionReport{"UAV1", {0, 0, 0}, 0, 170000}), 170000);
    CHECK(m.schedule().find(1)->state == SlotState::Completed);
}

TEST_CASE("schedule safety under random operation sequences") {
    std::mt19937 rng(2024);
    for (int i = 0; i < 1000; ++i) {
        const auto v = oracle::random_schedule_run(rng, 30);
        if (v) FAIL("sequence " << i << ": " << *v);
    }
}

TEST_CASE("gateway: snapshot, updates and commands over WebSocket") {
    namespace beast = boost::beast;
    namespace websocket = beast::websocket;
    using tcp = boost::asio::ip::tcp;
    using nlohmann::json;

    VertidromeManager m(config_with_clock());
    m.start(0);
    VsoGateway gw({0});
    gw.start();
    gw.publish(m.ui_state(0));

    boost::asio::io_context io;
    websocket::stream<tcp::socket> ws(io);
    tcp::resolver resolver(io);
    boost::asio::connect(ws.next_layer(), resolver.resolve("127.0.0.1", std::to_string(gw.port())));
    ws.handshake("127.0.0.1", "/");
    beast::flat_buffer buf;
    const auto read_json = [&] {
        buf.consume(buf.size());
        ws.read(buf);
        return json::parse(beast::buffers_to_string(buf.data()));
    };

    const auto snap = read_json();
    CHECK(snap["type"] == "snapshot");
    CHECK(snap["state"]["pads"].size() == 2);
    CHECK(snap["state"]["weather"]["text"] == "Direction: 000\xC2\xB0 Speed: 0 m/s");

    ws.write(boost::asio::buffer(json{{"type", "command"}, {"id", 7}, {"command", "CreateCloseOrder"},
                                      {"pad", "PAD1"}, {"duration_s", 600}}
                                     .dump()));
    ws.write(boost::asio::buffer(std::string(R"({"type":"command","id":8,"command":"Nope"})")));

    const auto bad = read_json();
    CHECK(bad["type"] == "command_result");
    CHECK(bad["id"] == 8);
    CHECK(bad["ok"] == false);

    std::vector<GatewayCommand> cmds;
    for (int i = 0; i < 200 && cmds.empty(); ++i) {
        cmds = gw.take_commands();
        std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
    REQUIRE(cmds.size() == 1);
    const auto result = m.command(cmds[0].command, 1000);
    gw.reply(cmds[0], result);
    gw.publish(m.ui_state(1000));

    const auto res = read_json();
    CHECK(res["type"] == "command_result");
    CHECK(res["id"] == 7);
    CHECK(res["ok"] == true);
    const auto upd = read_json();
    CHECK(upd["type"] == "update");
    CHECK(upd["seq"] == 1);
    CHECK(upd["panels"]["pads"][0]["status"] == "CLOSED");
    CHECK(upd["panels"].contains("close_orders"));
    CHECK_FALSE(upd["panels"].contains("weather"));

    ws.close(websocket::close_code::normal);
    gw.stop();
}
