#include <random>

#include "doctest.h"
#include "json.hpp"
#include "vertisim/messages/display_time.hpp"
#include "vertisim/messages/envelope.hpp"
#include "vertisim/messages/topics.hpp"

using namespace vertisim;

namespace {

const DisplayClock kClock = *DisplayClock::from_iso("2023-06-14T22:54:00");

FlightPlan reference_plan() {
    FlightPlan p;
    p.callsign = "UAV1";
    p.aircraft_type = "MOTT";
    p.priority = 1;
    p.operation = Operation::ARR;
    p.origin = "EDEC";
    p.destination = "VD_BINNENALSTER";
    p.requested_pad = "PAD1";
    p.slot_start = 165000;  // 22:56:45
    p.slot_end = 225000;    // 22:57:45
    p.waypoints = {{{0, 300, 0}, 0}, {{0, 300, 30}, 15000}, {{0, 0, 30}, 165000}, {{0, 0, 0}, 180000}};
    p.request_id = 1;
    return p;
}

Envelope wrap(Body body, MessageType type, std::string sender = "test", std::int64_t seq = 1) {
    Envelope e;
    e.type = type;
    e.sender = std::move(sender);
    e.seq = seq;
    e.sim_time = 1000;
    e.body = std::move(body);
    e.topic = topics::topic_for(e);
    return e;
}

}  // namespace

TEST_CASE("the reference land request serializes with its fields and parses back equal") {
    const auto env = wrap(reference_plan(), MessageType::LandRequest, "uspace");
    const auto text = serialize(env);
    const auto j = nlohmann::json::parse(text);
    CHECK(j["type"] == "LandRequest");
    CHECK(j["body"]["callsign"] == "UAV1");
    CHECK(j["body"]["request_id"] == 1);
    CHECK(j["body"]["requested_pad"] == "PAD1");
    CHECK(kClock.date_time(j["body"]["slot_start"].get<SimTime>()) == "14-Jun-2023 22:56:45");
    CHECK(kClock.date_time(j["body"]["slot_end"].get<SimTime>()) == "14-Jun-2023 22:57:45");
    CHECK(parse(text) == env);
    CHECK(env.topic == "vertidrome/VD_BINNENALSTER/request");
}

TEST_CASE("tag and body mismatch is a parse error") {
    EmergencyReport r{EmergencyKind::PersonOnPad, "VD_BINNENALSTER", "A", "SENSOR1", "person"};
    auto j = nlohmann::json::parse(serialize(wrap(r, MessageType::EmergencyReport)));
    j["type"] = "LandRequest";
    CHECK_THROWS_AS(parse(j.dump()), ParseError);

    Envelope bad = wrap(r, MessageType::EmergencyReport);
    bad.type = MessageType::LandRequest;
    CHECK_THROWS_AS(serialize(bad), ParseError);
}

TEST_CASE("unknown fields are ignored, missing fields and unknown tags rejected") {
    const auto env = wrap(PositionReport{"UAV1", {1, 2, 3}, 2.0, 500}, MessageType::PositionReport, "UAV1");
    auto j = nlohmann::json::parse(serialize(env));
    j["x"] = 1;
    j["body"]["x"] = 1;
    CHECK(parse(j.dump()) == env);

    auto missing = nlohmann::json::parse(serialize(env));
    missing["body"].erase("callsign");
    CHECK_THROWS_AS(parse(missing.dump()), ParseError);

    auto unknown = nlohmann::json::parse(serialize(env));
    unknown["type"] = "Teleport";
    CHECK_THROWS_AS(parse(unknown.dump()), ParseError);

    auto bad_enum = nlohmann::json::parse(serialize(wrap(PadStatusNotice{"VD", "A", PadStatus::CLOSED, PadMode::NONE, ClosureCause::ForeignObject}, MessageType::PadStatusNotice)));
    bad_enum["body"]["status"] = "AJAR";
    CHECK_THROWS_AS(parse(bad_enum.dump()), ParseError);

    CHECK_THROWS_AS(parse(std::string("{\"topic\":\"\xC3\x28\"}")), ParseError);
    CHECK_THROWS_AS(parse("not json"), ParseError);
    CHECK_THROWS_AS(parse("[]"), ParseError);
}

TEST_CASE("emergency report requires a pad except for vehicle distress") {
    EmergencyReport distress{EmergencyKind::VehicleDistress, "VD", std::nullopt, "UAV1", "battery"};
    const auto env = wrap(distress, MessageType::EmergencyReport);
    CHECK(parse(serialize(env)) == env);
    auto j = nlohmann::json::parse(serialize(env));
    j["body"]["kind"] = "PersonOnPad";
    CHECK_THROWS_AS(parse(j.dump()), ParseError);
}

TEST_CASE("topic map") {
    CHECK(wrap(PositionReport{"UAV1", {}, 0, 0}, MessageType::PositionReport).topic == "uspace/position/UAV1");
    CHECK(wrap(EmergencyReport{EmergencyKind::PersonOnPad, "VD_BINNENALSTER", "A", "S", ""},
               MessageType::EmergencyReport)
              .topic == "uspace/emergency");
    CHECK(wrap(reference_plan(), MessageType::FlightPlan).topic == "uspace/flightplan/request");
    CHECK(wrap(FlightStatus{"UAV1", 1, FlightStatusKind::Conclude}, MessageType::FlightStatus).topic ==
          "uspace/flightplan/request");
    CHECK(wrap(FlightAuthorisation{"UAV1"}, MessageType::FlightAuthorisation).topic ==
          "uspace/flightplan/decision/UAV1");
    CHECK(wrap(SlotDecision{1, "UAV1", "VD1"}, MessageType::SlotDecision).topic == "vertidrome/VD1/decision");
    CHECK(wrap(PadStatusNotice{"VD1"}, MessageType::PadStatusNotice).topic == "vertidrome/VD1/padstatus");
    CHECK(wrap(SlotForecast{"VD1", {}}, MessageType::SlotForecast).topic == "vertidrome/VD1/forecast");
    CHECK(wrap(WeatherReport{"VD1"}, MessageType::WeatherReport).topic == "vertidrome/VD1/weather");
    CHECK(wrap(GfmuPreference{"VD1", "B"}, MessageType::GfmuPreference).topic == "vertidrome/VD1/gfmu");
    CHECK(wrap(FleetCommand{"UAV1"}, MessageType::FleetCommand).topic == "fleet/UAV1/command");
    CHECK(wrap(AdherenceNotice{"UAV1"}, MessageType::AdherenceNotice).topic == "uspace/adherence/UAV1");
    CHECK(wrap(RegistrationRequest{"DLR", "X"}, MessageType::RegistrationRequest).topic == "uspace/registry/request");
    CHECK(wrap(RegistrationResponse{}, MessageType::RegistrationResponse).topic == "uspace/registry/response");

    auto dep = reference_plan();
    dep.operation = Operation::DEP;
    dep.origin = "VD_MAIN_STATION";
    CHECK(wrap(dep, MessageType::DepartRequest).topic == "vertidrome/VD_MAIN_STATION/request");
    CHECK(default_type(Body(dep), true) == MessageType::DepartRequest);
    CHECK(default_type(Body(reference_plan()), true) == MessageType::LandRequest);
    CHECK(default_type(Body(reference_plan())) == MessageType::FlightPlan);

    CHECK(topics::delivery_for(MessageType::PositionReport).qos == 0);
    CHECK(topics::delivery_for(MessageType::PadStatusNotice).retain);
    CHECK(topics::delivery_for(MessageType::SlotDecision).qos == 1);
    CHECK_FALSE(topics::delivery_for(MessageType::InfrastructureHealth).retain);
}

TEST_CASE("plan validation") {
    CHECK_FALSE(validate(reference_plan()));
    auto p = reference_plan();
    p.slot_end = p.slot_start;
    CHECK(validate(p));
    p = reference_plan();
    p.waypoints.resize(1);
    CHECK(validate(p));
    p = reference_plan();
    p.waypoints[2].eta = p.waypoints[1].eta;
    CHECK(validate(p));
    p = reference_plan();
    p.priority = kEmsPriority + 1;
    CHECK(validate(p));
}

TEST_CASE("random envelopes round trip") {
    std::mt19937_64 rng(99);
    auto real = [&] { return std::uniform_real_distribution<double>(-1e4, 1e4)(rng); };
    auto integer = [&](std::int64_t lo, std::int64_t hi) {
        return std::uniform_int_distribution<std::int64_t>(lo, hi)(rng);
    };
    auto word = [&] {
        std::string s;
        for (auto n = integer(1, 8); n > 0; --n) s += static_cast<char>('A' + integer(0, 25));
        return s;
    };
    auto route = [&] {
        std::vector<Waypoint> w;
        SimTime t = integer(0, 1000);
        for (auto n = integer(2, 6); n > 0; --n) {
            w.push_back({{real(), real(), real()}, t});
            t += integer(1, 100000);
        }
        return w;
    };

    for (int i = 0; i < 2000; ++i) {
        Envelope env;
        switch (integer(0, 9)) {
            case 0: {
                FlightPlan p;
                p.callsign = word();
                p.aircraft_type = word();
                p.priority = static_cast<int>(integer(0, kEmsPriority));
                p.operation = integer(0, 1) ? Operation::ARR : Operation::DEP;
                p.origin = word();
                p.destination = word();
                p.requested_pad = word();
                p.slot_start = integer(0, 1000000);
                p.slot_end = p.slot_start + integer(1, 100000);
                p.waypoints = route();
                p.request_id = integer(1, 1 << 30);
                if (integer(0, 1)) p.supersedes = integer(1, 100);
                env = wrap(p, integer(0, 1) ? MessageType::FlightPlan : MessageType::LandRequest, word(), integer(0, 1 << 30));
                break;
            }
            case 1:
                env = wrap(PositionReport{word(), {real(), real(), real()}, real(), integer(0, 1 << 30)},
                           MessageType::PositionReport, word(), integer(0, 1000));
                break;
            case 2:
                env = wrap(SlotDecision{integer(1, 99), word(), word(), integer(0, 1) ? SlotVerdict::Accepted : SlotVerdict::Rejected,
                                        word(), integer(0, 999), integer(1000, 2000), word()},
                           MessageType::SlotDecision);
                break;
            case 3:
                env = wrap(PadStatusNotice{word(), word(), PadStatus::CLOSED, PadMode::NONE, ClosureCause::Weather},
                           MessageType::PadStatusNotice);
                break;
            case 4: {
                FleetCommand c{word(), CommandKind::UploadRoute, route(), word(), std::nullopt};
                if (integer(0, 1)) c.pad_position = Vec3{real(), real(), real()};
                env = wrap(c, MessageType::FleetCommand);
                break;
            }
            case 5: {
                SlotForecast f{word(), {}};
                for (int r = 0; r < 11; ++r) {
                    ForecastRow row{r * 60000, {}};
                    if (integer(0, 2) == 0) row.entries.push_back({word(), word(), word(), 1, Operation::ARR, word(), ForecastStatus::AIRBORNE});
                    f.rows.push_back(row);
                }
                env = wrap(f, MessageType::SlotForecast);
                break;
            }
            case 6:
                env = wrap(AdherenceNotice{word(), integer(1, 9), word(), DeviationKind::Temporal, real(), integer(0, 99)},
                           MessageType::AdherenceNotice);
                break;
            case 7:
                env = wrap(WeatherReport{word(), std::fmod(std::abs(real()), 360.0), std::abs(real()), WeatherSource::UspaceService},
                           MessageType::WeatherReport);
                break;
            case 8:
                env = wrap(EmsDemand{integer(1, 9), word(), word(), word(), 0, 60000}, MessageType::EmsDemand);
                break;
            default:
                env = wrap(FlightAuthorisation{word(), integer(1, 9), AuthVerdict::Approved, "", word(), word(), 1, 2},
                           MessageType::FlightAuthorisation);
                break;
        }
        CHECK(parse(serialize(env)) == env);
        // Canonical: serializing the parsed value yields the same text.
        CHECK(serialize(parse(serialize(env))) == serialize(env));
    }
}

TEST_CASE("display clock") {
    CHECK(kClock.clock(0) == "22:54:00");
    CHECK(kClock.clock(9000) == "22:54:09");
    CHECK(kClock.clock(-120000) == "22:52:00");
    CHECK(kClock.clock(8 * 60000) == "23:02:00");
    CHECK(kClock.date_time(165000) == "14-Jun-2023 22:56:45");
    CHECK_FALSE(DisplayClock::from_iso("2023-13-01T00:00:00"));
    CHECK_FALSE(DisplayClock::from_iso("yesterday"));
}

TEST_CASE("geometry helpers") {
    const std::vector<Waypoint> r{{{0, 0, 0}, 0}, {{0, 0, 30}, 15000}, {{0, 300, 30}, 165000}};
    CHECK(position_at(r, -5) == Vec3{0, 0, 0});
    CHECK(position_at(r, 7500).up == doctest::Approx(15));
    CHECK(position_at(r, 90000).north == doctest::Approx(150));
    CHECK(position_at(r, 999999) == Vec3{0, 300, 30});
    CHECK(path_length(r) == doctest::Approx(330));
    const std::vector<Point2> square{{0, 0}, {10, 0}, {10, 10}, {0, 10}};
    CHECK(point_in_polygon(square, {5, 5}));
    CHECK_FALSE(point_in_polygon(square, {15, 5}));
    CHECK(distance_to_polygon_edge(square, {5, 12}) == doctest::Approx(2));
}
