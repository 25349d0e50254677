#include "vertisim/scenario/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

namespace vertisim::scenario {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& what) { throw ConfigError(what); }

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        fail(std::string("field '") + key + "' has the wrong type");
    }
}

template <class T>
T require(const json& j, const char* key, const std::string& where) {
    if (!j.is_object() || !j.contains(key)) fail(where + ": missing '" + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception&) {
        fail(where + ": field '" + key + "' has the wrong type");
    }
}

SimTime ms(double seconds) { return static_cast<SimTime>(std::llround(seconds * 1000.0)); }

std::vector<Point2> polygon(const json& j, const std::string& where) {
    if (!j.is_array()) fail(where + ": polygon must be an array of [east, north]");
    std::vector<Point2> out;
    for (const auto& p : j) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number())
            fail(where + ": polygon vertex must be [east, north]");
        out.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    if (out.size() < 3) fail(where + ": polygon needs at least 3 vertices");
    return out;
}

Vec3 vec3(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 3) fail(where + ": expected [east, north, up]");
    for (const auto& v : j)
        if (!v.is_number()) fail(where + ": expected numbers");
    return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

PadConfig parse_pad(const json& j, const std::string& vd) {
    const std::string where = "vertidrome " + vd + " pad";
    PadConfig p;
    p.id = require<std::string>(j, "id", where);
    p.label = get_or<std::string>(j, "label", p.id);
    p.east = get_or(j, "east", 0.0);
    p.north = get_or(j, "north", 0.0);
    const auto mode = get_or<std::string>(j, "mode", "BOTH");
    const auto parsed = enum_from_string<PadMode>(mode);
    if (!parsed) fail(where + " " + p.id + ": unknown mode '" + mode + "'");
    p.mode = *parsed;
    if (j.contains("approach_arc")) {
        const auto& a = j.at("approach_arc");
        p.approach_arc = ArcConfig{get_or(a, "from_deg", 0.0), get_or(a, "to_deg", 360.0),
                                   get_or(a, "radius_m", 20.0)};
    }
    return p;
}

VertidromeConfig parse_vertidrome(const json& j) {
    VertidromeConfig v;
    v.id = require<std::string>(j, "id", "vertidrome");
    v.name = get_or<std::string>(j, "name", v.id);
    v.elevation_m = get_or(j, "elevation_m", 0.0);
    if (j.contains("sector")) {
        v.sector_radius_m = get_or(j.at("sector"), "radius_m", v.sector_radius_m);
        v.sector_height_m = get_or(j.at("sector"), "height_m", v.sector_height_m);
    }
    v.wind_limit_mps = get_or(j, "wind_limit_mps", v.wind_limit_mps);
    v.caution_mps = get_or(j, "caution_mps", v.caution_mps);
    v.caution_factor = get_or(j, "caution_factor", v.caution_factor);
    for (const auto& p : j.value("pads", json::array())) v.pads.push_back(parse_pad(p, v.id));
    if (v.pads.empty()) fail("vertidrome " + v.id + " has no pads");
    std::set<std::string> ids;
    for (const auto& p : v.pads)
        if (!ids.insert(p.id).second) fail("vertidrome " + v.id + ": duplicate pad " + p.id);
    return v;
}

FleetConfig parse_fleet(const json& j) {
    FleetConfig f;
    f.operator_id = get_or<std::string>(j, "operator", f.operator_id);
    f.cruise_speed_mps = get_or(j, "cruise_speed_mps", f.cruise_speed_mps);
    f.cruise_altitude_m = get_or(j, "cruise_altitude_m", f.cruise_altitude_m);
    f.clearance_m = get_or(j, "clearance_m", f.clearance_m);
    f.grid_m = get_or(j, "grid_m", f.grid_m);
    f.departure_lead_s = get_or(j, "departure_lead_s", f.departure_lead_s);
    f.takeoff_timeout_s = get_or(j, "takeoff_timeout_s", f.takeoff_timeout_s);
    f.slot_lead_s = get_or(j, "slot_lead_s", f.slot_lead_s);
    f.slot_duration_s = get_or(j, "slot_duration_s", f.slot_duration_s);
    if (f.cruise_speed_mps <= 0 || f.grid_m <= 0) fail("fleet " + f.operator_id + ": speeds and grid must be positive");
    return f;
}

}  // namespace

const VertidromeConfig* ScenarioConfig::vertidrome(const std::string& id) const {
    for (const auto& v : vertidromes)
        if (v.id == id) return &v;
    return nullptr;
}

const PadConfig* ScenarioConfig::pad(const std::string& vd, const std::string& id) const {
    const auto* v = vertidrome(vd);
    if (v == nullptr) return nullptr;
    for (const auto& p : v->pads)
        if (p.id == id) return &p;
    return nullptr;
}

DisplayClock ScenarioConfig::display() const {
    const auto clock = DisplayClock::from_iso(display_epoch);
    return clock ? *clock : DisplayClock{};
}

ScenarioConfig parse_scenario(const json& doc) {
    if (!doc.is_object()) fail("scenario must be a JSON object");
    ScenarioConfig c;
    c.name = get_or<std::string>(doc, "name", "scenario");
    c.seed = get_or<std::uint64_t>(doc, "seed", c.seed);
    c.tick_ms = get_or<SimTime>(doc, "tick_ms", c.tick_ms);
    if (c.tick_ms <= 0) fail("tick_ms must be positive");
    c.timeout_s = get_or(doc, "timeout_s", c.timeout_s);
    c.display_epoch = get_or<std::string>(doc, "display_epoch", c.display_epoch);
    if (!DisplayClock::from_iso(c.display_epoch)) fail("display_epoch is not YYYY-MM-DDTHH:MM:SS");
    const auto mode = get_or<std::string>(doc, "mode", "auto-ack");
    if (mode != "auto-ack" && mode != "person-in-loop") fail("mode must be auto-ack or person-in-loop");
    c.auto_ack = mode == "auto-ack";

    if (doc.contains("separation")) {
        const auto& s = doc.at("separation");
        c.separation.horizontal_m = get_or(s, "horizontal_m", c.separation.horizontal_m);
        c.separation.vertical_m = get_or(s, "vertical_m", c.separation.vertical_m);
        c.separation.temporal_ms = ms(get_or(s, "temporal_s", c.separation.temporal_ms / 1000.0));
    }
    if (doc.contains("adherence")) {
        const auto& a = doc.at("adherence");
        c.adherence.spatial_m = get_or(a, "spatial_m", c.adherence.spatial_m);
        c.adherence.temporal_s = get_or(a, "temporal_s", c.adherence.temporal_s);
    }

    const json world = doc.value("world", json::object());
    for (const auto& g : world.value("geofences", json::array())) {
        const auto id = require<std::string>(g, "id", "geofence");
        c.geofences.push_back({id, polygon(g.value("polygon", json()), "geofence " + id)});
    }
    for (const auto& v : world.value("vertidromes", json::array())) c.vertidromes.push_back(parse_vertidrome(v));
    if (c.vertidromes.empty()) fail("world.vertidromes is empty");
    std::set<std::string> vd_ids;
    for (const auto& v : c.vertidromes)
        if (!vd_ids.insert(v.id).second) fail("duplicate vertidrome " + v.id);

    const json fleets = doc.value("fleets", json::array());
    if (fleets.is_object()) {
        c.fleets.push_back(parse_fleet(fleets));
    } else {
        for (const auto& f : fleets) c.fleets.push_back(parse_fleet(f));
    }
    if (c.fleets.empty()) c.fleets.push_back({});
    std::set<std::string> operators;
    for (const auto& f : c.fleets)
        if (!operators.insert(f.operator_id).second) fail("duplicate fleet operator " + f.operator_id);

    std::set<std::string> callsigns;
    for (const auto& v : doc.value("vehicles", json::array())) {
        VehicleConfig vc;
        vc.callsign = require<std::string>(v, "callsign", "vehicle");
        vc.serial = get_or<std::string>(v, "serial", "SN-" + vc.callsign);
        vc.operator_id = get_or<std::string>(v, "operator", c.fleets.front().operator_id);
        if (!operators.contains(vc.operator_id))
            fail("vehicle " + vc.callsign + ": unknown operator '" + vc.operator_id + "'");
        const auto profile_name = get_or<std::string>(v, "profile", "EVO X8");
        const auto profile = sim::find_profile(profile_name);
        if (!profile) fail("vehicle " + vc.callsign + ": unknown profile '" + profile_name + "'");
        vc.profile = *profile;
        vc.start = v.contains("start") ? vec3(v.at("start"), "vehicle " + vc.callsign + " start") : Vec3{};
        if (!callsigns.insert(vc.callsign).second) fail("duplicate vehicle " + vc.callsign);
        c.vehicles.push_back(vc);
    }

    std::set<std::string> flown;
    for (const auto& f : doc.value("flights", json::array())) {
        FlightConfig fc;
        fc.callsign = require<std::string>(f, "callsign", "flight");
        const std::string where = "flight " + fc.callsign;
        if (!callsigns.contains(fc.callsign)) fail(where + ": unknown callsign (no such vehicle)");
        if (!flown.insert(fc.callsign).second) fail(where + ": more than one flight for the vehicle");
        fc.aircraft_type = get_or<std::string>(f, "aircraft_type", fc.aircraft_type);
        fc.priority = get_or(f, "priority", fc.priority);
        fc.origin = get_or<std::string>(f, "origin", fc.origin);
        fc.destination = require<std::string>(f, "destination", where);
        fc.pad = require<std::string>(f, "pad", where);
        if (!c.vertidrome(fc.destination)) fail(where + ": unknown vertidrome '" + fc.destination + "'");
        if (!c.pad(fc.destination, fc.pad)) fail(where + ": unknown pad '" + fc.pad + "' at " + fc.destination);
        for (const auto& a : f.value("alternates", json::array())) {
            fleet::PadRef ref{require<std::string>(a, "vertidrome", where + " alternate"),
                              require<std::string>(a, "pad", where + " alternate")};
            if (!c.pad(ref.vertidrome, ref.pad))
                fail(where + ": unknown alternate pad '" + ref.pad + "' at " + ref.vertidrome);
            fc.alternates.push_back(ref);
        }
        fc.file_at_s = get_or(f, "file_at_s", 0.0);
        c.flights.push_back(fc);
    }

    for (const auto& w : doc.value("weather", json::array())) {
        WeatherEvent e;
        e.at_s = get_or(w, "at_s", 0.0);
        if (w.contains("vertidrome")) {
            e.vertidrome = w.at("vertidrome").get<std::string>();
            if (!c.vertidrome(*e.vertidrome)) fail("weather: unknown vertidrome '" + *e.vertidrome + "'");
        }
        e.direction_deg = get_or(w, "direction_deg", 0.0);
        e.speed_mps = require<double>(w, "speed_mps", "weather");
        if (e.speed_mps < 0) fail("weather: negative wind speed");
        c.weather.push_back(e);
    }

    static const std::set<std::string> kinds{"detection", "ems_demand", "vso", "gfmu", "infra"};
    for (const auto& s : doc.value("script", json::array())) {
        ScriptEntry e;
        e.at_s = require<double>(s, "at_s", "script entry");
        e.jitter_s = get_or(s, "jitter_s", 0.0);
        e.kind = require<std::string>(s, "kind", "script entry");
        if (!kinds.contains(e.kind)) fail("script: unknown kind '" + e.kind + "'");
        e.fields = s;
        const std::string where = "script " + e.kind;
        if (e.kind != "vso") {
            const auto vd = require<std::string>(s, "vertidrome", where);
            if (!c.vertidrome(vd)) fail(where + ": unknown vertidrome '" + vd + "'");
            if (s.contains("pad") && !s.at("pad").get<std::string>().empty() &&
                !c.pad(vd, s.at("pad").get<std::string>()))
                fail(where + ": unknown pad '" + s.at("pad").get<std::string>() + "'");
        } else {
            const auto vd = get_or<std::string>(s, "vertidrome", c.vertidromes.front().id);
            if (!c.vertidrome(vd)) fail(where + ": unknown vertidrome '" + vd + "'");
            if (!s.contains("command") || !s.at("command").is_object()) fail(where + ": missing 'command' object");
        }
        if (e.kind == "detection") {
            const auto k = get_or<std::string>(s, "detection", "PersonOnPad");
            if (!enum_from_string<EmergencyKind>(k)) fail(where + ": unknown detection '" + k + "'");
        }
        c.script.push_back(e);
    }

    if (doc.contains("expect")) {
        const auto& x = doc.at("expect");
        c.expect.sequence = get_or(x, "sequence", std::vector<std::string>{});
        c.expect.forbidden = get_or(x, "forbidden", std::vector<std::string>{});
        if (x.contains("landing")) {
            const auto& l = x.at("landing");
            LandingExpectation le;
            le.callsign = require<std::string>(l, "callsign", "expect.landing");
            le.vertidrome = require<std::string>(l, "vertidrome", "expect.landing");
            le.pad = require<std::string>(l, "pad", "expect.landing");
            if (!callsigns.contains(le.callsign)) fail("expect.landing: unknown callsign '" + le.callsign + "'");
            if (!c.pad(le.vertidrome, le.pad)) fail("expect.landing: unknown pad '" + le.pad + "'");
            if (l.contains("after_takeoff_s")) le.after_takeoff_s = l.at("after_takeoff_s").get<double>();
            le.tolerance_s = get_or(l, "tolerance_s", le.tolerance_s);
            le.within_slot = get_or(l, "within_slot", le.within_slot);
            c.expect.landing = le;
        }
    }
    return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open " + path.string());
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        fail(path.string() + ": " + e.what());
    }
    return parse_scenario(doc);
}

fleet::WorldMap world_map(const ScenarioConfig& config) {
    fleet::WorldMap world;
    try {
        for (const auto& g : config.geofences) world.add_geofence(g);
        for (const auto& v : config.vertidromes) {
            for (const auto& p : v.pads) {
                fleet::PadSite site{{v.id, p.id}, {p.east, p.north, v.elevation_m}, std::nullopt};
                if (p.approach_arc)
                    site.arc = fleet::Arc{p.approach_arc->from_deg, p.approach_arc->to_deg, p.approach_arc->radius_m};
                world.add_pad(site);
            }
        }
    } catch (const fleet::WorldError& e) {
        fail(e.what());
    }
    return world;
}

}  // namespace vertisim::scenario
