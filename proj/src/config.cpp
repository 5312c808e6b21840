#include "swarmsteer/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "swarmsteer/error.hpp"
#include "swarmsteer/rng.hpp"

namespace swarmsteer {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& origin, const std::string& what) {
    throw ConfigError(origin + ": " + what);
}

void check_keys(const json& obj, const std::set<std::string>& allowed,
                const std::string& origin, const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!allowed.count(it.key())) {
            fail(origin, "unknown key '" + it.key() + "' in " + where);
        }
    }
}

double get_number(const json& obj, const char* key, const std::string& origin,
                  std::optional<double> fallback = std::nullopt) {
    if (!obj.contains(key)) {
        if (fallback) return *fallback;
        fail(origin, std::string("missing key '") + key + "'");
    }
    if (!obj[key].is_number()) fail(origin, std::string("key '") + key + "' must be a number");
    return obj[key].get<double>();
}

Vec2 get_vec2(const json& v, const char* key, const std::string& origin) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        fail(origin, std::string("key '") + key + "' must be [x, y]");
    }
    return {v[0].get<double>(), v[1].get<double>()};
}

std::vector<AgentSpec> materialize_agents(const json& spec, std::uint64_t seed,
                                          const std::string& origin) {
    check_keys(spec, {"type", "count", "speed_mm_s", "box_mm", "centers_mm", "spread_mm"},
               origin, "random_agents");
    if (!spec.contains("type") || !spec["type"].is_string()) {
        fail(origin, "random_agents.type must be 'box' or 'clusters'");
    }
    std::string type = spec["type"].get<std::string>();
    int count = static_cast<int>(get_number(spec, "count", origin));
    double speed = get_number(spec, "speed_mm_s", origin);
    if (count < 2) fail(origin, "random_agents.count must be >= 2");

    Rng rng = Rng::substream(seed, 0);
    std::vector<AgentSpec> agents;
    agents.reserve(static_cast<std::size_t>(count));
    if (type == "box") {
        if (!spec.contains("box_mm") || !spec["box_mm"].is_array() || spec["box_mm"].size() != 4) {
            fail(origin, "random_agents.box_mm must be [xmin, xmax, ymin, ymax]");
        }
        double xmin = spec["box_mm"][0].get<double>();
        double xmax = spec["box_mm"][1].get<double>();
        double ymin = spec["box_mm"][2].get<double>();
        double ymax = spec["box_mm"][3].get<double>();
        for (int i = 0; i < count; ++i) {
            AgentSpec a;
            a.pos = {rng.uniform(xmin, xmax), rng.uniform(ymin, ymax)};
            a.heading = rng.uniform(-kPi, kPi);
            a.speed = speed;
            agents.push_back(a);
        }
    } else if (type == "clusters") {
        if (!spec.contains("centers_mm") || !spec["centers_mm"].is_array() ||
            spec["centers_mm"].empty()) {
            fail(origin, "random_agents.centers_mm must be a non-empty list of [x, y]");
        }
        double spread = get_number(spec, "spread_mm", origin);
        std::vector<Vec2> centers;
        for (const auto& c : spec["centers_mm"]) {
            centers.push_back(get_vec2(c, "centers_mm", origin));
        }
        for (int i = 0; i < count; ++i) {
            const Vec2& c = centers[static_cast<std::size_t>(i) % centers.size()];
            AgentSpec a;
            a.pos = {c.x + rng.normal(0.0, spread), c.y + rng.normal(0.0, spread)};
            a.heading = rng.uniform(-kPi, kPi);
            a.speed = speed;
            agents.push_back(a);
        }
    } else {
        fail(origin, "random_agents.type must be 'box' or 'clusters'");
    }
    return agents;
}

}  // namespace

Experiment experiment_from_json(const std::string& json_text, const std::string& origin,
                                std::optional<std::uint64_t> seed_override) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(origin + ": " + e.what());
    }
    if (!doc.is_object()) fail(origin, "top level must be an object");
    check_keys(doc,
               {"name", "law", "dt", "duration", "agents", "random_agents", "mmc", "tva",
                "avoidance", "events", "perturber", "noise", "u_max_per_mm", "expected"},
               origin, "config");

    Experiment exp;
    SimConfig& c = exp.config;

    if (doc.contains("name")) {
        if (!doc["name"].is_string()) fail(origin, "name must be a string");
        c.name = doc["name"].get<std::string>();
    }
    if (!doc.contains("law") || !doc["law"].is_string()) {
        fail(origin, "missing key 'law' ('mmc' or 'tva')");
    }
    std::string law = doc["law"].get<std::string>();
    if (law == "mmc") c.law = Law::Mmc;
    else if (law == "tva") c.law = Law::Tva;
    else fail(origin, "law must be 'mmc' or 'tva'");

    c.dt = get_number(doc, "dt", origin, 0.04);
    c.duration = get_number(doc, "duration", origin);

    if (doc.contains("noise")) {
        const json& n = doc["noise"];
        check_keys(n, {"heading_sigma_rad", "seed"}, origin, "noise");
        c.noise.heading_sigma = get_number(n, "heading_sigma_rad", origin, 0.0);
        if (n.contains("seed")) {
            if (!n["seed"].is_number_unsigned() && !n["seed"].is_number_integer()) {
                fail(origin, "noise.seed must be an integer");
            }
            c.noise.seed = n["seed"].get<std::uint64_t>();
        }
    }
    if (seed_override) c.noise.seed = *seed_override;

    bool has_explicit = doc.contains("agents");
    bool has_random = doc.contains("random_agents");
    if (has_explicit == has_random) {
        fail(origin, "exactly one of 'agents' or 'random_agents' is required");
    }
    if (has_explicit) {
        if (!doc["agents"].is_array()) fail(origin, "agents must be an array");
        for (const auto& a : doc["agents"]) {
            check_keys(a, {"pos_mm", "heading_rad", "speed_mm_s"}, origin, "agents[]");
            AgentSpec spec;
            if (!a.contains("pos_mm")) fail(origin, "agent missing 'pos_mm'");
            spec.pos = get_vec2(a["pos_mm"], "pos_mm", origin);
            spec.heading = get_number(a, "heading_rad", origin);
            spec.speed = get_number(a, "speed_mm_s", origin);
            c.agents.push_back(spec);
        }
    } else {
        c.agents = materialize_agents(doc["random_agents"], c.noise.seed, origin);
    }

    if (doc.contains("mmc")) {
        const json& m = doc["mmc"];
        check_keys(m, {"mu_per_mm", "k_d", "E_d"}, origin, "mmc");
        c.mmc.mu = get_number(m, "mu_per_mm", origin);
        c.mmc.k_d = get_number(m, "k_d", origin, 0.0);
        if (m.contains("E_d") && !m["E_d"].is_null()) {
            c.mmc.E_d = get_number(m, "E_d", origin);
        }
    } else if (c.law == Law::Mmc) {
        fail(origin, "law 'mmc' requires an 'mmc' section");
    }

    if (doc.contains("tva")) {
        const json& t = doc["tva"];
        check_keys(t, {"mu_hz", "K"}, origin, "tva");
        c.tva.mu = get_number(t, "mu_hz", origin);
        c.tva.K = static_cast<int>(get_number(t, "K", origin));
    } else if (c.law == Law::Tva) {
        fail(origin, "law 'tva' requires a 'tva' section");
    }

    if (doc.contains("avoidance")) {
        const json& a = doc["avoidance"];
        check_keys(a, {"range_mm", "omega_sat_rad_s", "cone_halfangle_rad"}, origin, "avoidance");
        c.avoidance.range_mm = get_number(a, "range_mm", origin, 300.0);
        c.avoidance.omega_sat = get_number(a, "omega_sat_rad_s", origin, 50.0);
        c.avoidance.cone_halfangle = get_number(a, "cone_halfangle_rad", origin, kPi / 2.0);
    }

    if (doc.contains("events")) {
        if (!doc["events"].is_array()) fail(origin, "events must be an array");
        for (const auto& e : doc["events"]) {
            check_keys(e, {"t", "K"}, origin, "events[]");
            KEvent ev;
            ev.t = get_number(e, "t", origin);
            ev.K = static_cast<int>(get_number(e, "K", origin));
            c.events.push_back(ev);
        }
    }

    if (doc.contains("perturber") && !doc["perturber"].is_null()) {
        const json& p = doc["perturber"];
        check_keys(p, {"waypoints"}, origin, "perturber");
        if (!p.contains("waypoints") || !p["waypoints"].is_array()) {
            fail(origin, "perturber.waypoints must be an array");
        }
        PerturberScript script;
        for (const auto& w : p["waypoints"]) {
            check_keys(w, {"t", "pos_mm"}, origin, "waypoints[]");
            Waypoint wp;
            wp.t = get_number(w, "t", origin);
            if (!w.contains("pos_mm")) fail(origin, "waypoint missing 'pos_mm'");
            wp.pos = get_vec2(w["pos_mm"], "pos_mm", origin);
            script.waypoints.push_back(wp);
        }
        c.perturber = std::move(script);
    }

    if (doc.contains("u_max_per_mm")) {
        c.u_max = get_number(doc, "u_max_per_mm", origin);
    }

    if (doc.contains("expected")) {
        if (!doc["expected"].is_array()) fail(origin, "expected must be an array");
        for (const auto& e : doc["expected"]) {
            check_keys(e, {"kind", "value", "arg"}, origin, "expected[]");
            ExpectedProperty prop;
            if (!e.contains("kind") || !e["kind"].is_string()) {
                fail(origin, "expected[].kind must be a string");
            }
            prop.kind = e["kind"].get<std::string>();
            if (!known_property_kind(prop.kind)) {
                fail(origin, "unknown expected property kind '" + prop.kind + "'");
            }
            prop.value = get_number(e, "value", origin, 0.0);
            prop.arg = get_number(e, "arg", origin, 0.0);
            exp.expected.push_back(prop);
        }
    }

    validate(c);
    return exp;
}

Experiment load_experiment(const std::filesystem::path& path,
                           std::optional<std::uint64_t> seed_override) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config: " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return experiment_from_json(ss.str(), path.filename().string(), seed_override);
}

}  // namespace swarmsteer
