#include "billiard/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "billiard/errors.hpp"

namespace billiard {

namespace {

using Json = nlohmann::json;
using OrderedJson = nlohmann::ordered_json;

constexpr double kCueY = 155.0;
constexpr double kCueJitter = 3.0;
constexpr double kBallRadius = 20.0;

// Measuring times are counted in ticks of kTick time units.
constexpr double kTick = 0.1;
constexpr double kBasicTicks = 500;
constexpr double kLongTicks = 1000;

// Target rack of the basic table; index 6 is the red ball.
constexpr Vec2 kRack[] = {{300, 150}, {340, 120}, {340, 180}, {380, 210}, {380, 150},
                          {380, 90},  {420, 240}, {420, 180}, {420, 120}, {420, 60}};

ScenarioConfig basic_table() {
    ScenarioConfig cfg;
    cfg.geometry = {600.0, 300.0};
    cfg.disks.push_back({0, kBallRadius, ScalarDistribution::point(200.0),
                         ScalarDistribution::uniform(kCueY - kCueJitter, kCueY + kCueJitter),
                         ScalarDistribution::point(20.0), ScalarDistribution::point(0.0)});
    int id = 1;
    for (const Vec2 p : kRack) {
        cfg.disks.push_back({id++, kBallRadius, ScalarDistribution::point(p.x),
                             ScalarDistribution::point(p.y), ScalarDistribution::point(0.0),
                             ScalarDistribution::point(0.0)});
    }
    cfg.horizon = kBasicTicks * kTick;
    cfg.sample_tick = kTick;
    cfg.events.push_back({"green", 0, Rect{150, 270, 240, 180}, {0.0, cfg.horizon}});
    cfg.events.push_back({"red", 7, Rect{430, 120, 520, 30}, {0.0, cfg.horizon}});
    return cfg;
}

std::string disk_label(int id) { return "disk " + std::to_string(id); }

void require(bool ok, const std::string& message) {
    if (!ok) {
        throw ConfigError(message);
    }
}

void validate_distribution(const ScalarDistribution& d, const std::string& what) {
    require(std::isfinite(d.lo) && std::isfinite(d.hi), what + " must be finite");
    require(d.lo <= d.hi, what + " has lo > hi");
    if (d.is_point()) {
        require(d.lo == d.hi, what + " point distribution is inconsistent");
    }
}

// Smallest distance between two axis-aligned boxes (0 if they intersect).
double box_distance(const DiskSpec& a, const DiskSpec& b) {
    const double dx = std::max({0.0, b.x0.lo - a.x0.hi, a.x0.lo - b.x0.hi});
    const double dy = std::max({0.0, b.y0.lo - a.y0.hi, a.y0.lo - b.y0.hi});
    return std::hypot(dx, dy);
}

std::string line_col(std::string_view text, std::size_t byte) {
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t k = 0; k < std::min(byte, text.size()); ++k) {
        if (text[k] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

// --- JSON decoding -------------------------------------------------------

void reject_unknown_keys(const Json& obj, std::initializer_list<std::string_view> allowed,
                         const std::string& where) {
    for (const auto& item : obj.items()) {
        if (std::find(allowed.begin(), allowed.end(), item.key()) == allowed.end()) {
            throw ConfigError(where + ": unknown key '" + item.key() + "'");
        }
    }
}

const Json& field(const Json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        throw ConfigError(where + ": missing key '" + key + "'");
    }
    return *it;
}

double as_number(const Json& j, const std::string& where) {
    require(j.is_number(), where + ": expected a number");
    return j.get<double>();
}

int as_int(const Json& j, const std::string& where) {
    require(j.is_number_integer(), where + ": expected an integer");
    return j.get<int>();
}

ScalarDistribution as_distribution(const Json& j, const std::string& where) {
    if (j.is_number()) {
        return ScalarDistribution::point(j.get<double>());
    }
    require(j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number(),
            where + ": expected a number or a [lo, hi] pair");
    return ScalarDistribution::uniform(j[0].get<double>(), j[1].get<double>());
}

ScenarioConfig decode(const Json& doc) {
    require(doc.is_object(), "config: expected a JSON object");
    reject_unknown_keys(doc, {"geometry", "disks", "events", "horizon", "sample_tick", "brownian",
                              "speed_multiplier"},
                        "config");
    ScenarioConfig cfg;

    const Json& geom = field(doc, "geometry", "config");
    require(geom.is_object(), "geometry: expected an object");
    reject_unknown_keys(geom, {"width", "height"}, "geometry");
    cfg.geometry.width = as_number(field(geom, "width", "geometry"), "geometry.width");
    cfg.geometry.height = as_number(field(geom, "height", "geometry"), "geometry.height");

    const Json& disks = field(doc, "disks", "config");
    require(disks.is_array(), "disks: expected an array");
    for (std::size_t k = 0; k < disks.size(); ++k) {
        const std::string where = "disks[" + std::to_string(k) + "]";
        const Json& d = disks[k];
        require(d.is_object(), where + ": expected an object");
        reject_unknown_keys(d, {"id", "radius", "x0", "y0", "vx0", "vy0"}, where);
        DiskSpec spec;
        spec.id = as_int(field(d, "id", where), where + ".id");
        spec.radius = as_number(field(d, "radius", where), where + ".radius");
        spec.x0 = as_distribution(field(d, "x0", where), where + ".x0");
        spec.y0 = as_distribution(field(d, "y0", where), where + ".y0");
        spec.vx0 = as_distribution(field(d, "vx0", where), where + ".vx0");
        spec.vy0 = as_distribution(field(d, "vy0", where), where + ".vy0");
        cfg.disks.push_back(spec);
    }

    const Json& events = field(doc, "events", "config");
    require(events.is_array(), "events: expected an array");
    for (std::size_t k = 0; k < events.size(); ++k) {
        const std::string where = "events[" + std::to_string(k) + "]";
        const Json& e = events[k];
        require(e.is_object(), where + ": expected an object");
        reject_unknown_keys(e, {"name", "disk_id", "rect", "window"}, where);
        RegionEvent ev;
        const Json& name = field(e, "name", where);
        require(name.is_string(), where + ".name: expected a string");
        ev.name = name.get<std::string>();
        ev.disk_id = as_int(field(e, "disk_id", where), where + ".disk_id");
        const Json& rect = field(e, "rect", where);
        require(rect.is_array() && rect.size() == 4, where + ".rect: expected [x1, y1, x2, y2]");
        ev.region = {as_number(rect[0], where + ".rect"), as_number(rect[1], where + ".rect"),
                     as_number(rect[2], where + ".rect"), as_number(rect[3], where + ".rect")};
        const Json& window = field(e, "window", where);
        require(window.is_array() && window.size() == 2, where + ".window: expected [t0, t1]");
        ev.window = {as_number(window[0], where + ".window"),
                     as_number(window[1], where + ".window")};
        cfg.events.push_back(ev);
    }

    cfg.horizon = as_number(field(doc, "horizon", "config"), "horizon");
    cfg.sample_tick = as_number(field(doc, "sample_tick", "config"), "sample_tick");
    const Json& brownian = field(doc, "brownian", "config");
    require(brownian.is_boolean(), "brownian: expected true or false");
    cfg.brownian = brownian.get<bool>();
    cfg.speed_multiplier = as_number(field(doc, "speed_multiplier", "config"), "speed_multiplier");
    return cfg;
}

OrderedJson encode(const ScalarDistribution& d) {
    if (d.is_point()) {
        return d.lo;
    }
    return OrderedJson::array({d.lo, d.hi});
}

}  // namespace

double ScalarDistribution::sample(RandomStream& stream) const {
    return is_point() ? lo : stream.uniform(lo, hi);
}

const std::vector<std::string>& builtin_scenario_names() {
    static const std::vector<std::string> names = {"basic", "brownian", "long_time", "fast_cue"};
    return names;
}

std::optional<BuiltinScenario> parse_builtin_name(std::string_view name) {
    if (name == "basic") return BuiltinScenario::basic;
    if (name == "brownian") return BuiltinScenario::brownian;
    if (name == "long_time") return BuiltinScenario::long_time;
    if (name == "fast_cue") return BuiltinScenario::fast_cue;
    return std::nullopt;
}

std::string to_string(BuiltinScenario scenario) {
    return builtin_scenario_names().at(static_cast<std::size_t>(scenario));
}

ScenarioConfig builtin_scenario(BuiltinScenario scenario) {
    ScenarioConfig cfg = basic_table();
    switch (scenario) {
        case BuiltinScenario::basic:
            break;
        case BuiltinScenario::brownian:
            cfg.brownian = true;
            for (auto& d : cfg.disks) {
                d.x0 = ScalarDistribution::uniform(20.0, 580.0);
                d.y0 = ScalarDistribution::uniform(20.0, 280.0);
                d.vx0 = ScalarDistribution::uniform(-20.0, 20.0);
                d.vy0 = ScalarDistribution::uniform(-20.0, 20.0);
            }
            break;
        case BuiltinScenario::long_time:
            cfg.horizon = kLongTicks * kTick;
            for (auto& e : cfg.events) {
                e.window.end = cfg.horizon;
            }
            break;
        case BuiltinScenario::fast_cue:
            cfg.speed_multiplier = 5.0;
            break;
    }
    return cfg;
}

ScenarioConfig builtin_scenario(std::string_view name) {
    auto parsed = parse_builtin_name(name);
    if (!parsed) {
        throw ConfigError("unknown scenario '" + std::string(name) + "'");
    }
    return builtin_scenario(*parsed);
}

void validate(const ScenarioConfig& cfg) {
    const auto& g = cfg.geometry;
    require(std::isfinite(g.width) && g.width > 0.0, "geometry.width must be positive");
    require(std::isfinite(g.height) && g.height > 0.0, "geometry.height must be positive");
    require(std::isfinite(cfg.horizon) && cfg.horizon > 0.0, "horizon must be positive");
    require(std::isfinite(cfg.sample_tick) && cfg.sample_tick > 0.0,
            "sample_tick must be positive");
    require(std::isfinite(cfg.speed_multiplier) && cfg.speed_multiplier > 0.0,
            "speed_multiplier must be positive");
    require(!cfg.disks.empty(), "disks must not be empty");

    std::set<int> ids;
    for (const auto& d : cfg.disks) {
        const std::string who = disk_label(d.id);
        require(ids.insert(d.id).second, who + " is declared twice");
        require(std::isfinite(d.radius) && d.radius > 0.0, who + ": radius must be positive");
        require(g.width >= 2.0 * d.radius && g.height >= 2.0 * d.radius,
                who + ": radius does not fit the table");
        validate_distribution(d.x0, who + ".x0");
        validate_distribution(d.y0, who + ".y0");
        validate_distribution(d.vx0, who + ".vx0");
        validate_distribution(d.vy0, who + ".vy0");
        require(d.x0.lo >= d.radius && d.x0.hi <= g.width - d.radius &&
                    d.y0.lo >= d.radius && d.y0.hi <= g.height - d.radius,
                who + ": initial position may leave the table");
    }
    if (!cfg.brownian) {
        // Without rejection sampling every draw must be overlap-free.
        for (std::size_t i = 0; i < cfg.disks.size(); ++i) {
            for (std::size_t j = i + 1; j < cfg.disks.size(); ++j) {
                const auto& a = cfg.disks[i];
                const auto& b = cfg.disks[j];
                require(box_distance(a, b) >= a.radius + b.radius - kContactTolerance,
                        "disks " + std::to_string(a.id) + " and " + std::to_string(b.id) +
                            " may overlap");
            }
        }
    }

    require(cfg.events.size() >= 2, "at least two events are required");
    std::set<std::string> names;
    for (const auto& e : cfg.events) {
        const std::string who = "event '" + e.name + "'";
        require(!e.name.empty(), "event names must not be empty");
        require(names.insert(e.name).second, who + " is declared twice");
        require(ids.contains(e.disk_id), who + ": unknown disk " + std::to_string(e.disk_id));
        const Rect& r = e.region;
        require(std::isfinite(r.x1) && std::isfinite(r.y1) && std::isfinite(r.x2) &&
                    std::isfinite(r.y2),
                who + ": region must be finite");
        require(r.x1 < r.x2 && r.y1 > r.y2,
                who + ": region must be given as upper-left then lower-right corner");
        require(r.x1 >= 0.0 && r.x2 <= g.width && r.y2 >= 0.0 && r.y1 <= g.height,
                who + ": region lies outside the table");
        require(std::isfinite(e.window.start) && std::isfinite(e.window.end) &&
                    e.window.start >= 0.0 && e.window.start < e.window.end &&
                    e.window.end <= cfg.horizon,
                who + ": window must satisfy 0 <= t0 < t1 <= horizon");
    }
}

ScenarioConfig load_config(std::string_view text) {
    Json doc;
    try {
        doc = Json::parse(text.begin(), text.end());
    } catch (const Json::parse_error& e) {
        throw ConfigError("parse error at " + line_col(text, e.byte == 0 ? 0 : e.byte - 1) + ": " +
                          e.what());
    }
    ScenarioConfig cfg = decode(doc);
    validate(cfg);
    return cfg;
}

ScenarioConfig load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open config file '" + path.string() + "' (file not found)");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return load_config(buf.str());
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

std::string dump_config(const ScenarioConfig& cfg) {
    OrderedJson doc;
    doc["geometry"] = {{"width", cfg.geometry.width}, {"height", cfg.geometry.height}};
    doc["disks"] = OrderedJson::array();
    for (const auto& d : cfg.disks) {
        doc["disks"].push_back({{"id", d.id},
                                {"radius", d.radius},
                                {"x0", encode(d.x0)},
                                {"y0", encode(d.y0)},
                                {"vx0", encode(d.vx0)},
                                {"vy0", encode(d.vy0)}});
    }
    doc["events"] = OrderedJson::array();
    for (const auto& e : cfg.events) {
        doc["events"].push_back(
            {{"name", e.name},
             {"disk_id", e.disk_id},
             {"rect", {e.region.x1, e.region.y1, e.region.x2, e.region.y2}},
             {"window", {e.window.start, e.window.end}}});
    }
    doc["horizon"] = cfg.horizon;
    doc["sample_tick"] = cfg.sample_tick;
    doc["brownian"] = cfg.brownian;
    doc["speed_multiplier"] = cfg.speed_multiplier;
    return doc.dump(2) + "\n";
}

std::size_t disk_index(const ScenarioConfig& config, int disk_id) {
    for (std::size_t k = 0; k < config.disks.size(); ++k) {
        if (config.disks[k].id == disk_id) {
            return k;
        }
    }
    throw ConfigError("unknown " + disk_label(disk_id));
}

TableState sample_initial_state(const ScenarioConfig& config, RandomStream& stream) {
    TableState state;
    state.disks.reserve(config.disks.size());
    std::size_t attempts = 0;

    for (const auto& spec : config.disks) {
        Disk disk;
        disk.id = spec.id;
        disk.radius = spec.radius;
        for (;;) {
            disk.center = {spec.x0.sample(stream), spec.y0.sample(stream)};
            if (!config.brownian) {
                break;
            }
            const bool clear = std::all_of(state.disks.begin(), state.disks.end(), [&](const Disk& o) {
                return norm(o.center - disk.center) >= o.radius + disk.radius;
            });
            if (clear) {
                break;
            }
            if (++attempts > kMaxPlacementAttempts) {
                throw PackingError("could not place " + disk_label(spec.id) + " without overlap after " +
                                   std::to_string(kMaxPlacementAttempts) + " attempts");
            }
        }
        disk.velocity = {spec.vx0.sample(stream), spec.vy0.sample(stream)};
        state.disks.push_back(disk);
    }
    if (!state.disks.empty()) {
        state.disks.front().velocity = state.disks.front().velocity * config.speed_multiplier;
    }
    check_state(state, config.geometry);
    return state;
}

}  // namespace billiard
