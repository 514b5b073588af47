#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "billiard/dynamics.hpp"
#include "billiard/random_stream.hpp"

namespace billiard {

/// A point value or a uniform interval.
struct ScalarDistribution {
    enum class Kind : std::uint8_t { point, uniform };

    Kind kind = Kind::point;
    double lo = 0.0;
    double hi = 0.0;

    static ScalarDistribution point(double value) { return {Kind::point, value, value}; }
    static ScalarDistribution uniform(double lo, double hi) { return {Kind::uniform, lo, hi}; }

    bool is_point() const { return kind == Kind::point; }

    /// Point distributions consume nothing from the stream; uniform ones
    /// consume exactly one draw.
    double sample(RandomStream& stream) const;

    bool operator==(const ScalarDistribution&) const = default;
};

struct DiskSpec {
    int id = 0;
    double radius = 0.0;
    ScalarDistribution x0;
    ScalarDistribution y0;
    ScalarDistribution vx0;
    ScalarDistribution vy0;

    bool operator==(const DiskSpec&) const = default;
};

/// Axis-aligned rectangle given by its upper-left (x1, y1) and lower-right
/// (x2, y2) corners, so x1 < x2 and y1 > y2. Closed: the boundary is inside.
struct Rect {
    double x1 = 0.0;
    double y1 = 0.0;
    double x2 = 0.0;
    double y2 = 0.0;

    double left() const { return x1; }
    double right() const { return x2; }
    double bottom() const { return y2; }
    double top() const { return y1; }

    bool contains(Vec2 p) const {
        return p.x >= x1 && p.x <= x2 && p.y >= y2 && p.y <= y1;
    }

    bool operator==(const Rect&) const = default;
};

struct TimeWindow {
    double start = 0.0;
    double end = 0.0;

    bool operator==(const TimeWindow&) const = default;
};

/// "Disk `disk_id` has its center inside `region` at least once during `window`."
struct RegionEvent {
    std::string name;
    int disk_id = 0;
    Rect region;
    TimeWindow window;

    bool operator==(const RegionEvent&) const = default;
};

/// Full description of one experiment. The first disk is the cue ball (the
/// one speed_multiplier applies to); the first two events are E1 and E2.
struct ScenarioConfig {
    TableGeometry geometry;
    std::vector<DiskSpec> disks;
    std::vector<RegionEvent> events;
    double horizon = 0.0;
    double sample_tick = 0.1;
    bool brownian = false;
    double speed_multiplier = 1.0;

    bool operator==(const ScenarioConfig&) const = default;
};

enum class BuiltinScenario : std::uint8_t { basic, brownian, long_time, fast_cue };

inline constexpr std::size_t kMaxPlacementAttempts = 1'000'000;

const std::vector<std::string>& builtin_scenario_names();
std::optional<BuiltinScenario> parse_builtin_name(std::string_view name);
std::string to_string(BuiltinScenario scenario);

ScenarioConfig builtin_scenario(BuiltinScenario scenario);

/// Throws ConfigError for an unknown name.
ScenarioConfig builtin_scenario(std::string_view name);

/// Throws ConfigError naming the first violated invariant.
void validate(const ScenarioConfig& config);

/// Parses and validates a JSON config document. Unknown keys are rejected.
/// Parse errors report line and column.
ScenarioConfig load_config(std::string_view text);

/// Reads and parses a config file; a missing file is a ConfigError.
ScenarioConfig load_config_file(const std::filesystem::path& path);

/// Serializes to the format accepted by load_config.
std::string dump_config(const ScenarioConfig& config);

/// Index into ScenarioConfig::disks (and TableState::disks) of the disk with
/// the given id. Throws ConfigError if absent.
std::size_t disk_index(const ScenarioConfig& config, int disk_id);

/// Draws an initial table from `stream`. Disks are sampled in declaration
/// order as (x0, y0, vx0, vy0). In brownian mode a disk whose position
/// overlaps an already placed disk has its position redrawn; more than
/// kMaxPlacementAttempts redraws in total raises PackingError.
TableState sample_initial_state(const ScenarioConfig& config, RandomStream& stream);

}  // namespace billiard
