#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "billiard/vec2.hpp"

namespace billiard {

/// Distance tolerance (table units) for contact and overlap tests.
inline constexpr double kContactTolerance = 1e-9;

/// Equal-mass, non-spinning hard disk.
struct Disk {
    int id = 0;
    Vec2 center;
    Vec2 velocity;
    double radius = 1.0;

    bool operator==(const Disk&) const = default;
};

/// Rectangular box [0, width] x [0, height] with (0, 0) at the lower left.
struct TableGeometry {
    double width = 0.0;
    double height = 0.0;

    bool operator==(const TableGeometry&) const = default;
};

// Declaration order is the tie-break order.
enum class Wall : std::uint8_t { left, right, bottom, top };

const char* to_string(Wall wall);

struct CollisionEvent {
    enum class Kind : std::uint8_t { disk_disk, disk_wall };

    double time = 0.0;
    Kind kind = Kind::disk_disk;
    std::size_t i = 0;  // first disk index
    std::size_t j = 0;  // second disk index (disk_disk only), i < j
    Wall wall = Wall::left;  // disk_wall only

    static CollisionEvent disks(double time, std::size_t i, std::size_t j);
    static CollisionEvent cushion(double time, std::size_t i, Wall wall);

    bool operator==(const CollisionEvent&) const = default;
};

struct TableState {
    double time = 0.0;
    std::vector<Disk> disks;
    std::uint64_t collision_count = 0;

    bool operator==(const TableState&) const = default;
};

struct WallContact {
    double time;
    Wall wall;
};

/// Post-collision velocities of two touching, approaching disks:
///   v1' = v1 - <v1 - v2, x1 - x2> / |x1 - x2|^2 (x1 - x2), symmetric for v2'.
/// Throws ContractError if the disks are not in contact or are receding.
std::pair<Vec2, Vec2> resolve_disk_collision(const Disk& d1, const Disk& d2);

/// Time until the two disks touch while approaching, or nullopt if they never
/// do. Returns 0 for a pair already touching (within tolerance) and closing.
std::optional<double> time_to_disk_contact(const Disk& d1, const Disk& d2);

/// Earliest time at which the disk reaches a cushion. Exact corner ties go to
/// the lower wall in the order left < right < bottom < top.
std::optional<WallContact> time_to_wall_contact(const Disk& d, const TableGeometry& geom);

/// Specular reflection: negates the component normal to `wall`.
Vec2 reflect_off_wall(Vec2 v, Wall wall);

struct StepResult {
    TableState state;
    std::optional<CollisionEvent> event;
};

/// Advances to the next collision or to `horizon`, whichever comes first.
///
/// Events whose contact lies within kContactTolerance (measured as distance
/// travelled at the approach speed) of the earliest one are treated as
/// simultaneous and ordered disk-disk before disk-wall, then by lowest (i, j),
/// then by disk index and wall order. Exactly one event is applied per call.
StepResult step_to_next_event(TableState state, const TableGeometry& geom, double horizon);

/// In-place form of step_to_next_event.
std::optional<CollisionEvent> advance_to_next_event(TableState& state, const TableGeometry& geom,
                                                    double horizon);

/// Free flight of every disk by dt.
void drift(std::span<Disk> disks, double dt);

/// Throws ConsistencyError if any pair overlaps or any disk leaves the box
/// beyond kContactTolerance, or if a value is non-finite.
void check_state(const TableState& state, const TableGeometry& geom);

/// Smallest surface gap over all pairs (negative means overlap).
double min_pair_gap(std::span<const Disk> disks);

/// 0.5 * sum |v|^2 (unit masses).
double kinetic_energy(std::span<const Disk> disks);
Vec2 total_momentum(std::span<const Disk> disks);

}  // namespace billiard
