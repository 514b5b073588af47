#include "billiard/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "billiard/errors.hpp"

namespace billiard {

namespace {

std::string pair_label(const Disk& a, const Disk& b) {
    return "disks " + std::to_string(a.id) + " and " + std::to_string(b.id);
}

// Time for the disk to reach one of the two cushions along a single axis.
std::optional<WallContact> axis_contact(double pos, double vel, double radius, double extent,
                                        Wall low, Wall high) {
    if (vel > 0.0) {
        return WallContact{std::max(0.0, (extent - radius - pos) / vel), high};
    }
    if (vel < 0.0) {
        return WallContact{std::max(0.0, (radius - pos) / vel), low};
    }
    return std::nullopt;
}

struct Candidate {
    double dt;
    double approach_speed;
    CollisionEvent event;
};

}  // namespace

const char* to_string(Wall wall) {
    switch (wall) {
        case Wall::left: return "left";
        case Wall::right: return "right";
        case Wall::bottom: return "bottom";
        case Wall::top: return "top";
    }
    return "?";
}

CollisionEvent CollisionEvent::disks(double time, std::size_t i, std::size_t j) {
    return {time, Kind::disk_disk, std::min(i, j), std::max(i, j), Wall::left};
}

CollisionEvent CollisionEvent::cushion(double time, std::size_t i, Wall wall) {
    return {time, Kind::disk_wall, i, i, wall};
}

std::pair<Vec2, Vec2> resolve_disk_collision(const Disk& d1, const Disk& d2) {
    const Vec2 sep = d1.center - d2.center;
    const Vec2 rel = d1.velocity - d2.velocity;
    const double dist_sq = norm_sq(sep);
    const double contact = d1.radius + d2.radius;
    if (std::abs(std::sqrt(dist_sq) - contact) > kContactTolerance) {
        throw ContractError(pair_label(d1, d2) + " are not in contact");
    }
    const double approach = dot(rel, sep);
    if (!(approach < 0.0)) {
        throw ContractError(pair_label(d1, d2) + " are not approaching");
    }
    // <v2 - v1, x2 - x1> == <v1 - v2, x1 - x2>, so one coefficient serves both.
    const double k = approach / dist_sq;
    const Vec2 impulse = sep * k;
    return {d1.velocity - impulse, d2.velocity + impulse};
}

std::optional<double> time_to_disk_contact(const Disk& d1, const Disk& d2) {
    const Vec2 sep = d1.center - d2.center;
    const Vec2 rel = d1.velocity - d2.velocity;
    const double b = dot(sep, rel);
    if (b >= 0.0) {
        return std::nullopt;  // receding or parallel
    }
    const double a = norm_sq(rel);
    const double contact = d1.radius + d2.radius;
    const double c = norm_sq(sep) - contact * contact;
    const double disc = b * b - a * c;
    if (disc <= 0.0) {
        return std::nullopt;  // miss or graze
    }
    // Smaller root of a t^2 + 2 b t + c = 0 written without cancellation.
    const double tau = c / (-b + std::sqrt(disc));
    return std::max(0.0, tau);
}

std::optional<WallContact> time_to_wall_contact(const Disk& d, const TableGeometry& geom) {
    const auto horizontal =
        axis_contact(d.center.x, d.velocity.x, d.radius, geom.width, Wall::left, Wall::right);
    const auto vertical =
        axis_contact(d.center.y, d.velocity.y, d.radius, geom.height, Wall::bottom, Wall::top);
    if (horizontal && vertical) {
        return vertical->time < horizontal->time ? vertical : horizontal;
    }
    return horizontal ? horizontal : vertical;
}

Vec2 reflect_off_wall(Vec2 v, Wall wall) {
    switch (wall) {
        case Wall::left:
        case Wall::right: return {-v.x, v.y};
        case Wall::bottom:
        case Wall::top: return {v.x, -v.y};
    }
    return v;
}

void drift(std::span<Disk> disks, double dt) {
    for (auto& d : disks) {
        d.center += d.velocity * dt;
    }
}

double min_pair_gap(std::span<const Disk> disks) {
    double gap = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < disks.size(); ++i) {
        for (std::size_t j = i + 1; j < disks.size(); ++j) {
            gap = std::min(gap, norm(disks[i].center - disks[j].center) - disks[i].radius -
                                    disks[j].radius);
        }
    }
    return gap;
}

void check_state(const TableState& state, const TableGeometry& geom) {
    if (!std::isfinite(state.time)) {
        throw ConsistencyError("non-finite simulation time");
    }
    for (const auto& d : state.disks) {
        if (!is_finite(d.center) || !is_finite(d.velocity)) {
            throw ConsistencyError("disk " + std::to_string(d.id) + " has a non-finite state");
        }
        const double r = d.radius - kContactTolerance;
        if (d.center.x < r || d.center.x > geom.width - r || d.center.y < r ||
            d.center.y > geom.height - r) {
            throw ConsistencyError("disk " + std::to_string(d.id) + " left the table");
        }
    }
    const auto& disks = state.disks;
    for (std::size_t i = 0; i < disks.size(); ++i) {
        for (std::size_t j = i + 1; j < disks.size(); ++j) {
            const double gap =
                norm(disks[i].center - disks[j].center) - disks[i].radius - disks[j].radius;
            if (gap < -kContactTolerance) {
                throw ConsistencyError(pair_label(disks[i], disks[j]) + " overlap by " +
                                       std::to_string(-gap));
            }
        }
    }
}

std::optional<CollisionEvent> advance_to_next_event(TableState& state, const TableGeometry& geom,
                                                    double horizon) {
    if (!(state.time <= horizon)) {
        throw ContractError("state time is past the horizon");
    }
    auto& disks = state.disks;
    const std::size_t n = disks.size();

    // Candidates are generated in tie-break priority order.
    thread_local std::vector<Candidate> candidates;
    candidates.clear();
    double earliest = std::numeric_limits<double>::infinity();

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (auto tau = time_to_disk_contact(disks[i], disks[j])) {
                const double speed = norm(disks[i].velocity - disks[j].velocity);
                candidates.push_back({*tau, speed, CollisionEvent::disks(0.0, i, j)});
                earliest = std::min(earliest, *tau);
            }
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        const Disk& d = disks[i];
        const auto h =
            axis_contact(d.center.x, d.velocity.x, d.radius, geom.width, Wall::left, Wall::right);
        const auto v =
            axis_contact(d.center.y, d.velocity.y, d.radius, geom.height, Wall::bottom, Wall::top);
        // left/right precede bottom/top in wall order
        if (h) {
            candidates.push_back({h->time, std::abs(d.velocity.x), CollisionEvent::cushion(0.0, i, h->wall)});
            earliest = std::min(earliest, h->time);
        }
        if (v) {
            candidates.push_back({v->time, std::abs(d.velocity.y), CollisionEvent::cushion(0.0, i, v->wall)});
            earliest = std::min(earliest, v->time);
        }
    }

    if (candidates.empty() || state.time + earliest > horizon) {
        drift(disks, horizon - state.time);
        state.time = horizon;
        return std::nullopt;
    }

    const Candidate* chosen = nullptr;
    for (const auto& c : candidates) {
        if ((c.dt - earliest) * c.approach_speed <= kContactTolerance) {
            chosen = &c;
            break;
        }
    }

    drift(disks, earliest);
    state.time += earliest;
    CollisionEvent event = chosen->event;
    event.time = state.time;

    if (event.kind == CollisionEvent::Kind::disk_disk) {
        try {
            auto [v1, v2] = resolve_disk_collision(disks[event.i], disks[event.j]);
            disks[event.i].velocity = v1;
            disks[event.j].velocity = v2;
        } catch (const ContractError& e) {
            throw ConsistencyError(std::string("scheduled collision is invalid: ") + e.what());
        }
    } else {
        disks[event.i].velocity = reflect_off_wall(disks[event.i].velocity, event.wall);
    }
    ++state.collision_count;
    check_state(state, geom);
    return event;
}

StepResult step_to_next_event(TableState state, const TableGeometry& geom, double horizon) {
    auto event = advance_to_next_event(state, geom, horizon);
    return {std::move(state), event};
}

double kinetic_energy(std::span<const Disk> disks) {
    double sum = 0.0;
    for (const auto& d : disks) {
        sum += norm_sq(d.velocity);
    }
    return 0.5 * sum;
}

Vec2 total_momentum(std::span<const Disk> disks) {
    Vec2 p;
    for (const auto& d : disks) {
        p += d.velocity;
    }
    return p;
}

}  // namespace billiard
