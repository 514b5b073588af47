#include "billiard/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "billiard/errors.hpp"

namespace billiard {

namespace {

struct TrackedEvent {
    std::size_t disk;
    Rect region;
    TimeWindow window;
};

Vec2 lerp(Vec2 a, Vec2 b, double s) { return a + (b - a) * s; }

// Tests the part of one flight [t0, t1] (p0 -> p1) that lies inside the window.
bool flight_hits(Vec2 p0, Vec2 p1, double t0, double t1, const TrackedEvent& ev) {
    const double lo = std::max(t0, ev.window.start);
    const double hi = std::min(t1, ev.window.end);
    if (lo > hi) {
        return false;
    }
    const double span = t1 - t0;
    if (span <= 0.0) {
        return ev.region.contains(p0);
    }
    const Vec2 a = lo > t0 ? lerp(p0, p1, (lo - t0) / span) : p0;
    const Vec2 b = hi < t1 ? lerp(p0, p1, (hi - t0) / span) : p1;
    return segment_crosses_rect(a, b, ev.region);
}

void check_checkpoints(std::span<const std::size_t> checkpoints, std::size_t n) {
    for (std::size_t k = 0; k < checkpoints.size(); ++k) {
        if (checkpoints[k] < 1 || checkpoints[k] > n) {
            throw ContractError("checkpoint " + std::to_string(checkpoints[k]) +
                                " is outside [1, N]");
        }
        if (k > 0 && checkpoints[k] <= checkpoints[k - 1]) {
            throw ContractError("checkpoints must be strictly increasing");
        }
    }
}

}  // namespace

bool segment_crosses_rect(Vec2 p0, Vec2 p1, const Rect& rect) {
    // Liang-Barsky clipping against the closed rectangle.
    const Vec2 d = p1 - p0;
    double enter = 0.0;
    double leave = 1.0;
    const double p[4] = {-d.x, d.x, -d.y, d.y};
    const double q[4] = {p0.x - rect.left(), rect.right() - p0.x, p0.y - rect.bottom(),
                         rect.top() - p0.y};
    for (int k = 0; k < 4; ++k) {
        if (p[k] == 0.0) {
            if (q[k] < 0.0) {
                return false;
            }
            continue;
        }
        const double r = q[k] / p[k];
        if (p[k] < 0.0) {
            enter = std::max(enter, r);
        } else {
            leave = std::min(leave, r);
        }
        if (enter > leave) {
            return false;
        }
    }
    return true;
}

TrialOutcome run_trial(const ScenarioConfig& config, std::uint64_t trial_index,
                       std::uint64_t master_seed) {
    try {
        RandomStream stream(master_seed, trial_index);
        TableState state = sample_initial_state(config, stream);

        std::vector<TrackedEvent> tracked;
        tracked.reserve(config.events.size());
        for (const auto& e : config.events) {
            tracked.push_back({disk_index(config, e.disk_id), e.region, e.window});
        }

        TrialOutcome out;
        out.trial_index = trial_index;
        out.flags.assign(tracked.size(), false);

        std::vector<Vec2> before(state.disks.size());
        for (;;) {
            const double t0 = state.time;
            for (std::size_t k = 0; k < before.size(); ++k) {
                before[k] = state.disks[k].center;
            }
            const auto event = advance_to_next_event(state, config.geometry, config.horizon);
            for (std::size_t k = 0; k < tracked.size(); ++k) {
                if (!out.flags[k]) {
                    const auto& ev = tracked[k];
                    out.flags[k] = flight_hits(before[ev.disk], state.disks[ev.disk].center, t0,
                                               state.time, ev);
                }
            }
            if (!event) {
                break;
            }
        }
        out.collision_count = state.collision_count;
        out.final_time = state.time;
        return out;
    } catch (const ConsistencyError& e) {
        throw TrialError(trial_index, master_seed, e.what());
    } catch (const PackingError& e) {
        throw TrialError(trial_index, master_seed, e.what());
    }
}

EnsembleResult run_ensemble(const ScenarioConfig& config, std::size_t n, std::uint64_t master_seed,
                            std::span<const std::size_t> checkpoints, unsigned workers) {
    if (n < 1) {
        throw ContractError("ensemble size must be at least 1");
    }
    check_checkpoints(checkpoints, n);
    validate(config);
    if (config.events.size() < 2) {
        throw ContractError("ensemble needs at least two events");
    }

    if (workers == 0) {
        workers = std::max(1u, std::thread::hardware_concurrency());
    }
    workers = static_cast<unsigned>(std::min<std::size_t>(workers, n));

    std::vector<TrialOutcome> outcomes(n);
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> first_failure{n};
    std::mutex failure_mutex;
    std::exception_ptr failure;

    auto work = [&] {
        constexpr std::size_t kChunk = 8;
        for (;;) {
            const std::size_t begin = next.fetch_add(kChunk);
            if (begin >= n) {
                return;
            }
            const std::size_t end = std::min(n, begin + kChunk);
            for (std::size_t i = begin; i < end; ++i) {
                // Lower indices still run so the reported failure is the same
                // for every worker count.
                if (i > first_failure.load()) {
                    return;
                }
                try {
                    outcomes[i] = run_trial(config, i, master_seed);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (i < first_failure.load()) {
                        first_failure.store(i);
                        failure = std::current_exception();
                    }
                }
            }
        }
    };

    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(workers);
        for (unsigned w = 0; w < workers; ++w) {
            pool.emplace_back(work);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }

    EnsembleResult result;
    result.n = n;
    result.master_seed = master_seed;
    result.event_counts.assign(config.events.size(), 0);
    result.checkpoints.reserve(checkpoints.size());
    auto cp = checkpoints.begin();
    for (std::size_t i = 0; i < n; ++i) {
        const auto& o = outcomes[i];
        for (std::size_t k = 0; k < o.flags.size(); ++k) {
            result.event_counts[k] += o.flags[k] ? 1 : 0;
        }
        result.joint_count += (o.flags[0] && o.flags[1]) ? 1 : 0;
        if (cp != checkpoints.end() && *cp == i + 1) {
            CheckpointEntry row;
            row.n = i + 1;
            row.count1 = result.event_counts[0];
            row.count2 = result.event_counts[1];
            row.count12 = result.joint_count;
            const double m = static_cast<double>(row.n);
            row.p1 = static_cast<double>(row.count1) / m;
            row.p2 = static_cast<double>(row.count2) / m;
            row.p12 = static_cast<double>(row.count12) / m;
            row.product = row.p1 * row.p2;
            result.checkpoints.push_back(row);
            ++cp;
        }
    }
    result.outcomes = std::move(outcomes);
    return result;
}

std::vector<TableState> trajectory_snapshots(TableState state, const TableGeometry& geom,
                                             std::span<const double> times) {
    std::vector<TableState> snaps;
    snaps.reserve(times.size());
    for (const double t : times) {
        if (t < state.time) {
            throw ContractError("snapshot times must be non-decreasing and not in the past");
        }
        while (advance_to_next_event(state, geom, t)) {
        }
        snaps.push_back(state);
    }
    return snaps;
}

}  // namespace billiard
