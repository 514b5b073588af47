#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "billiard/dynamics.hpp"
#include "billiard/scenario.hpp"

namespace billiard {

struct TrialOutcome {
    std::uint64_t trial_index = 0;
    std::vector<bool> flags;  // one per RegionEvent, in declaration order
    std::uint64_t collision_count = 0;
    double final_time = 0.0;

    bool e1() const { return flags.at(0); }
    bool e2() const { return flags.at(1); }

    bool operator==(const TrialOutcome&) const = default;
};

/// Running estimates over the first n trials.
struct CheckpointEntry {
    std::size_t n = 0;
    std::size_t count1 = 0;
    std::size_t count2 = 0;
    std::size_t count12 = 0;
    double p1 = 0.0;
    double p2 = 0.0;
    double p12 = 0.0;
    double product = 0.0;

    bool operator==(const CheckpointEntry&) const = default;
};

struct EnsembleResult {
    std::size_t n = 0;
    std::uint64_t master_seed = 0;
    std::vector<std::size_t> event_counts;  // per RegionEvent
    std::size_t joint_count = 0;            // E1 and E2
    std::vector<TrialOutcome> outcomes;     // indexed by trial
    std::vector<CheckpointEntry> checkpoints;

    bool operator==(const EnsembleResult&) const = default;
};

/// True iff the closed segment p0-p1 meets the closed rectangle.
bool segment_crosses_rect(Vec2 p0, Vec2 p1, const Rect& rect);

/// Simulates table `trial_index` of the ensemble to the horizon. Region
/// passages are detected on the continuous center path of each flight,
/// clipped to the event window. Simulation failures are rethrown as
/// TrialError carrying (trial_index, master_seed).
TrialOutcome run_trial(const ScenarioConfig& config, std::uint64_t trial_index,
                       std::uint64_t master_seed);

/// Runs trials 0..n-1 on `workers` threads (0 = hardware concurrency).
/// The result depends only on (config, n, master_seed, checkpoints). If any
/// trial fails, the failure with the lowest trial index is rethrown.
EnsembleResult run_ensemble(const ScenarioConfig& config, std::size_t n, std::uint64_t master_seed,
                            std::span<const std::size_t> checkpoints, unsigned workers = 0);

/// States of an evolving table at each of the given (sorted) times.
std::vector<TableState> trajectory_snapshots(TableState state, const TableGeometry& geom,
                                             std::span<const double> times);

}  // namespace billiard
