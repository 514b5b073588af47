#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "billiard/ensemble.hpp"

namespace billiard {

inline constexpr std::size_t kDefaultBootstrapResamples = 1000;
inline constexpr double kDefaultCiLevel = 0.95;

struct ProbabilityEstimate {
    std::string event;
    std::size_t count = 0;
    std::size_t n = 0;
    double p_hat = 0.0;
};

/// count / n. Throws ContractError if n == 0 or count > n.
ProbabilityEstimate estimate_probability(std::size_t count, std::size_t n, std::string event = {});

/// |p12 - p1 p2|. Arguments must be probabilities with p12 <= min(p1, p2).
double correlation_delta(double p12, double p1, double p2);

struct BootstrapResult {
    double delta = 0.0;         // point estimate on the full sample
    double ci_halfwidth = 0.0;  // half the width of the central interval
};

/// Table-level nonparametric bootstrap of delta over the (E1, E2) flags.
/// Resample b draws its N indices from RandomStream(seed, b), so the result is
/// a pure function of the arguments.
BootstrapResult bootstrap_delta_ci(std::span<const TrialOutcome> outcomes, std::size_t resamples,
                                   double level, std::uint64_t seed);

struct CorrelationReport {
    std::size_t n = 0;
    double p1 = 0.0;
    double p2 = 0.0;
    double p12 = 0.0;
    double product = 0.0;
    double delta = 0.0;
    double ci_halfwidth = 0.0;
    double ci_level = kDefaultCiLevel;
    bool significant = false;  // delta - ci_halfwidth > 0
};

CorrelationReport correlation_report(std::span<const TrialOutcome> outcomes, std::size_t resamples,
                                     double level, std::uint64_t seed);

struct TraceRow {
    std::size_t n = 0;
    double p1 = 0.0;
    double p2 = 0.0;
    double p12 = 0.0;
    double product = 0.0;

    bool operator==(const TraceRow&) const = default;
};

struct ConvergenceTrace {
    std::vector<TraceRow> rows;
};

/// Prefix estimates (trial-index order) at each checkpoint.
ConvergenceTrace convergence_trace(std::span<const TrialOutcome> outcomes,
                                   std::span<const std::size_t> checkpoints);

enum class CheckpointSpacing { linear, log };

/// `count` checkpoints ending at n. Log spacing starts at min(first, n);
/// linear spacing is n/count, 2n/count, ... Duplicates after rounding are
/// dropped, so fewer than `count` may be returned.
std::vector<std::size_t> make_checkpoints(std::size_t n, std::size_t count,
                                          CheckpointSpacing spacing, std::size_t first = 100);

struct FluctuationPoint {
    double n = 0.0;
    double deviation = 0.0;
};

// Deviation of each prefix estimate of p12 from the final row, scaled by
// sqrt(N / (N - n)). The prefix shares its first n trials with the reference,
// so the raw deviation has variance sigma^2 (1/n - 1/N); after scaling it is
// sigma^2 / n. The final row is omitted.
std::vector<FluctuationPoint> fluctuation_profile(const ConvergenceTrace& trace);

/// Least-squares slope of log(deviation) against log(n), ignoring points with
/// deviation <= 1e-12. Throws InsufficientDataError with fewer than 3 points.
double fit_log_log_slope(std::span<const FluctuationPoint> points);

/// Slope of the p12 fluctuation profile; about -0.5 for i.i.d. trials.
/// Requires at least 5 checkpoints spanning a decade in n.
double fit_fluctuation_slope(const ConvergenceTrace& trace);

}  // namespace billiard
