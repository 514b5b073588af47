#include "billiard/statistics.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "billiard/errors.hpp"
#include "billiard/random_stream.hpp"

namespace billiard {

namespace {

constexpr double kProbabilitySlack = 1e-12;
constexpr double kMinDeviation = 1e-12;

// Category code: bit 1 = E1, bit 0 = E2.
std::vector<std::uint8_t> categories(std::span<const TrialOutcome> outcomes) {
    std::vector<std::uint8_t> codes;
    codes.reserve(outcomes.size());
    for (const auto& o : outcomes) {
        if (o.flags.size() < 2) {
            throw ContractError("outcome " + std::to_string(o.trial_index) +
                                " has fewer than two event flags");
        }
        codes.push_back(static_cast<std::uint8_t>((o.flags[0] ? 2 : 0) | (o.flags[1] ? 1 : 0)));
    }
    return codes;
}

double delta_from_counts(const std::array<std::size_t, 4>& counts, std::size_t n) {
    const double m = static_cast<double>(n);
    const double p12 = static_cast<double>(counts[3]) / m;
    const double p1 = static_cast<double>(counts[2] + counts[3]) / m;
    const double p2 = static_cast<double>(counts[1] + counts[3]) / m;
    return std::abs(p12 - p1 * p2);
}

// Linear interpolation between order statistics (Hyndman-Fan type 7).
double quantile_sorted(std::span<const double> sorted, double q) {
    const double h = static_cast<double>(sorted.size() - 1) * q;
    const auto lo = static_cast<std::size_t>(std::floor(h));
    const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[hi] - sorted[lo]);
}

void check_checkpoints(std::span<const std::size_t> checkpoints, std::size_t n) {
    for (std::size_t k = 0; k < checkpoints.size(); ++k) {
        if (checkpoints[k] < 1 || checkpoints[k] > n ||
            (k > 0 && checkpoints[k] <= checkpoints[k - 1])) {
            throw ContractError("checkpoints must be strictly increasing within [1, N]");
        }
    }
}

}  // namespace

ProbabilityEstimate estimate_probability(std::size_t count, std::size_t n, std::string event) {
    if (n == 0) {
        throw ContractError("probability estimate needs N >= 1");
    }
    if (count > n) {
        throw ContractError("count " + std::to_string(count) + " exceeds N = " + std::to_string(n));
    }
    return {std::move(event), count, n, static_cast<double>(count) / static_cast<double>(n)};
}

double correlation_delta(double p12, double p1, double p2) {
    auto is_prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!is_prob(p12) || !is_prob(p1) || !is_prob(p2)) {
        throw ContractError("correlation_delta arguments must lie in [0, 1]");
    }
    if (p12 > std::min(p1, p2) + kProbabilitySlack) {
        throw ContractError("joint probability exceeds a marginal");
    }
    return std::abs(p12 - p1 * p2);
}

BootstrapResult bootstrap_delta_ci(std::span<const TrialOutcome> outcomes, std::size_t resamples,
                                   double level, std::uint64_t seed) {
    if (outcomes.empty()) {
        throw ContractError("bootstrap needs at least one outcome");
    }
    if (resamples < 100) {
        throw ContractError("bootstrap needs at least 100 resamples");
    }
    if (!(level > 0.0 && level < 1.0)) {
        throw ContractError("confidence level must lie in (0, 1)");
    }
    const auto codes = categories(outcomes);
    const std::size_t n = codes.size();

    std::array<std::size_t, 4> full{};
    for (auto c : codes) {
        ++full[c];
    }

    std::vector<double> deltas(resamples);
    for (std::size_t b = 0; b < resamples; ++b) {
        RandomStream stream(seed, b);
        std::array<std::size_t, 4> counts{};
        for (std::size_t k = 0; k < n; ++k) {
            ++counts[codes[stream.below(n)]];
        }
        deltas[b] = delta_from_counts(counts, n);
    }
    std::sort(deltas.begin(), deltas.end());
    const double lo = quantile_sorted(deltas, 0.5 * (1.0 - level));
    const double hi = quantile_sorted(deltas, 0.5 * (1.0 + level));
    return {delta_from_counts(full, n), 0.5 * (hi - lo)};
}

CorrelationReport correlation_report(std::span<const TrialOutcome> outcomes, std::size_t resamples,
                                     double level, std::uint64_t seed) {
    const auto boot = bootstrap_delta_ci(outcomes, resamples, level, seed);
    std::size_t c1 = 0;
    std::size_t c2 = 0;
    std::size_t c12 = 0;
    for (const auto& o : outcomes) {
        c1 += o.flags[0] ? 1 : 0;
        c2 += o.flags[1] ? 1 : 0;
        c12 += (o.flags[0] && o.flags[1]) ? 1 : 0;
    }
    CorrelationReport r;
    r.n = outcomes.size();
    r.p1 = estimate_probability(c1, r.n).p_hat;
    r.p2 = estimate_probability(c2, r.n).p_hat;
    r.p12 = estimate_probability(c12, r.n).p_hat;
    r.product = r.p1 * r.p2;
    r.delta = correlation_delta(r.p12, r.p1, r.p2);
    r.ci_halfwidth = boot.ci_halfwidth;
    r.ci_level = level;
    r.significant = r.delta - r.ci_halfwidth > 0.0;
    return r;
}

ConvergenceTrace convergence_trace(std::span<const TrialOutcome> outcomes,
                                   std::span<const std::size_t> checkpoints) {
    check_checkpoints(checkpoints, outcomes.size());
    ConvergenceTrace trace;
    trace.rows.reserve(checkpoints.size());
    std::size_t c1 = 0;
    std::size_t c2 = 0;
    std::size_t c12 = 0;
    std::size_t seen = 0;
    for (const std::size_t n : checkpoints) {
        for (; seen < n; ++seen) {
            const auto& o = outcomes[seen];
            c1 += o.flags.at(0) ? 1 : 0;
            c2 += o.flags.at(1) ? 1 : 0;
            c12 += (o.flags[0] && o.flags[1]) ? 1 : 0;
        }
        const double m = static_cast<double>(n);
        TraceRow row{n, static_cast<double>(c1) / m, static_cast<double>(c2) / m,
                     static_cast<double>(c12) / m, 0.0};
        row.product = row.p1 * row.p2;
        trace.rows.push_back(row);
    }
    return trace;
}

std::vector<std::size_t> make_checkpoints(std::size_t n, std::size_t count,
                                          CheckpointSpacing spacing, std::size_t first) {
    if (n < 1 || count < 1) {
        throw ContractError("checkpoints need N >= 1 and count >= 1");
    }
    std::vector<std::size_t> out;
    out.reserve(count);
    if (count == 1) {
        out.push_back(n);
        return out;
    }
    const double dn = static_cast<double>(n);
    if (spacing == CheckpointSpacing::log) {
        const double lo = std::log(static_cast<double>(std::clamp<std::size_t>(first, 1, n)));
        const double hi = std::log(dn);
        for (std::size_t k = 0; k < count; ++k) {
            const double f = static_cast<double>(k) / static_cast<double>(count - 1);
            out.push_back(static_cast<std::size_t>(std::llround(std::exp(lo + f * (hi - lo)))));
        }
    } else {
        for (std::size_t k = 1; k <= count; ++k) {
            out.push_back(static_cast<std::size_t>(
                std::llround(dn * static_cast<double>(k) / static_cast<double>(count))));
        }
    }
    for (auto& c : out) {
        c = std::clamp<std::size_t>(c, 1, n);
    }
    out.back() = n;
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

std::vector<FluctuationPoint> fluctuation_profile(const ConvergenceTrace& trace) {
    std::vector<FluctuationPoint> points;
    if (trace.rows.empty()) {
        return points;
    }
    const TraceRow& ref = trace.rows.back();
    const double total = static_cast<double>(ref.n);
    points.reserve(trace.rows.size() - 1);
    for (std::size_t k = 0; k + 1 < trace.rows.size(); ++k) {
        const auto& row = trace.rows[k];
        const double n = static_cast<double>(row.n);
        const double scale = std::sqrt(total / (total - n));
        points.push_back({n, std::abs(row.p12 - ref.p12) * scale});
    }
    return points;
}

double fit_log_log_slope(std::span<const FluctuationPoint> points) {
    double sx = 0.0;
    double sy = 0.0;
    double sxx = 0.0;
    double sxy = 0.0;
    std::size_t m = 0;
    for (const auto& p : points) {
        if (!(p.deviation > kMinDeviation) || !(p.n > 0.0)) {
            continue;
        }
        const double x = std::log(p.n);
        const double y = std::log(p.deviation);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++m;
    }
    if (m < 3) {
        throw InsufficientDataError("slope fit needs at least 3 points with non-zero deviation, got " +
                                    std::to_string(m));
    }
    const double mm = static_cast<double>(m);
    const double denom = mm * sxx - sx * sx;
    if (!(denom > 0.0)) {
        throw InsufficientDataError("slope fit needs distinct checkpoint sizes");
    }
    return (mm * sxy - sx * sy) / denom;
}

double fit_fluctuation_slope(const ConvergenceTrace& trace) {
    const auto& rows = trace.rows;
    if (rows.size() < 5) {
        throw ContractError("slope fit needs at least 5 checkpoints");
    }
    if (static_cast<double>(rows.back().n) < 10.0 * static_cast<double>(rows.front().n)) {
        throw ContractError("slope fit needs checkpoints spanning at least one decade");
    }
    const auto profile = fluctuation_profile(trace);
    return fit_log_log_slope(profile);
}

}  // namespace billiard
