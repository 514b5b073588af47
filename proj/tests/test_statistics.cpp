#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "billiard/errors.hpp"
#include "billiard/statistics.hpp"

using namespace billiard;

namespace {

// Draws (E1, E2) pairs from a joint law given by P(E1), P(E2), P(E1 and E2).
std::vector<TrialOutcome> synthetic(std::mt19937_64& rng, std::size_t n, double p1, double p2,
                                    double p12) {
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<TrialOutcome> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double x = u(rng);
        // cells: [both | E1 only | E2 only | neither]
        const bool both = x < p12;
        const bool only1 = !both && x < p1;
        const bool only2 = !both && !only1 && x < p1 + p2 - p12;
        out[k].trial_index = k;
        out[k].flags = {both || only1, both || only2};
    }
    return out;
}

double true_delta(double p1, double p2, double p12) { return std::abs(p12 - p1 * p2); }

}  // namespace

TEST_SUITE("statistics") {

TEST_CASE("probability estimates") {
    CHECK(estimate_probability(0, 100).p_hat == 0.0);
    CHECK(estimate_probability(100, 100).p_hat == 1.0);
    const auto p = estimate_probability(437, 5000, "green");
    CHECK(p.p_hat == 437.0 / 5000.0);
    CHECK(std::abs(p.p_hat - 0.0874) < 1e-16);
    CHECK(p.event == "green");
    CHECK(p.count == 437);
    CHECK(p.n == 5000);
    CHECK_THROWS_AS(estimate_probability(1, 0), ContractError);
    CHECK_THROWS_AS(estimate_probability(101, 100), ContractError);
}

TEST_CASE("correlation delta") {
    CHECK(correlation_delta(0.12, 0.3, 0.4) <= 1e-16);
    CHECK(correlation_delta(0.25, 0.5, 0.5) == 0.0);
    const double p = 0.37;
    CHECK(correlation_delta(p, p, p) == doctest::Approx(p - p * p));
    CHECK_THROWS_AS(correlation_delta(0.5, 0.4, 0.9), ContractError);
    CHECK_THROWS_AS(correlation_delta(0.1, 1.2, 0.3), ContractError);
    CHECK_THROWS_AS(correlation_delta(-0.1, 0.2, 0.3), ContractError);
}

TEST_CASE("correlation delta is symmetric and matches the count form") {
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<std::size_t> un(1, 100000);
    for (int k = 0; k < 2000; ++k) {
        const std::size_t n = un(rng);
        std::uniform_int_distribution<std::size_t> uc(0, n);
        const std::size_t c1 = uc(rng);
        const std::size_t c2 = uc(rng);
        std::uniform_int_distribution<std::size_t> uj(c1 + c2 > n ? c1 + c2 - n : 0, std::min(c1, c2));
        const std::size_t c12 = uj(rng);
        const auto p1 = estimate_probability(c1, n);
        const auto p2 = estimate_probability(c2, n);
        const auto p12 = estimate_probability(c12, n);
        const double d = correlation_delta(p12.p_hat, p1.p_hat, p2.p_hat);
        CHECK(d == correlation_delta(p12.p_hat, p2.p_hat, p1.p_hat));
        const double nn = static_cast<double>(n);
        const double from_counts = std::abs(static_cast<double>(c12) / nn -
                                            static_cast<double>(c1) * static_cast<double>(c2) / (nn * nn));
        CHECK(std::abs(d - from_counts) <= 1e-15);
    }
}

TEST_CASE("bootstrap: identical outcomes have zero width") {
    std::vector<TrialOutcome> same(500, TrialOutcome{0, {true, false}, 0, 0.0});
    const auto b = bootstrap_delta_ci(same, 200, 0.95, 1);
    CHECK(b.delta == 0.0);
    CHECK(b.ci_halfwidth == 0.0);
}

TEST_CASE("bootstrap: reproducible given its seed and invariant to relabeling") {
    std::mt19937_64 rng(21);
    auto o = synthetic(rng, 3000, 0.3, 0.4, 0.18);
    const auto a = bootstrap_delta_ci(o, 500, 0.95, 1234);
    const auto b = bootstrap_delta_ci(o, 500, 0.95, 1234);
    CHECK(a.delta == b.delta);
    CHECK(a.ci_halfwidth == b.ci_halfwidth);
    const auto c = bootstrap_delta_ci(o, 500, 0.95, 4321);
    CHECK(c.ci_halfwidth != a.ci_halfwidth);

    for (auto& t : o) {
        t.flags = {t.flags[1], t.flags[0]};
    }
    const auto swapped = bootstrap_delta_ci(o, 500, 0.95, 1234);
    CHECK(swapped.delta == doctest::Approx(a.delta).epsilon(1e-14));
    CHECK(swapped.ci_halfwidth == doctest::Approx(a.ci_halfwidth).epsilon(1e-12));
}

TEST_CASE("bootstrap: preconditions") {
    std::vector<TrialOutcome> o(10, TrialOutcome{0, {true, true}, 0, 0.0});
    CHECK_THROWS_AS(bootstrap_delta_ci(o, 99, 0.95, 0), ContractError);
    CHECK_THROWS_AS(bootstrap_delta_ci(o, 100, 1.0, 0), ContractError);
    CHECK_THROWS_AS(bootstrap_delta_ci(o, 100, 0.0, 0), ContractError);
    CHECK_THROWS_AS(bootstrap_delta_ci({}, 100, 0.95, 0), ContractError);
}

TEST_CASE("bootstrap calibration: independent events, N = 5000") {
    std::mt19937_64 rng(5000);
    int below = 0;
    for (int rep = 0; rep < 50; ++rep) {
        const auto o = synthetic(rng, 5000, 0.3, 0.4, 0.12);
        const auto b = bootstrap_delta_ci(o, 1000, 0.95, static_cast<std::uint64_t>(rep));
        below += b.delta < b.ci_halfwidth ? 1 : 0;
    }
    MESSAGE("delta below halfwidth in " << below << " of 50");
    CHECK(below >= 45);
}

TEST_CASE("bootstrap: halving N widens the interval by about sqrt(2)") {
    std::mt19937_64 rng(77);
    double ratio_sum = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        const auto full = synthetic(rng, 8000, 0.3, 0.4, 0.16);
        const std::span<const TrialOutcome> half(full.data(), 4000);
        const auto a = bootstrap_delta_ci(full, 1000, 0.95, 2 * static_cast<std::uint64_t>(rep));
        const auto b = bootstrap_delta_ci(half, 1000, 0.95, 2 * static_cast<std::uint64_t>(rep) + 1);
        ratio_sum += b.ci_halfwidth / a.ci_halfwidth;
    }
    const double mean_ratio = ratio_sum / 20.0;
    MESSAGE("mean halfwidth ratio " << mean_ratio);
    CHECK(mean_ratio >= 1.2);
    CHECK(mean_ratio <= 1.7);
}

TEST_CASE("bootstrap: estimate converges to the true dependence at N = 50000") {
    std::mt19937_64 rng(50000);
    const double delta = true_delta(0.3, 0.4, 0.18);
    int within = 0;
    for (int rep = 0; rep < 20; ++rep) {
        const auto o = synthetic(rng, 50000, 0.3, 0.4, 0.18);
        const auto b = bootstrap_delta_ci(o, 200, 0.95, static_cast<std::uint64_t>(rep));
        within += std::abs(b.delta - delta) < 3.0 * b.ci_halfwidth ? 1 : 0;
    }
    CHECK(within >= 19);
}

TEST_CASE("correlation report") {
    std::mt19937_64 rng(3);
    const auto o = synthetic(rng, 4000, 0.3, 0.4, 0.18);
    const auto r = correlation_report(o, 400, 0.9, 9);
    const auto b = bootstrap_delta_ci(o, 400, 0.9, 9);
    CHECK(r.n == 4000);
    CHECK(r.delta == b.delta);
    CHECK(r.ci_halfwidth == b.ci_halfwidth);
    CHECK(r.ci_level == 0.9);
    CHECK(r.product == r.p1 * r.p2);
    CHECK(r.delta == correlation_delta(r.p12, r.p1, r.p2));
    CHECK(r.significant == (r.delta - r.ci_halfwidth > 0.0));
    CHECK(r.significant);
}

TEST_CASE("convergence trace") {
    std::mt19937_64 rng(4);
    const auto o = synthetic(rng, 1000, 0.5, 0.5, 0.3);
    SUBCASE("a single checkpoint at N is the full sample") {
        const std::vector<std::size_t> cps{1000};
        const auto t = convergence_trace(o, cps);
        REQUIRE(t.rows.size() == 1);
        const auto r = correlation_report(o, 100, 0.95, 0);
        CHECK(t.rows[0].n == 1000);
        CHECK(t.rows[0].p1 == r.p1);
        CHECK(t.rows[0].p2 == r.p2);
        CHECK(t.rows[0].p12 == r.p12);
        CHECK(t.rows[0].product == r.product);
    }
    SUBCASE("prefix estimates") {
        const std::vector<std::size_t> cps{1, 10, 999};
        const auto t = convergence_trace(o, cps);
        for (std::size_t k = 0; k < cps.size(); ++k) {
            std::size_t c12 = 0;
            for (std::size_t i = 0; i < cps[k]; ++i) {
                c12 += o[i].e1() && o[i].e2();
            }
            CHECK(t.rows[k].p12 == static_cast<double>(c12) / static_cast<double>(cps[k]));
        }
    }
    SUBCASE("constant outcomes give identical rows") {
        std::vector<TrialOutcome> same(300, TrialOutcome{0, {true, false}, 0, 0.0});
        const auto cps = make_checkpoints(300, 10, CheckpointSpacing::linear);
        const auto t = convergence_trace(same, cps);
        for (const auto& row : t.rows) {
            CHECK(row.p1 == 1.0);
            CHECK(row.p2 == 0.0);
            CHECK(row.p12 == 0.0);
            CHECK(row.product == 0.0);
        }
    }
}

TEST_CASE("checkpoint schedules") {
    CHECK(make_checkpoints(1000, 4, CheckpointSpacing::linear) ==
          std::vector<std::size_t>{250, 500, 750, 1000});
    const auto log = make_checkpoints(5000, 50, CheckpointSpacing::log);
    CHECK(log.front() == 100);
    CHECK(log.back() == 5000);
    CHECK(std::adjacent_find(log.begin(), log.end(), std::greater_equal<>()) == log.end());
    CHECK(log.size() <= 50);
    CHECK(log.size() >= 45);
    CHECK(make_checkpoints(50, 10, CheckpointSpacing::log).front() == 50);
    CHECK(make_checkpoints(7, 1, CheckpointSpacing::log) == std::vector<std::size_t>{7});
}

TEST_CASE("fluctuation slope: i.i.d. trials give about -1/2") {
    std::mt19937_64 rng(100000);
    const auto cps = make_checkpoints(100000, 50, CheckpointSpacing::log);
    int inside = 0;
    for (int rep = 0; rep < 30; ++rep) {
        const auto o = synthetic(rng, 100000, 0.3, 0.4, 0.12);
        const double slope = fit_fluctuation_slope(convergence_trace(o, cps));
        inside += slope >= -0.7 && slope <= -0.3 ? 1 : 0;
    }
    MESSAGE("slope inside [-0.7, -0.3] in " << inside << " of 30");
    CHECK(inside >= 24);
}

TEST_CASE("fluctuation slope: degenerate traces") {
    std::vector<TrialOutcome> all_true(5000, TrialOutcome{0, {true, true}, 0, 0.0});
    const auto cps = make_checkpoints(5000, 20, CheckpointSpacing::log);
    CHECK_THROWS_AS(fit_fluctuation_slope(convergence_trace(all_true, cps)), InsufficientDataError);

    std::mt19937_64 rng(1);
    const auto o = synthetic(rng, 5000, 0.3, 0.4, 0.12);
    const std::vector<std::size_t> two{100, 5000};
    CHECK_THROWS_AS(fit_fluctuation_slope(convergence_trace(o, two)), ContractError);
}

TEST_CASE("log-log fit recovers an exact power law") {
    std::vector<FluctuationPoint> pts;
    for (double n = 10; n < 1e5; n *= 1.7) {
        pts.push_back({n, 3.0 * std::pow(n, -0.5)});
    }
    pts.push_back({50, 0.0});  // ignored
    CHECK(fit_log_log_slope(pts) == doctest::Approx(-0.5).epsilon(1e-12));
    const std::vector<FluctuationPoint> few{{10, 1.0}, {100, 0.5}};
    CHECK_THROWS_AS(fit_log_log_slope(few), InsufficientDataError);
}

TEST_CASE("fluctuation profile scales out the shared prefix") {
    ConvergenceTrace t;
    t.rows = {{100, 0, 0, 0.30, 0}, {400, 0, 0, 0.26, 0}, {1000, 0, 0, 0.25, 0}};
    const auto p = fluctuation_profile(t);
    REQUIRE(p.size() == 2);
    CHECK(p[0].n == 100);
    CHECK(p[0].deviation == doctest::Approx(0.05 * std::sqrt(1000.0 / 900.0)));
    CHECK(p[1].deviation == doctest::Approx(0.01 * std::sqrt(1000.0 / 600.0)));
}

}  // TEST_SUITE
