#include <doctest.h>

#include <chrono>
#include <random>
#include <thread>

#include "billiard/ensemble.hpp"
#include "billiard/errors.hpp"
#include "billiard/statistics.hpp"
#include "oracles.hpp"

using namespace billiard;

namespace {

// One disk flying right along y = 100 on a 400x200 table.
ScenarioConfig lone_disk() {
    ScenarioConfig c;
    c.geometry = {400, 200};
    c.disks = {{0, 10, ScalarDistribution::point(100), ScalarDistribution::point(100),
                ScalarDistribution::point(10), ScalarDistribution::point(0)}};
    c.horizon = 10;
    c.events = {{"start", 0, Rect{95, 105, 105, 95}, {0, 10}},
                {"corner", 0, Rect{0, 200, 40, 160}, {0, 10}}};
    return c;
}

}  // namespace

TEST_SUITE("ensemble") {

TEST_CASE("segment-rectangle examples") {
    const Rect r{10, 20, 30, 0};
    CHECK(segment_crosses_rect({15, 10}, {100, 100}, r));           // starts inside
    CHECK_FALSE(segment_crosses_rect({0, 0}, {5, 25}, r));          // left of the box
    CHECK(segment_crosses_rect({0, 10}, {40, 10}, r));              // full traversal
    CHECK(segment_crosses_rect({10, 25}, {10, 20}, r));             // ends on the corner
    CHECK(segment_crosses_rect({0, 20}, {40, 20}, r));              // runs along the top edge
    CHECK_FALSE(segment_crosses_rect({0, 21}, {40, 21}, r));
    CHECK(segment_crosses_rect({20, 10}, {20, 10}, r));             // degenerate point inside
    CHECK_FALSE(segment_crosses_rect({40, 10}, {40, 10}, r));
    CHECK(segment_crosses_rect({5, 15}, {15, 25}, r));              // clips the corner
    CHECK_FALSE(segment_crosses_rect({5, 16}, {15, 26}, r));        // misses the corner
}

TEST_CASE("segment-rectangle agrees with dense sampling") {
    std::mt19937_64 rng(31337);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    int disagreements = 0;
    int hits = 0;
    for (int k = 0; k < 3000; ++k) {
        double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
        const Rect r{std::min(a, b), std::max(c, d), std::max(a, b), std::min(c, d)};
        const Vec2 p0{u(rng), u(rng)};
        const Vec2 p1{u(rng), u(rng)};
        const bool exact = segment_crosses_rect(p0, p1, r);
        const bool sampled = oracle::sampled_hit(p0, p1, {r.x1, r.x2, r.y2, r.y1}, 10000);
        hits += exact ? 1 : 0;
        if (exact != sampled) {
            // only a sliver below sampling resolution may be missed
            CHECK(exact);
            ++disagreements;
        }
    }
    CHECK(hits > 300);
    CHECK(disagreements <= 3);
}

TEST_CASE("run_trial: region at the start point and a corner never visited") {
    const auto c = lone_disk();
    const auto o = run_trial(c, 0, 0);
    REQUIRE(o.flags.size() == 2);
    CHECK(o.e1());
    CHECK_FALSE(o.e2());
    CHECK(o.final_time == c.horizon);
    CHECK(o.trial_index == 0);
}

TEST_CASE("run_trial: flight segments are clipped to the window") {
    auto c = lone_disk();
    // the disk crosses x in [195, 205] during t in [9.5, 10.5]
    c.horizon = 20;
    c.events[0] = {"early", 0, Rect{195, 105, 205, 95}, {0, 9.4}};
    c.events[1] = {"late", 0, Rect{195, 105, 205, 95}, {9.4, 20}};
    auto o = run_trial(c, 0, 0);
    CHECK_FALSE(o.e1());
    CHECK(o.e2());

    // a window ending exactly when the center reaches the edge still counts
    c.events[0].window = {0, 9.5};
    o = run_trial(c, 0, 0);
    CHECK(o.e1());
}

TEST_CASE("run_trial: fast traversal between ticks is still detected") {
    auto c = lone_disk();
    c.disks[0].vx0 = ScalarDistribution::point(2000);
    c.disks[0].x0 = ScalarDistribution::point(20);
    c.horizon = 0.1;
    c.events[0] = {"thin", 0, Rect{200, 105, 201, 95}, {0, 0.1}};
    c.events[1].window = {0, 0.1};
    CHECK(run_trial(c, 0, 0).e1());
}

TEST_CASE("run_ensemble: deterministic across worker counts and repeats") {
    const auto c = builtin_scenario(BuiltinScenario::basic);
    const std::vector<std::size_t> cps{10, 50, 200};
    const auto ref = run_ensemble(c, 200, 11, cps, 1);
    for (unsigned w : {1u, 4u, 8u, 8u, 8u}) {
        CAPTURE(w);
        CHECK(run_ensemble(c, 200, 11, cps, w) == ref);
    }
    for (std::size_t k = 0; k < ref.outcomes.size(); ++k) {
        CHECK(ref.outcomes[k].trial_index == k);
        CHECK(ref.outcomes[k] == run_trial(c, k, 11));
    }
}

TEST_CASE("run_ensemble: N = 1") {
    const auto c = builtin_scenario(BuiltinScenario::basic);
    const std::vector<std::size_t> cps{1};
    const auto r = run_ensemble(c, 1, 0, cps);
    CHECK(r.n == 1);
    CHECK(r.event_counts[0] <= 1);
    CHECK(r.event_counts[1] <= 1);
    CHECK(r.joint_count <= std::min(r.event_counts[0], r.event_counts[1]));
    REQUIRE(r.checkpoints.size() == 1);
    CHECK(r.checkpoints[0].n == 1);
}

TEST_CASE("run_ensemble: count consistency and checkpoint rows") {
    const auto c = builtin_scenario(BuiltinScenario::brownian);
    const auto cps = make_checkpoints(400, 10, CheckpointSpacing::log);
    const auto r = run_ensemble(c, 400, 3, cps);
    CHECK(r.joint_count <= std::min(r.event_counts[0], r.event_counts[1]));
    CHECK(r.event_counts[0] + r.event_counts[1] - r.joint_count <= r.n);

    std::size_t c1 = 0, c2 = 0, c12 = 0;
    for (const auto& o : r.outcomes) {
        c1 += o.e1();
        c2 += o.e2();
        c12 += o.e1() && o.e2();
    }
    CHECK(c1 == r.event_counts[0]);
    CHECK(c2 == r.event_counts[1]);
    CHECK(c12 == r.joint_count);

    const auto trace = convergence_trace(r.outcomes, cps);
    REQUIRE(trace.rows.size() == r.checkpoints.size());
    for (std::size_t k = 0; k < cps.size(); ++k) {
        const auto& e = r.checkpoints[k];
        const auto& t = trace.rows[k];
        CHECK(e.n == cps[k]);
        CHECK(t.n == e.n);
        CHECK(t.p1 == e.p1);
        CHECK(t.p2 == e.p2);
        CHECK(t.p12 == e.p12);
        CHECK(t.product == e.product);
        CHECK(e.count12 <= std::min(e.count1, e.count2));
    }
}

TEST_CASE("run_ensemble: precondition errors") {
    const auto c = builtin_scenario(BuiltinScenario::basic);
    const std::vector<std::size_t> ok{5};
    const std::vector<std::size_t> unsorted{5, 3};
    const std::vector<std::size_t> beyond{11};
    const std::vector<std::size_t> zero{0, 5};
    CHECK_THROWS_AS(run_ensemble(c, 0, 0, ok), ContractError);
    CHECK_THROWS_AS(run_ensemble(c, 10, 0, unsorted), ContractError);
    CHECK_THROWS_AS(run_ensemble(c, 10, 0, beyond), ContractError);
    CHECK_THROWS_AS(run_ensemble(c, 10, 0, zero), ContractError);
    auto one_event = c;
    one_event.events.pop_back();
    CHECK_THROWS_AS(run_ensemble(one_event, 10, 0, ok), std::exception);
}

TEST_CASE("run_ensemble: a failing trial aborts with replay coordinates") {
    auto c = builtin_scenario(BuiltinScenario::brownian);
    c.geometry = {120, 120};
    for (auto& d : c.disks) {
        d.x0 = ScalarDistribution::uniform(20, 100);
        d.y0 = ScalarDistribution::uniform(20, 100);
    }
    for (auto& e : c.events) {
        e.region = Rect{10, 110, 50, 70};
    }
    const std::vector<std::size_t> cps{3};
    try {
        run_ensemble(c, 3, 77, cps, 2);
        FAIL("expected TrialError");
    } catch (const TrialError& e) {
        CHECK(e.trial_index() == 0);
        CHECK(e.master_seed() == 77);
    }
}

TEST_CASE("latching: a flag set early stays set") {
    auto c = lone_disk();
    c.horizon = 100;  // many wall bounces after leaving the start square
    c.events[0].window = {0, 100};
    c.events[1].window = {0, 100};
    CHECK(run_trial(c, 0, 0).e1());
}

TEST_CASE("throughput scales with workers" * doctest::skip(std::thread::hardware_concurrency() < 4)) {
    const auto c = builtin_scenario(BuiltinScenario::basic);
    const std::vector<std::size_t> cps{1000};
    auto time = [&](unsigned w) {
        const auto t0 = std::chrono::steady_clock::now();
        run_ensemble(c, 1000, 1, cps, w);
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    };
    const double t1 = time(1);
    const double t4 = time(4);
    CHECK(t1 / t4 >= 2.0);
}

}  // TEST_SUITE
