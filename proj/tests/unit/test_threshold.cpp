#include "surfacemdp/markov_chain.hpp"
#include "surfacemdp/threshold.hpp"

#include "configs.hpp"
#include "oracles.hpp"

#include <doctest.h>

using namespace surfacemdp;
using doctest::Approx;

TEST_CASE("threshold decisions") {
    const auto c = testcfg::lga();
    CHECK(threshold_decide(make_state("110100000", 2), {3}, c) == Decision::Hold);   // N_ac = 5
    CHECK(threshold_decide(SurfaceState{}, {1}, c) == Decision::ClearRamp1);
    CHECK(threshold_decide(make_state("000000000", 0, true), {1}, c) == Decision::ClearRamp2);
    // Boundary: clear strictly below the threshold.
    CHECK(threshold_decide(make_state("010100000", 1), {3}, c) == Decision::Hold);
    CHECK(threshold_decide(make_state("010100000", 1), {4}, c) == Decision::ClearRamp1);
    // The alternative boundary (clear at N_ac <= Th) would clear here.
    CHECK(make_state("010100000", 1).aircraft() <= 3);
    // Active ramp blocked: hold even below the threshold.
    CHECK(threshold_decide(make_state("000000100", 0, true), {5}, c) == Decision::Hold);
}

TEST_CASE("toy airport Th=1 chain matches the hand solution") {
    // N = 1, B = 1, m = 1, c1 = 0.5. With Th = 1 the surface holds at most one
    // aircraft: empty -> (clear, move) -> queued w.p. 1; queued -> empty w.p. 0.5
    // else stays. pi(empty) = 1/3, pi(queued) = 2/3.
    const auto model = build_transitions(testcfg::toy());
    const auto pt = evaluate_threshold_chain(model, {1});
    REQUIRE(pt.ok());
    CHECK(pt.metrics.avg_taxiing == Approx(2.0 / 3.0));
    CHECK(pt.metrics.takeoff_rate == Approx(1.0 / 3.0));
    CHECK(pt.metrics.utilization == Approx(2.0 / 3.0));
    CHECK(pt.metrics.idle_probability == Approx(1.0 / 3.0));
}

TEST_CASE("threshold sweep matches the chain oracle") {
    const auto c = testcfg::two_ramp(3, 2, 3, 0.8, 0.5, 0.1, Fairness::Alternation);
    const auto model = build_transitions(c);
    const auto pts = threshold_sweep(model, {1, 2, 3, 4, 5, 6});
    for (const auto& p : pts) {
        REQUIRE(p.ok());
        std::vector<int> dec(model.num_states());
        for (std::size_t i = 0; i < dec.size(); ++i)
            dec[i] = static_cast<int>(threshold_decide(model.space().state_at(i), {p.threshold}, c));
        const auto P = oracle::closed_loop(dec, model.space());
        const auto classes = oracle::closed_classes(P);
        REQUIRE(classes.size() == 1);
        const auto pi = oracle::class_stationary(P, classes[0]);
        double avg = 0;
        for (std::size_t i = 0; i < dec.size(); ++i)
            avg += pi(static_cast<Eigen::Index>(i)) * model.space().state_at(i).aircraft();
        CHECK(p.metrics.avg_taxiing == Approx(avg).epsilon(1e-10));
        CHECK(p.residual <= 1e-10);
    }
    for (std::size_t i = 1; i < pts.size(); ++i)
        CHECK(pts[i].metrics.utilization >= pts[i - 1].metrics.utilization - 1e-12);
    CHECK(threshold_sweep(model, {2}).size() == 1);
}

TEST_CASE("closed loop never exceeds Th + 1 aircraft") {
    const auto c = testcfg::two_ramp(4, 3, 3, 0.8, 0.5, 0.1, Fairness::Alternation);
    const auto model = build_transitions(c);
    for (int th = 1; th <= c.max_aircraft(); ++th) {
        const auto pi = threshold_policy(model, {th});
        ClosedLoopChain chain(model, pi.decision);
        const auto reach = reachable_from(chain, model.space().empty_position());
        for (std::size_t pos = 0; pos < reach.size(); ++pos) {
            if (reach[pos]) CHECK(model.space().state_at(pos).aircraft() <= th + 1);
        }
    }
}

TEST_CASE("never holding saturates the runway") {
    const auto c = testcfg::single(3, 3, 0.9, 0.5, 0.1);
    const auto model = build_transitions(c);
    const auto pt = evaluate_threshold_chain(model, {c.max_aircraft()});
    REQUIRE(pt.ok());
    CHECK(pt.metrics.utilization > 0.9);
    CHECK(pt.metrics.utilization <= 1.0 + 1e-9);
    CHECK_FALSE(evaluate_threshold_chain(model, {c.max_aircraft() + 1}).ok());
}

TEST_CASE("LGA utilization rises over thresholds one to three") {
    const auto model = build_transitions(testcfg::lga());
    const auto pts = threshold_sweep(model, {1, 2, 3});
    CHECK(pts[0].metrics.utilization < pts[1].metrics.utilization);
    CHECK(pts[1].metrics.utilization < pts[2].metrics.utilization);
}
