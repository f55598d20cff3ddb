#include "surfacemdp/belief.hpp"
#include "surfacemdp/optimal_policy.hpp"
#include "surfacemdp/simulation.hpp"

#include "configs.hpp"

#include <doctest.h>

#include <map>
#include <set>
#include <sstream>

using namespace surfacemdp;
using doctest::Approx;

namespace {

// Toy space (N = 1, B = 1): positions 0 empty, 1 queued, 2 on the taxiway, 3 both.
TransitionModel two_state_chain() {
    StateSpace space(testcfg::toy());
    // Rows per (position, decision): Hold then ClearRamp1; clearances left empty.
    std::vector<std::size_t> offsets{0};
    std::vector<Successor> entries;
    const auto row = [&](std::vector<Successor> r) {
        entries.insert(entries.end(), r.begin(), r.end());
        offsets.push_back(entries.size());
    };
    row({{0, 0.7}, {1, 0.3}});
    row({});
    row({{0, 0.4}, {1, 0.6}});
    row({});
    row({{2, 1.0}});
    row({});
    row({{3, 1.0}});
    row({});
    return TransitionModel(space, offsets, entries);
}

Policy manual_policy(std::vector<Decision> d) {
    Policy p;
    p.decision = std::move(d);
    return p;
}

} // namespace

TEST_CASE("two-state Bayes update with an uninformative channel") {
    const auto model = two_state_chain();
    const auto obs = ObservationModel::from_codes({0, 0, 0, 0});
    const auto b = belief_update(BeliefState::indicator(4, 0), Decision::Hold, 0, model, obs);
    CHECK(b.b[0] == Approx(0.7));
    CHECK(b.b[1] == Approx(0.3));
    CHECK(b.b[2] == 0.0);
    CHECK(b.total() == Approx(1.0));
    // Second step: 0.7 * 0.7 + 0.3 * 0.4.
    const auto b2 = belief_update(b, Decision::Hold, 0, model, obs);
    CHECK(b2.b[0] == Approx(0.61));
    // An informative channel separates the two states.
    const auto split = ObservationModel::from_codes({0, 1, 2, 3});
    const auto b3 = belief_update(b, Decision::Hold, 1, model, split);
    CHECK(b3.b[1] == Approx(1.0));
    CHECK_THROWS_AS(belief_update(b, Decision::Hold, 3, model, split), ZeroLikelihood);
}

TEST_CASE("toy observation table") {
    const auto c = testcfg::toy();
    StateSpace space(c);
    const auto obs = ObservationModel::deterministic(space);
    // count field has bit_width(2) = 2 bits, one ramp bit.
    CHECK(observation_count_bits(c) == 2);
    CHECK(obs.of(0) == ((0U << 1) | 1U));
    CHECK(obs.of(1) == ((1U << 1) | 1U));
    CHECK(obs.of(2) == ((1U << 1) | 0U));
    CHECK(obs.of(3) == ((2U << 1) | 0U));
    CHECK(obs.num_codes() == 8);
    CHECK(obs.consistent_states(obs.of(1)) == std::vector<std::size_t>{1});
}

TEST_CASE("observation index is injective") {
    const auto c = testcfg::lga();
    std::set<std::uint32_t> seen;
    for (int n = 0; n <= c.max_aircraft(); ++n) {
        for (std::uint32_t r = 0; r < 4; ++r) {
            const Observation o{n, r};
            const auto idx = observation_index(o, c);
            CHECK(seen.insert(idx).second);
            CHECK(observation_from_index(idx, c) == o);
        }
    }
    CHECK_THROWS_AS(observation_index(Observation{0, 4}, c), std::out_of_range);
    CHECK_THROWS_AS(observation_index(Observation{1 << observation_count_bits(c), 0}, c), std::out_of_range);
}

TEST_CASE("observations alias distinct LGA states") {
    const auto c = testcfg::lga();
    StateSpace space(c);
    const auto obs = ObservationModel::deterministic(space);
    std::map<std::uint32_t, std::size_t> first;
    std::size_t aliased = 0;
    for (std::size_t pos = 0; pos < space.size(); ++pos) {
        const auto [it, fresh] = first.emplace(obs.of(pos), pos);
        if (!fresh) {
            ++aliased;
            CHECK(observe(space.state_at(pos), c) == observe(space.state_at(it->second), c));
        }
    }
    CHECK(aliased > 0);
    CHECK(first.size() < space.size());
    // Observation reflects the ramp turn under alternation.
    CHECK(observe(SurfaceState{}, c).ramp_free == 1U);
    CHECK(observe(make_state("000000000", 0, true), c).ramp_free == 2U);
}

TEST_CASE("zero likelihood on the real toy kernel") {
    const auto model = build_transitions(testcfg::toy());
    const auto obs = ObservationModel::deterministic(model.space());
    const auto b = BeliefState::indicator(4, 0);
    // Holding on the empty surface keeps it empty; an occupied taxiway is impossible.
    CHECK_THROWS_AS(belief_update(b, Decision::Hold, obs.of(3), model, obs), ZeroLikelihood);
    const auto ok = belief_update(b, Decision::Hold, obs.of(0), model, obs);
    CHECK(ok.b[0] == Approx(1.0));
}

TEST_CASE("MLS decisions") {
    const auto model = build_transitions(testcfg::toy());
    const auto pi = manual_policy({Decision::ClearRamp1, Decision::Hold, Decision::Hold, Decision::Hold});
    CHECK(mls_decide(BeliefState::indicator(4, 0), pi, model) == Decision::ClearRamp1);
    CHECK(mls_decide(BeliefState::indicator(4, 1), pi, model) == Decision::Hold);

    BeliefState bimodal{{0.6, 0.4, 0, 0}};
    CHECK(mls_decide(bimodal, pi, model) == Decision::ClearRamp1);
    bimodal.b = {0.4, 0.6, 0, 0};
    CHECK(mls_decide(bimodal, pi, model) == Decision::Hold);

    BeliefState tie{{0, 0.5, 0.5, 0}};
    CHECK(tie.argmax() == 1);
    BeliefState tie2{{0.5, 0.5, 0, 0}};
    CHECK(mls_decide(tie2, pi, model) == Decision::ClearRamp1);

    // The argmax state's decision is infeasible on the whole support.
    const auto bad = manual_policy({Decision::Hold, Decision::Hold, Decision::ClearRamp1, Decision::ClearRamp1});
    BeliefState blocked{{0, 0, 0.7, 0.3}};
    CHECK(mls_decide(blocked, bad, model) == Decision::Hold);
    // Feasible somewhere in the support: the decision stands.
    BeliefState mixed{{0.2, 0, 0.8, 0}};
    CHECK(mls_decide(mixed, bad, model) == Decision::ClearRamp1);
}

TEST_CASE("controller recovers from an impossible observation") {
    const auto model = build_transitions(testcfg::toy());
    const auto pi = manual_policy({Decision::ClearRamp1, Decision::Hold, Decision::Hold, Decision::Hold});
    const auto obs = ObservationModel::deterministic(model.space());
    MlsController mls(model, pi, obs);
    mls.reset();
    CHECK(mls.most_likely() == 0);
    mls.update(Decision::Hold, obs.of(3));
    CHECK(mls.recoveries() == 1);
    CHECK(mls.belief().b[3] == Approx(1.0));
}

namespace {

struct Comparer final : Controller {
    MlsSimController mls;
    PolicyController full;
    std::uint64_t mismatches = 0;
    Comparer(const TransitionModel& m, const Policy& pi, ObservationModel o) : mls(m, pi, std::move(o)), full(pi) {}
    void reset(const SurfaceState& s, std::size_t pos) override { mls.reset(s, pos); }
    Decision decide(const SurfaceState& s, std::size_t pos) override {
        const auto a = mls.decide(s, pos);
        if (a != full.decide(s, pos)) ++mismatches;
        return a;
    }
    void observe(Decision k, const SurfaceState& next, std::size_t pos) override { mls.observe(k, next, pos); }
};

} // namespace

TEST_CASE("identity channel reproduces full-state decisions") {
    const auto c = testcfg::two_ramp(4, 3, 3, 0.8, 0.5, 0.1, Fairness::Alternation);
    const auto model = build_transitions(c);
    const auto pi = extract_policy(solve_average_cost_lp(model, CostParams{5}), model);
    Comparer cmp(model, pi, ObservationModel::identity(model.space()));
    SimConfig sim;
    sim.steps = 10'000;
    sim.warmup = 0;
    sim.seed = 99;
    rollout(model, cmp, sim);
    CHECK(cmp.mismatches == 0);
    CHECK(cmp.mls.updates() == 10'000);
}

TEST_CASE("belief stays normalized along a rollout") {
    const auto c = testcfg::two_ramp(4, 3, 3, 0.8, 0.5, 0.1, Fairness::Alternation);
    const auto model = build_transitions(c);
    const auto pi = extract_policy(solve_average_cost_lp(model, CostParams{5}), model);
    MlsSimController mls(model, pi, ObservationModel::deterministic(model.space()), true);
    SimConfig sim;
    sim.steps = 20'000;
    sim.warmup = 0;
    rollout(model, mls, sim);
    CHECK(mls.max_normalization_error() <= 1e-12);
    CHECK(mls.mls().recoveries() == 0);
    for (double v : mls.mls().belief().b) CHECK(v >= 0.0);
    REQUIRE(mls.log().size() == 20'000);
    std::ostringstream os;
    write_mls_log_csv(os, {mls.log().begin(), mls.log().begin() + 3});
    CHECK(os.str().rfind("t,observation_index,mls_state,decision\n", 0) == 0);
}
