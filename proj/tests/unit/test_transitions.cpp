#include "surfacemdp/simulation.hpp"
#include "surfacemdp/transitions.hpp"

#include "configs.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <map>
#include <sstream>

using namespace surfacemdp;
using doctest::Approx;

TEST_CASE("take-off distribution") {
    const auto d = takeoff_distribution(3, 0.5140, 0.0929);
    // Four coin outcomes enumerated by hand.
    CHECK(d.p[0] == Approx(0.486 * 0.9071).epsilon(1e-12));
    CHECK(d.p[1] == Approx(0.514 * 0.9071 + 0.486 * 0.0929).epsilon(1e-12));
    CHECK(d.p[2] == Approx(0.514 * 0.0929).epsilon(1e-12));
    CHECK(d.p[0] == Approx(0.44085).epsilon(1e-4));
    CHECK(d.p[1] == Approx(0.51140).epsilon(1e-4));
    CHECK(d.p[2] == Approx(0.04775).epsilon(1e-4));

    const auto empty = takeoff_distribution(0, 0.5, 0.5);
    CHECK(empty.p[0] == 1.0);
    const auto one = takeoff_distribution(1, 0.5, 0.5);
    CHECK(one.p[0] == Approx(0.25));
    CHECK(one.p[1] == Approx(0.75));
    CHECK(one.p[2] == 0.0);
    CHECK_THROWS(takeoff_distribution(1, 1.2, 0.0));
}

TEST_CASE("single-sample clearance then same-step move") {
    const auto c = testcfg::single(1, 1, 0.9, 0.0);
    StateSpace space(c);
    const auto row = step_distribution(SurfaceState{}, Decision::ClearRamp1, space);
    REQUIRE(row.size() == 2);
    std::map<std::uint32_t, double> by_index;
    for (const auto& e : row) by_index[space.index_at(e.target).value] = e.prob;
    CHECK(by_index[encode(make_state("1", 0), c).value] == Approx(0.1));
    CHECK(by_index[encode(make_state("0", 1), c).value] == Approx(0.9));
}

TEST_CASE("queue-only state under hold follows take-offs") {
    const auto c = testcfg::single(3, 3, 0.5, 0.6);
    StateSpace space(c);
    const auto row = step_distribution(make_state("000", 1), Decision::Hold, space);
    REQUIRE(row.size() == 2);
    CHECK(space.state_at(row[0].target).queue == 0);
    CHECK(row[0].prob == Approx(0.6));
    CHECK(space.state_at(row[1].target).queue == 1);
    CHECK(row[1].prob == Approx(0.4));
}

TEST_CASE("kernel matches the independent enumerator") {
    for (const auto& c : {testcfg::single(3, 2, 0.7, 0.5, 0.2), testcfg::two_ramp(4, 3, 3, 0.8, 0.4, 0.3, Fairness::Alternation),
                          testcfg::two_ramp(3, 2, 1, 0.6, 0.5, 0.0, Fairness::None)}) {
        const auto model = build_transitions(c);
        const auto& space = model.space();
        for (std::size_t pos = 0; pos < space.size(); ++pos) {
            const auto s = space.state_at(pos);
            for (int k = 0; k < c.num_decisions(); ++k) {
                const auto row = model.successors(pos, static_cast<Decision>(k));
                CHECK(row.empty() == !oracle::allowed(s, k, c));
                if (row.empty()) continue;
                const auto expect = oracle::successors(s, k, space);
                std::map<std::size_t, double> got;
                for (const auto& e : row) got[e.target] += e.prob;
                std::size_t positive = 0;
                for (const auto& [j, p] : expect) {
                    if (p > 0) ++positive;
                    CHECK(got[j] == Approx(p).epsilon(1e-13));
                }
                CHECK(row.size() == positive);
            }
        }
    }
}

TEST_CASE("LGA kernel is valid and about the published size") {
    const auto model = build_transitions(testcfg::lga());
    const auto rep = validate_kernel(model);
    CHECK(rep.ok());
    CHECK(rep.max_row_error <= 1e-12);
    CHECK(model.num_states() == 8192);
    // Report only; the bound is checked by the acceptance suite.
    MESSAGE("LGA nonzeros: " << rep.nonzeros);
    const auto single = build_transitions(testcfg::lga(Fairness::None));
    MESSAGE("LGA without turn bit: " << single.nonzeros());
}

TEST_CASE("validation flags a corrupted row") {
    const auto model = build_transitions(testcfg::single(2, 1, 0.8, 0.5));
    auto entries = model.entries();
    entries[0].prob += 0.01;
    TransitionModel bad(model.space(), model.row_offsets(), entries);
    const auto rep = validate_kernel(bad);
    CHECK_FALSE(rep.ok());
    CHECK(rep.violations.front().find("sum") != std::string::npos);
}

TEST_CASE("capacity and aircraft-count bounds hold on full states") {
    const auto c = testcfg::single(4, 3, 0.9, 0.0);
    const auto model = build_transitions(c);
    const auto full = model.space().position(make_state("1111", 3));
    for (const auto& e : model.successors(full, Decision::Hold)) CHECK(model.space().state_at(e.target).queue <= 3);
    CHECK(model.successors(full, Decision::ClearRamp1).empty());
}

TEST_CASE("aircraft are conserved without take-offs under hold") {
    const auto c = testcfg::two_ramp(4, 3, 3, 0.7, 0.0, 0.0, Fairness::None);
    const auto model = build_transitions(c);
    for (std::size_t pos = 0; pos < model.num_states(); ++pos) {
        const int before = model.space().state_at(pos).aircraft();
        for (const auto& e : model.successors(pos, Decision::Hold))
            CHECK(model.space().state_at(e.target).aircraft() == before);
    }
}

TEST_CASE("deterministic moves deliver in N - entry + 1 steps") {
    for (int entry : {1, 3, 5}) {
        auto c = testcfg::two_ramp(5, 5, 2, 1.0, 0.0, 0.0, Fairness::None);
        c.ramps[0].entry_sample = entry == 5 ? 1 : entry;
        c.ramps[1].entry_sample = 5;
        const int ramp = entry == 5 ? 1 : 0;
        const auto model = build_transitions(c);
        std::size_t pos = model.space().empty_position();
        Decision k = clear_ramp(ramp);
        int steps = 0;
        while (model.space().state_at(pos).queue == 0) {
            const auto row = model.successors(pos, k);
            REQUIRE(row.size() == 1);
            pos = row[0].target;
            k = Decision::Hold;
            ++steps;
        }
        CHECK(steps == 5 - entry + 1);
    }
}

TEST_CASE("feasibility follows entry sample and turn") {
    const auto c = testcfg::lga();
    CHECK(clearance_feasible(SurfaceState{}, Decision::ClearRamp1, c));
    CHECK_FALSE(clearance_feasible(SurfaceState{}, Decision::ClearRamp2, c));
    CHECK(clearance_feasible(make_state("000000000", 0, true), Decision::ClearRamp2, c));
    CHECK_FALSE(clearance_feasible(make_state("000000100", 0, true), Decision::ClearRamp2, c));
    CHECK_FALSE(clearance_feasible(make_state("100000000", 0), Decision::ClearRamp1, c));
}

TEST_CASE("clearances flip the turn bit") {
    const auto model = build_transitions(testcfg::lga());
    const auto& space = model.space();
    for (const auto& e : model.successors(space.empty_position(), Decision::ClearRamp1))
        CHECK(space.state_at(e.target).turn);
    for (const auto& e : model.successors(space.empty_position(), Decision::Hold))
        CHECK_FALSE(space.state_at(e.target).turn);
}

namespace {

std::map<std::size_t, long> sample_counts(const SurfaceState& start, Decision k, const AirportConfig& c,
                                          const StateSpace& space, long trials, std::uint64_t seed) {
    std::map<std::size_t, long> counts;
    Rng rng(seed);
    for (long t = 0; t < trials; ++t) {
        SurfaceState s = start;
        sample_step(s, k, c, rng);
        ++counts[space.position(s)];
    }
    return counts;
}

} // namespace

TEST_CASE("sampled successors agree with the kernel within three standard errors") {
    const auto c = testcfg::lga();
    const auto model = build_transitions(c);
    const auto& space = model.space();
    // Clearance from a state with one aircraft on the last sample and two queued.
    const SurfaceState start = make_state("000000001", 2, false);
    const auto pos = space.position(start);
    const long trials = 1'000'000;
    const auto counts = sample_counts(start, Decision::ClearRamp1, c, space, trials, 12345);
    const auto row = model.successors(pos, Decision::ClearRamp1);
    CHECK(row.size() == 12);
    long covered = 0;
    for (const auto& e : row) {
        const long n = counts.count(e.target) ? counts.at(e.target) : 0;
        const double freq = static_cast<double>(n) / trials;
        const double se = std::sqrt(e.prob * (1 - e.prob) / trials);
        CHECK(std::abs(freq - e.prob) <= 3 * se);
        covered += n;
    }
    CHECK(covered == trials);
}

TEST_CASE("sampled successors of a crowded state pass a chi-square test") {
    const auto c = testcfg::lga();
    const auto model = build_transitions(c);
    const auto& space = model.space();
    const SurfaceState start = make_state("101101001", 3, false);
    const long trials = 1'000'000;
    const auto counts = sample_counts(start, Decision::Hold, c, space, trials, 12345);
    const auto row = model.successors(space.position(start), Decision::Hold);
    double chi2 = 0;
    long covered = 0;
    for (const auto& e : row) {
        const long n = counts.count(e.target) ? counts.at(e.target) : 0;
        const double expect = e.prob * trials;
        chi2 += (n - expect) * (n - expect) / expect;
        covered += n;
    }
    CHECK(covered == trials);
    // Upper 0.1% point of chi-square via the Wilson-Hilferty approximation.
    const double df = static_cast<double>(row.size() - 1);
    const double z = 3.090232;
    const double crit = df * std::pow(1 - 2 / (9 * df) + z * std::sqrt(2 / (9 * df)), 3);
    MESSAGE("chi2 " << chi2 << " on " << df << " df, critical " << crit);
    CHECK(chi2 <= crit);
}

TEST_CASE("kernel CSV export") {
    const auto model = build_transitions(testcfg::toy());
    std::ostringstream os;
    write_kernel_csv(os, model);
    const auto text = os.str();
    CHECK(text.rfind("i,k,j,p\n", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == static_cast<long>(model.nonzeros()) + 1);
}
