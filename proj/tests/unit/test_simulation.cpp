#include "surfacemdp/simulation.hpp"
#include "surfacemdp/threshold.hpp"

#include "configs.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace surfacemdp;
using doctest::Approx;

namespace {

SimConfig short_run(std::uint64_t seed, std::uint64_t steps = 50'000) {
    SimConfig s;
    s.steps = steps;
    s.warmup = 1'000;
    s.seed = seed;
    return s;
}

struct Stubborn final : Controller {
    Decision decide(const SurfaceState&, std::size_t) override { return Decision::ClearRamp1; }
};

} // namespace

TEST_CASE("splitmix64 reference outputs") {
    std::uint64_t state = 0;
    CHECK(splitmix64(state) == 0xe220a8397b1dcdafULL);
    CHECK(splitmix64(state) == 0x6e789e6aa1b965f4ULL);
    CHECK(replication_seed(0, 0) == 0xe220a8397b1dcdafULL);
    CHECK(replication_seed(0, 1) == 0x6e789e6aa1b965f4ULL);
    CHECK(replication_seed(5, 0) != replication_seed(6, 0));
}

TEST_CASE("uniform draws lie in [0, 1)") {
    Rng rng(3);
    double lo = 1, hi = 0, sum = 0;
    for (int i = 0; i < 100'000; ++i) {
        const double u = rng.uniform();
        lo = std::min(lo, u);
        hi = std::max(hi, u);
        sum += u;
    }
    CHECK(lo >= 0.0);
    CHECK(hi < 1.0);
    CHECK(sum / 100'000 == Approx(0.5).epsilon(0.01));
}

TEST_CASE("identical seeds give identical results") {
    const auto c = testcfg::two_ramp(4, 3, 3, 0.8, 0.5, 0.1, Fairness::Alternation);
    const auto model = build_transitions(c);
    ThresholdController a({3}, c), b({3}, c);
    const auto r1 = rollout(model, a, short_run(42));
    const auto r2 = rollout(model, b, short_run(42));
    CHECK(r1.takeoff_mean == r2.takeoff_mean);
    CHECK(r1.avg_taxiing == r2.avg_taxiing);
    CHECK(r1.bins.size() == r2.bins.size());
    const auto r3 = rollout(model, a, short_run(43));
    CHECK(r3.avg_taxiing != r1.avg_taxiing);
    CHECK(r1.rng == "mt19937_64+splitmix64");
}

TEST_CASE("never clearing keeps the surface empty") {
    const auto model = build_transitions(testcfg::lga());
    NeverClearController never;
    const auto r = rollout(model, never, short_run(1, 10'000));
    CHECK(r.takeoff_mean == 0.0);
    CHECK(r.avg_taxiing == 0.0);
    CHECK(r.idle_probability == 1.0);
    CHECK(r.samples == 9'000);
}

TEST_CASE("toy Th=1 rollout agrees with the analytic chain") {
    const auto c = testcfg::toy();
    const auto model = build_transitions(c);
    const auto chain = evaluate_threshold_chain(model, {1});
    ThresholdController th({1}, c);
    SimConfig sim = short_run(7, 500'000);
    sim.replications = 2;
    const auto r = rollout(model, th, sim);
    CHECK(r.samples == 2 * (500'000 - 1'000));
    CHECK(r.replications.size() == 2);
    CHECK(std::abs(r.avg_taxiing - chain.metrics.avg_taxiing) <= 3 * r.avg_taxiing_se);
    CHECK(std::abs(r.takeoff_mean - chain.metrics.takeoff_rate) <= 3 * r.takeoff_se);
    CHECK(std::abs(r.avg_taxiing - 2.0 / 3.0) <= 3 * r.avg_taxiing_se);
    CHECK(r.avg_taxiing_se > 0);
    CHECK(r.utilization == Approx(r.takeoff_mean / c.service_rate()));
}

TEST_CASE("rollouts conserve aircraft and coerce infeasible decisions") {
    const auto c = testcfg::single(3, 2, 0.8, 0.5, 0.1);
    const auto model = build_transitions(c);
    Stubborn stubborn;
    const auto r = rollout(model, stubborn, short_run(11, 20'000));
    CHECK(r.conservation_violations == 0);
    CHECK(r.coerced_holds > 0);
    AlwaysClearController always(c);
    const auto a = rollout(model, always, short_run(11, 20'000));
    CHECK(a.coerced_holds == 0);
    CHECK(a.conservation_violations == 0);
}

TEST_CASE("congestion bins and curve") {
    const auto c = testcfg::lga();
    const auto model = build_transitions(c);
    AlwaysClearController always(c);
    const auto r = rollout(model, always, short_run(5, 100'000));
    std::uint64_t total = 0;
    for (const auto& bin : r.bins) {
        total += bin.samples;
        std::uint64_t h = 0;
        for (auto x : bin.takeoff_hist) h += x;
        CHECK(h == bin.samples);
    }
    CHECK(total == r.samples);
    const auto curve = congestion_curve(r);
    std::size_t occupied = 0;
    for (const auto& bin : r.bins) occupied += bin.samples > 0;
    CHECK(curve.size() == occupied);   // empty bins are skipped
    for (const auto& bin : r.bins)
        if (bin.n_ac == 0 && bin.samples > 0) CHECK(bin.mean() == 0.0);   // nothing queued
    for (const auto& p : curve) {
        CHECK(p.sparse == (p.samples < 100));
        if (p.samples) CHECK(p.q1 <= p.median);
    }
    std::ostringstream os;
    write_congestion_csv(os, curve);
    CHECK(os.str().find("n_ac") == 0);
}

TEST_CASE("bin quartiles") {
    CongestionBin bin;
    bin.samples = 4;
    bin.takeoff_hist = {1, 2, 1};
    CHECK(bin.mean() == Approx(1.0));
    CHECK(bin.quartile(1) == 0);
    CHECK(bin.quartile(2) == 1);
    CHECK(bin.quartile(3) == 1);
    bin.takeoff_hist = {3, 0, 1};
    CHECK(bin.quartile(2) == 0);
    CHECK(bin.quartile(3) == 0);
}

TEST_CASE("observed congestion curve with offset") {
    std::istringstream in("minute,pushbacks,takeoffs\n0,3,0\n1,2,1\n2,0,1\n3,0,4\n4,1,0\n");
    const auto s = read_minute_series(in);
    // Estimates 0, 3, 4, 3, 0 with take-offs 0, 1, 1, 4, 0.
    const auto raw = observed_congestion_curve(s);
    REQUIRE(raw.size() == 3);
    CHECK(raw[0].n_ac == 0);
    CHECK(raw[0].samples == 2);
    CHECK(raw[1].n_ac == 3);
    CHECK(raw[1].mean_rate == Approx(2.5));
    CHECK(raw[1].q1 == 1);
    CHECK(raw[1].q3 == 4);
    CHECK(raw[2].n_ac == 4);
    const auto shifted = observed_congestion_curve(s, 3);
    REQUIRE(shifted.size() == 2);
    CHECK(shifted[0].n_ac == 0);
    CHECK(shifted[0].samples == 4);
    CHECK(shifted[1].n_ac == 1);
    CHECK(shifted[1].mean_rate == Approx(1.0));
}

TEST_CASE("simulation config validation") {
    SimConfig s;
    s.warmup = s.steps;
    CHECK_THROWS(s.validate());
    s = SimConfig{};
    s.replications = 0;
    CHECK_THROWS(s.validate());
    CHECK_NOTHROW(SimConfig{}.validate());
}
