#include "surfacemdp/calibration.hpp"
#include "surfacemdp/simulation.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

using namespace surfacemdp;
using doctest::Approx;

namespace {

// Closest grid point to the Bernoulli pair equations, independent of the root formula.
BernoulliPair grid_pair(double mean, double sd) {
    BernoulliPair best;
    double err = 1e300;
    for (int i = 0; i <= 10000; ++i) {
        const double c1 = i * 1e-4;
        const double c2 = mean - c1;
        if (c2 < 0 || c2 > c1) continue;
        const double e = std::abs(c1 * (1 - c1) + c2 * (1 - c2) - sd * sd);
        if (e < err) {
            err = e;
            best = {c1, c2};
        }
    }
    return best;
}

} // namespace

TEST_CASE("Bernoulli pair") {
    const auto lga = solve_bernoulli_pair({0.605, 0.578});
    CHECK(lga.c1 == Approx(0.5140).epsilon(0.01 / 0.514));
    CHECK(std::abs(lga.c1 - 0.5140) <= 0.01);
    CHECK(std::abs(lga.c2 - 0.0929) <= 0.01);
    CHECK(lga.c1 >= lga.c2);

    const auto det = solve_bernoulli_pair({1.0, 0.0});
    CHECK(det.c1 == Approx(1.0));
    CHECK(det.c2 == Approx(0.0));

    const auto half = solve_bernoulli_pair({0.5, 0.5});
    CHECK(half.c1 == Approx(0.5));
    CHECK(half.c2 == Approx(0.0));
    const auto g = grid_pair(0.5, 0.5);
    CHECK(std::abs(g.c1 - half.c1) <= 1e-4);

    CHECK_THROWS_AS(solve_bernoulli_pair({0.5, 0.9}), CalibrationError);
    CHECK_THROWS_AS(solve_bernoulli_pair({2.5, 0.1}), CalibrationError);
}

TEST_CASE("Bernoulli pair round trip") {
    for (double mean : {0.1, 0.3, 0.605, 0.9, 1.2, 1.7}) {
        // Feasible variances run from the most unequal pair to equal coins.
        const double a = std::min(mean, 1.0), b = mean - a;
        const double lo = a * (1 - a) + b * (1 - b);
        const double hi = mean - mean * mean / 2;
        for (double t : {0.0, 0.3, 0.7, 1.0}) {
            const double sd = std::sqrt(lo + t * (hi - lo));
            const auto p = solve_bernoulli_pair({mean, sd});
            CHECK(std::abs(p.c1 + p.c2 - mean) <= 1e-9);
            CHECK(std::abs(std::sqrt(p.c1 * (1 - p.c1) + p.c2 * (1 - p.c2)) - sd) <= 1e-7);
            CHECK(p.c1 >= p.c2);
        }
        if (lo > 0.01) CHECK_THROWS_AS(solve_bernoulli_pair({mean, std::sqrt(lo - 0.01)}), CalibrationError);
        CHECK_THROWS_AS(solve_bernoulli_pair({mean, std::sqrt(hi + 0.01)}), CalibrationError);
    }
}

TEST_CASE("clearance wait") {
    const auto w = clearance_wait_stats(0.5140, 0.0929);
    CHECK(std::abs(w.mean - 1.65) <= 0.01);
    CHECK(std::abs(w.std - 1.04) <= 0.01);
    const auto d = clearance_wait_stats(1.0, 0.0);
    CHECK(d.mean == 1.0);
    CHECK(d.std == 0.0);
    const auto q = clearance_wait_stats(0.25, 0.25);
    CHECK(q.mean == Approx(2.0));
    CHECK(q.std == Approx(std::sqrt(0.5) / 0.5));
    CHECK_THROWS_AS(clearance_wait_stats(0.0, 0.0), CalibrationError);
}

TEST_CASE("taxi decomposition") {
    const TaxiStats t{13.56, 2.00, 2.0, 1.33};
    const auto r = decompose_taxi_stats(t, {1.65, 1.04});
    CHECK(r.mean == Approx(9.91));
    CHECK(std::abs(r.std - 1.07) <= 0.005);
    const auto id = decompose_taxi_stats({5.0, 1.5, 0, 0}, {0, 0});
    CHECK(id.mean == 5.0);
    CHECK(id.std == 1.5);
    const auto r2 = decompose_taxi_stats({6.4, 2.00, 2.0, 1.33}, {1.65, 1.04});
    CHECK(r2.mean == Approx(2.75));
    // Variances recombine.
    CHECK(r.std * r.std + 1.04 * 1.04 + 1.33 * 1.33 == Approx(4.0).epsilon(1e-12));
    CHECK_THROWS_AS(decompose_taxi_stats({13.56, 1.0, 2.0, 1.33}, {1.65, 1.04}), CalibrationError);
}

TEST_CASE("taxiway fit") {
    const auto lga = calibrate_taxiway(9.91, 1.07, 1.0);
    CHECK(lga.steps == 9);
    CHECK(std::abs(lga.move_prob - 0.908) <= 0.002);
    CHECK(std::abs(lga.steps_real - 8.88) <= 0.01);

    const auto det = calibrate_taxiway(5.0, 0.0, 1.0);
    CHECK(det.steps == 5);
    CHECK(det.move_prob == 1.0);

    const auto mid = calibrate_taxiway(6.0, 1.0, 1.0);
    // Closed form: N = 1 / (r^2 + Ts/mean) with r = 1/6.
    CHECK(mid.steps_real == Approx(1.0 / (1.0 / 36 + 1.0 / 6)));
    CHECK(mid.steps == 5);
    CHECK(mid.move_prob == Approx(5.0 / 6.0));
    CHECK_THROWS_AS(calibrate_taxiway(2.0, 3.0, 1.0), CalibrationError);
}

TEST_CASE("calibrated walk reproduces the transit-time moments") {
    // Each of N samples is left after a Geometric(m) number of steps.
    const auto fit = calibrate_taxiway(6.0, 1.0, 1.0);
    Rng rng(7);
    const int trials = 1'000'000;
    double sum = 0, sum2 = 0;
    for (int t = 0; t < trials; ++t) {
        int steps = 0;
        for (int s = 0; s < fit.steps; ++s) {
            do {
                ++steps;
            } while (!rng.bernoulli(fit.move_prob));
        }
        sum += steps;
        sum2 += static_cast<double>(steps) * steps;
    }
    const double mean = sum / trials;
    const double sd = std::sqrt(sum2 / trials - mean * mean);
    const double target_mean = fit.steps / fit.move_prob;
    const double target_sd = target_mean * std::sqrt((1 - fit.move_prob) / fit.steps);
    CHECK(std::abs(mean - target_mean) / target_mean <= 0.01);
    CHECK(std::abs(sd - target_sd) / target_sd <= 0.05);
}

TEST_CASE("ramp 2 steps and buffer size") {
    CHECK(secondary_ramp_steps(2.75, 0.9084, 1.0) == 3);
    CHECK(secondary_ramp_steps(2.0, 1.0, 1.0) == 2);
    CHECK(size_buffer(1.07, 1.04, 0.605) == 7);
    CHECK(size_buffer(0, 0, 0.5) == 1);
    CHECK(size_buffer(1.0, 0.0, 0.5) == 6);
    CHECK_THROWS_AS(size_buffer(1.0, 1.0, 0.0), CalibrationError);
}

TEST_CASE("end-to-end LGA calibration") {
    CalibrationInputs in;
    in.throughput = {0.605, 0.578};
    in.ramp1 = {13.56, 2.00, 2.0, 1.33};
    in.ramp2_unimpeded_mean = 6.4;
    const auto r = calibrate_airport(in);
    CHECK(std::abs(r.c1 - 0.514) <= 0.01);
    CHECK(std::abs(r.c2 - 0.093) <= 0.005);
    CHECK(r.N_ramp1 == 9);
    CHECK(std::abs(r.m - 0.908) <= 0.002);
    CHECK(r.B == 7);
    REQUIRE(r.N_ramp2.has_value());
    CHECK(*r.N_ramp2 == 3);
    CHECK(r.Ls == 200);
    CHECK(r.Ts == 60);
    CHECK(std::abs(r.buffer_real - 7.39) <= 0.02);
    const auto c = r.to_config();
    CHECK(c.ramps[1].entry_sample == 7);
}

TEST_CASE("minute series") {
    std::istringstream in("minute,pushbacks,takeoffs\n0,3,0\n1,2,1\n2,0,1\n3,0,4\n4,1,0\n");
    const auto s = read_minute_series(in);
    REQUIRE(s.rows.size() == 5);
    const auto est = s.taxiing_estimate();
    CHECK(est == std::vector<int>{0, 3, 4, 3, 0});   // 3 - 4 clamps at zero
    const auto sat = saturation_stats(s, 3);
    CHECK(sat.mean_rate == Approx(2.0));   // minutes 1..3: 1, 1, 4
    CHECK(sat.std_rate == Approx(std::sqrt(2.0)));

    MinuteSeries ones;
    for (int i = 0; i < 10; ++i) ones.rows.push_back({i, 1, 1});
    const auto o = saturation_stats(ones, 0);
    CHECK(o.mean_rate == 1.0);
    CHECK(o.std_rate == 0.0);
    CHECK_THROWS_AS(saturation_stats(ones, 5), CalibrationError);

    std::ostringstream out;
    write_minute_series(out, s);
    std::istringstream again(out.str());
    CHECK(read_minute_series(again).rows.size() == 5);

    std::istringstream bad("minute,pushbacks,takeoffs\n0,-1,0\n");
    CHECK_THROWS_AS(read_minute_series(bad), CalibrationError);
}
