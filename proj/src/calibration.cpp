#include "surfacemdp/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

namespace surfacemdp {

namespace {

using Kind = CalibrationError::Kind;

void require_finite_nonneg(double v, const char* name) {
    if (!std::isfinite(v) || v < 0.0)
        throw CalibrationError(Kind::InvalidInput, std::string(name) + " must be finite and nonnegative");
}

} // namespace

BernoulliPair solve_bernoulli_pair(const ThroughputStats& stats) {
    const double mu = stats.mean_rate;
    const double sd = stats.std_rate;
    require_finite_nonneg(mu, "mean_rate");
    require_finite_nonneg(sd, "std_rate");
    if (mu > 2.0) throw CalibrationError(Kind::NoRealSolution, "mean_rate above 2 aircraft per step");

    // c2 = mu - c1 turns the variance equation into 2c1^2 - 2mu c1 + mu^2 - mu + sd^2 = 0.
    double disc = 2.0 * mu - mu * mu - 2.0 * sd * sd;
    const double scale = std::max(1.0, mu);
    if (disc < -1e-12 * scale) throw CalibrationError(Kind::NoRealSolution, "std_rate incompatible with mean_rate");
    disc = std::max(disc, 0.0);
    BernoulliPair out;
    out.c1 = 0.5 * (mu + std::sqrt(disc));
    out.c2 = mu - out.c1;
    if (out.c1 > 1.0 + 1e-12 || out.c2 < -1e-12)
        throw CalibrationError(Kind::NoRealSolution, "solution lies outside the probability range");
    out.c1 = std::min(out.c1, 1.0);
    out.c2 = std::max(out.c2, 0.0);
    return out;
}

MeanStd clearance_wait_stats(double c1, double c2) {
    const double p = c1 + c2;
    if (!(p > 0.0)) throw CalibrationError(Kind::ZeroRate, "clearance success probability is zero");
    if (p > 1.0) throw CalibrationError(Kind::InvalidInput, "clearance success probability exceeds 1");
    return {1.0 / p, std::sqrt(1.0 - p) / p};
}

MeanStd decompose_taxi_stats(const TaxiStats& taxi, const MeanStd& clearance) {
    require_finite_nonneg(taxi.unimpeded_mean, "unimpeded_mean");
    require_finite_nonneg(taxi.unimpeded_std, "unimpeded_std");
    require_finite_nonneg(taxi.pushback_mean, "pushback_mean");
    require_finite_nonneg(taxi.pushback_std, "pushback_std");
    const double var = taxi.unimpeded_std * taxi.unimpeded_std - clearance.std * clearance.std -
                       taxi.pushback_std * taxi.pushback_std;
    if (var < 0.0) throw CalibrationError(Kind::NegativeVariance, "taxi variance decomposition is negative");
    const double mean = taxi.unimpeded_mean - clearance.mean - taxi.pushback_mean;
    if (mean < 0.0) throw CalibrationError(Kind::NegativeVariance, "taxi mean decomposition is negative");
    return {mean, std::sqrt(var)};
}

TaxiwayFit calibrate_taxiway(double taxi_mean, double taxi_std, double step_minutes) {
    if (!(taxi_mean > 0.0) || !(step_minutes > 0.0))
        throw CalibrationError(Kind::ZeroRate, "taxi mean and step length must be positive");
    require_finite_nonneg(taxi_std, "taxi_std");
    if (taxi_std > taxi_mean) throw CalibrationError(Kind::Unsolvable, "taxi std exceeds taxi mean");

    // With r = std/mean: r^2 = (1 - m)/N and m = N Ts/mean, so N = 1/(r^2 + Ts/mean).
    const double r = taxi_std / taxi_mean;
    TaxiwayFit fit;
    fit.steps_real = 1.0 / (r * r + step_minutes / taxi_mean);
    fit.steps = static_cast<int>(std::lround(fit.steps_real));
    if (fit.steps < 1) throw CalibrationError(Kind::Unsolvable, "taxiway rounds to zero steps");
    fit.move_prob = std::min(1.0, fit.steps * step_minutes / taxi_mean);
    return fit;
}

int secondary_ramp_steps(double taxi_mean, double move_prob, double step_minutes) {
    if (!(step_minutes > 0.0) || !(move_prob > 0.0))
        throw CalibrationError(Kind::ZeroRate, "step length and move probability must be positive");
    require_finite_nonneg(taxi_mean, "taxi_mean");
    // Guard against 2.75 * 0.9084 landing a hair above an integer through rounding.
    const double x = taxi_mean * move_prob / step_minutes;
    return std::max(1, static_cast<int>(std::ceil(x - 1e-9)));
}

int size_buffer(double taxi_std, double clear_std, double mean_rate, double k_sigma) {
    if (!(mean_rate > 0.0)) throw CalibrationError(Kind::ZeroRate, "mean take-off rate is zero");
    require_finite_nonneg(taxi_std, "taxi_std");
    require_finite_nonneg(clear_std, "clear_std");
    const double supply = k_sigma * std::hypot(taxi_std, clear_std);
    return std::max(1, static_cast<int>(std::lround(supply / mean_rate)));
}

std::vector<int> MinuteSeries::taxiing_estimate() const {
    std::vector<int> out;
    out.reserve(rows.size());
    long count = 0;
    for (const auto& row : rows) {
        out.push_back(static_cast<int>(count));
        count = std::max(0L, count + row.pushbacks - row.takeoffs);
    }
    return out;
}

MinuteSeries read_minute_series(std::istream& in) {
    MinuteSeries series;
    std::string line;
    if (!std::getline(in, line)) throw CalibrationError(Kind::InvalidInput, "minute series is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "minute,pushbacks,takeoffs")
        throw CalibrationError(Kind::InvalidInput, "expected header minute,pushbacks,takeoffs");
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::istringstream ss(line);
        MinuteRow row;
        char c1 = 0, c2 = 0;
        if (!(ss >> row.minute >> c1 >> row.pushbacks >> c2 >> row.takeoffs) || c1 != ',' || c2 != ',' ||
            row.pushbacks < 0 || row.takeoffs < 0 || !(ss >> std::ws).eof())
            throw CalibrationError(Kind::InvalidInput, "bad minute series row at line " + std::to_string(lineno));
        series.rows.push_back(row);
    }
    return series;
}

void write_minute_series(std::ostream& out, const MinuteSeries& series) {
    out << "minute,pushbacks,takeoffs\n";
    for (const auto& r : series.rows) out << r.minute << ',' << r.pushbacks << ',' << r.takeoffs << '\n';
}

ThroughputStats saturation_stats(const MinuteSeries& series, int saturation_cutoff) {
    if (series.rows.empty()) throw CalibrationError(Kind::EmptySample, "minute series is empty");
    const auto est = series.taxiing_estimate();
    double sum = 0.0, sum_sq = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < series.rows.size(); ++i) {
        if (est[i] < saturation_cutoff) continue;
        const double t = series.rows[i].takeoffs;
        sum += t;
        sum_sq += t * t;
        ++n;
    }
    if (n == 0) throw CalibrationError(Kind::EmptySample, "no minutes at or above the saturation cutoff");
    const double mean = sum / static_cast<double>(n);
    const double var = std::max(0.0, sum_sq / static_cast<double>(n) - mean * mean);
    return {mean, std::sqrt(var)};
}

AirportConfig CalibrationReport::to_config(Fairness fairness) const {
    AirportConfig c;
    c.taxiway_len = N_ramp1;
    c.ramps.push_back({"ramp1", 1});
    if (N_ramp2) c.ramps.push_back({"ramp2", N_ramp1 - *N_ramp2 + 1});
    c.queue_capacity = B;
    c.move_prob = m;
    c.clear_prob_1 = c1;
    c.clear_prob_2 = c2;
    c.sample_len_m = Ls;
    c.step_seconds = Ts;
    c.fairness = fairness;
    c.validate();
    return c;
}

CalibrationReport calibrate_airport(const CalibrationInputs& in) {
    if (!(in.step_seconds > 0.0)) throw CalibrationError(Kind::InvalidInput, "step_seconds must be positive");
    const double ts_min = in.step_seconds / 60.0;

    CalibrationReport rep;
    rep.Ls = in.sample_len_m;
    rep.Ts = in.step_seconds;

    const auto pair = solve_bernoulli_pair(in.throughput);
    rep.c1 = pair.c1;
    rep.c2 = pair.c2;
    rep.clearance = clearance_wait_stats(pair.c1, pair.c2);
    rep.taxi_ramp1 = decompose_taxi_stats(in.ramp1, rep.clearance);

    const auto fit = calibrate_taxiway(rep.taxi_ramp1.mean, rep.taxi_ramp1.std, ts_min);
    rep.N_ramp1 = fit.steps;
    rep.m = fit.move_prob;
    rep.steps_real = fit.steps_real;

    if (in.ramp2_unimpeded_mean) {
        TaxiStats t2 = in.ramp1;
        t2.unimpeded_mean = *in.ramp2_unimpeded_mean;
        rep.taxi_ramp2_mean = decompose_taxi_stats(t2, rep.clearance).mean;
        const int steps = secondary_ramp_steps(*rep.taxi_ramp2_mean, rep.m, ts_min);
        if (steps >= rep.N_ramp1)
            throw CalibrationError(Kind::Unsolvable, "second ramp is not closer to the runway than the first");
        rep.N_ramp2 = steps;
    }

    rep.combined_std = std::hypot(rep.taxi_ramp1.std, rep.clearance.std);
    rep.supply_minutes = in.k_sigma * rep.combined_std;
    rep.buffer_real = rep.supply_minutes / in.throughput.mean_rate;
    rep.B = size_buffer(rep.taxi_ramp1.std, rep.clearance.std, in.throughput.mean_rate, in.k_sigma);
    return rep;
}

} // namespace surfacemdp
