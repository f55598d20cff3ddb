#pragma once

#include "surfacemdp/airport.hpp"

#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace surfacemdp {

class CalibrationError : public std::runtime_error {
public:
    enum class Kind { NoRealSolution, ZeroRate, NegativeVariance, Unsolvable, EmptySample, InvalidInput };

    CalibrationError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    Kind kind() const { return kind_; }

private:
    Kind kind_;
};

/// Take-off rate statistics under saturated taxiway conditions, aircraft per minute.
struct ThroughputStats {
    double mean_rate = 0.0;
    double std_rate = 0.0;
};

/// Light-traffic taxi-out statistics in minutes.
struct TaxiStats {
    double unimpeded_mean = 0.0;
    double unimpeded_std = 0.0;
    double pushback_mean = 0.0;
    double pushback_std = 0.0;
};

struct BernoulliPair {
    double c1 = 0.0;
    double c2 = 0.0;
};

struct MeanStd {
    double mean = 0.0;
    double std = 0.0;
};

struct TaxiwayFit {
    int steps = 1;              ///< N, rounded
    double move_prob = 1.0;     ///< m recomputed from the mean equation
    double steps_real = 1.0;    ///< N before rounding
};

/// c1 >= c2 with c1 + c2 = mean and c1(1-c1) + c2(1-c2) = std^2.
BernoulliPair solve_bernoulli_pair(const ThroughputStats& stats);

/// Geometric waiting time at the runway threshold with success probability c1 + c2.
MeanStd clearance_wait_stats(double c1, double c2);

/// Removes pushback and clearance-wait contributions from the unimpeded taxi-out time.
MeanStd decompose_taxi_stats(const TaxiStats& taxi, const MeanStd& clearance);

/// Fits (N, m) to (N/m) Ts = mean and (N/m) sqrt((1-m)/N) Ts = std.
TaxiwayFit calibrate_taxiway(double taxi_mean, double taxi_std, double step_minutes);

/// Steps for a secondary ramp sharing the move probability m: ceil(mean m / Ts).
int secondary_ramp_steps(double taxi_mean, double move_prob, double step_minutes);

/// Buffer able to supply aircraft for k_sigma combined standard deviations:
/// round(k_sigma * sqrt(taxi_std^2 + clear_std^2) / mean_rate), at least 1.
int size_buffer(double taxi_std, double clear_std, double mean_rate, double k_sigma = 3.0);

/// Minute-level departure counts.
struct MinuteRow {
    long minute = 0;
    int pushbacks = 0;
    int takeoffs = 0;
};

struct MinuteSeries {
    std::vector<MinuteRow> rows;

    /// Input-output estimate of taxiing aircraft at the start of each minute:
    /// cumulative pushbacks minus take-offs, clamped at zero, starting from zero.
    std::vector<int> taxiing_estimate() const;
};

/// Reads CSV with header `minute,pushbacks,takeoffs`.
MinuteSeries read_minute_series(std::istream& in);
void write_minute_series(std::ostream& out, const MinuteSeries& series);

/// Mean and (population) standard deviation of take-offs over the minutes whose
/// estimated taxiing count is at least `saturation_cutoff`.
ThroughputStats saturation_stats(const MinuteSeries& series, int saturation_cutoff);

/// Aggregated inputs of the end-to-end calibration.
struct CalibrationInputs {
    ThroughputStats throughput;
    TaxiStats ramp1;
    /// Unimpeded taxi-out mean of a second ramp, if any (pushback and
    /// clearance contributions are taken from the first ramp).
    std::optional<double> ramp2_unimpeded_mean;
    double step_seconds = 60.0;
    double sample_len_m = 200.0;
    double k_sigma = 3.0;
};

/// Calibrated parameters plus the intermediate quantities they derive from.
struct CalibrationReport {
    double Ls = 200.0;
    double Ts = 60.0;
    int N_ramp1 = 1;
    std::optional<int> N_ramp2;
    double m = 1.0;
    double c1 = 0.0;
    double c2 = 0.0;
    int B = 1;

    MeanStd clearance;
    MeanStd taxi_ramp1;
    std::optional<double> taxi_ramp2_mean;
    double steps_real = 0.0;
    double combined_std = 0.0;
    double supply_minutes = 0.0;
    double buffer_real = 0.0;

    /// Airport configuration on a single taxiway of N_ramp1 samples; a second
    /// ramp enters N_ramp2 steps before the queue.
    AirportConfig to_config(Fairness fairness = Fairness::Alternation) const;
};

CalibrationReport calibrate_airport(const CalibrationInputs& inputs);

} // namespace surfacemdp
