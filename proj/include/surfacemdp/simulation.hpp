#pragma once

#include "surfacemdp/belief.hpp"
#include "surfacemdp/calibration.hpp"
#include "surfacemdp/threshold.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <random>
#include <string>
#include <vector>

namespace surfacemdp {

struct SimConfig {
    std::uint64_t steps = 1'000'000;   ///< per replication, warmup included
    std::uint64_t warmup = 10'000;
    std::uint64_t seed = 1;
    int replications = 1;

    void validate() const;
};

/// splitmix64 step; also used to derive replication seeds.
std::uint64_t splitmix64(std::uint64_t& state);

/// Seed of replication r: the (r + 1)-th splitmix64 output from `seed`.
std::uint64_t replication_seed(std::uint64_t seed, int replication);

/// 64-bit Mersenne Twister with uniform doubles from the top 53 bits.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
    bool bernoulli(double p) { return uniform() < p; }
    static constexpr const char* name() { return "mt19937_64+splitmix64"; }

private:
    std::mt19937_64 gen_;
};

/// Decision maker driven by a rollout.
class Controller {
public:
    virtual ~Controller() = default;
    /// Called at the start of each replication with the initial state.
    virtual void reset(const SurfaceState& s, std::size_t pos) {
        (void)s;
        (void)pos;
    }
    virtual Decision decide(const SurfaceState& s, std::size_t pos) = 0;
    /// Called after each step with the decision actually applied and the new state.
    virtual void observe(Decision applied, const SurfaceState& next, std::size_t pos) {
        (void)applied;
        (void)next;
        (void)pos;
    }
};

class PolicyController final : public Controller {
public:
    explicit PolicyController(const Policy& pi) : pi_(pi) {}
    Decision decide(const SurfaceState&, std::size_t pos) override { return pi_(pos); }

private:
    const Policy& pi_;
};

class ThresholdController final : public Controller {
public:
    ThresholdController(ThresholdParams th, const AirportConfig& config) : th_(th), config_(config) {}
    Decision decide(const SurfaceState& s, std::size_t) override { return threshold_decide(s, th_, config_); }

private:
    ThresholdParams th_;
    const AirportConfig& config_;
};

/// Clears whenever some clearance is feasible (saturating the surface).
class AlwaysClearController final : public Controller {
public:
    explicit AlwaysClearController(const AirportConfig& config) : config_(config) {}
    Decision decide(const SurfaceState& s, std::size_t) override;

private:
    const AirportConfig& config_;
};

class NeverClearController final : public Controller {
public:
    Decision decide(const SurfaceState&, std::size_t) override { return Decision::Hold; }
};

/// Most-Likely-State controller fed with observations of the simulated plant.
class MlsSimController final : public Controller {
public:
    MlsSimController(const TransitionModel& model, const Policy& pi, ObservationModel obs, bool keep_log = false)
        : mls_(model, pi, std::move(obs)), keep_log_(keep_log) {}

    void reset(const SurfaceState& s, std::size_t pos) override;
    Decision decide(const SurfaceState& s, std::size_t pos) override;
    void observe(Decision applied, const SurfaceState& next, std::size_t pos) override;

    const MlsController& mls() const { return mls_; }
    const std::vector<MlsLogRow>& log() const { return log_; }
    /// Largest |sum(b) - 1| seen after any update.
    double max_normalization_error() const { return max_norm_error_; }
    std::uint64_t updates() const { return updates_; }

private:
    MlsController mls_;
    bool keep_log_;
    std::vector<MlsLogRow> log_;
    std::uint32_t last_obs_ = 0;
    std::uint64_t t_ = 0;
    std::uint64_t updates_ = 0;
    double max_norm_error_ = 0.0;
};

/// Take-off statistics for one aircraft-count bin.
struct CongestionBin {
    int n_ac = 0;
    std::uint64_t samples = 0;
    std::array<std::uint64_t, 3> takeoff_hist{};   ///< steps with 0, 1, 2 take-offs

    double mean() const;
    /// Quartile q in {1, 2, 3} of the take-off count distribution.
    int quartile(int q) const;
};

struct ReplicationStats {
    std::uint64_t seed = 0;
    double takeoff_mean = 0.0;
    double avg_taxiing = 0.0;
    double expected_cost = 0.0;
};

struct SimResult {
    std::string rng = Rng::name();
    std::uint64_t samples = 0;          ///< post-warmup steps over all replications
    double takeoff_mean = 0.0;          ///< aircraft per step
    double takeoff_std = 0.0;
    double avg_taxiing = 0.0;           ///< mean N_ac at the start of a step
    double utilization = 0.0;
    double expected_cost = 0.0;
    double idle_probability = 0.0;
    /// Batch-means standard errors (20 batches per replication).
    double takeoff_se = 0.0;
    double avg_taxiing_se = 0.0;
    double expected_cost_se = 0.0;
    std::uint64_t coerced_holds = 0;
    std::uint64_t conservation_violations = 0;
    std::vector<CongestionBin> bins;    ///< indexed by N_ac, 0..max observed
    std::vector<ReplicationStats> replications;
};

/// Samples one step by composing take-offs, the clearance and the move scan
/// directly, without the kernel. `k` must be feasible. Returns the take-offs.
int sample_step(SurfaceState& s, Decision k, const AirportConfig& config, Rng& rng);

/// Simulates `controller` from the empty surface. Infeasible decisions are
/// applied as Hold and counted.
SimResult rollout(const TransitionModel& model, Controller& controller, const SimConfig& sim, CostParams cost = {});

struct CongestionPoint {
    int n_ac = 0;
    std::uint64_t samples = 0;
    double mean_rate = 0.0;
    int q1 = 0, median = 0, q3 = 0;
    bool sparse = false;   ///< fewer than 100 samples
};

std::vector<CongestionPoint> congestion_curve(const SimResult& result);

/// Take-off rate against the input-output taxiing estimate of a minute series,
/// binned at estimate - offset (clamped at zero).
std::vector<CongestionPoint> observed_congestion_curve(const MinuteSeries& series, int offset = 0);

void write_congestion_csv(std::ostream& out, const std::vector<CongestionPoint>& curve);
void write_sim_summary_csv(std::ostream& out, const std::vector<std::pair<std::string, SimResult>>& rows);

} // namespace surfacemdp
