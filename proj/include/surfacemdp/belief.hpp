#pragma once

#include "surfacemdp/policy.hpp"

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <vector>

namespace surfacemdp {

/// What the controller sees: the aircraft count and, per ramp, whether a
/// clearance is physically possible (entry sample free and, under alternation,
/// the ramp holds the turn).
struct Observation {
    int n_ac = 0;
    std::uint32_t ramp_free = 0;   ///< bit r set iff ramp r can be cleared

    bool operator==(const Observation&) const = default;
};

Observation observe(const SurfaceState& s, const AirportConfig& config);

/// Bits used for the aircraft-count field of the observation index.
int observation_count_bits(const AirportConfig& config);

/// Concatenation [n_ac | ramp_free] with fixed field widths; injective.
/// Throws std::out_of_range when a field does not fit its width.
std::uint32_t observation_index(const Observation& o, const AirportConfig& config);
Observation observation_from_index(std::uint32_t index, const AirportConfig& config);

/// Deterministic observation channel p(o | j) in {0, 1}.
class ObservationModel {
public:
    /// Channel o = observation_index(observe(j)).
    static ObservationModel deterministic(const StateSpace& space);
    /// Each state is its own observation (full information).
    static ObservationModel identity(const StateSpace& space);
    /// Arbitrary deterministic channel: state position i emits codes[i].
    static ObservationModel from_codes(std::vector<std::uint32_t> codes);

    std::uint32_t of(std::size_t pos) const { return obs_[pos]; }
    double likelihood(std::uint32_t o, std::size_t pos) const { return obs_[pos] == o ? 1.0 : 0.0; }
    std::size_t num_states() const { return obs_.size(); }
    /// One past the largest observation code.
    std::uint32_t num_codes() const { return num_codes_; }
    /// Positions emitting `o`, ascending.
    std::vector<std::size_t> consistent_states(std::uint32_t o) const;

private:
    std::vector<std::uint32_t> obs_;
    std::uint32_t num_codes_ = 0;
};

class ZeroLikelihood : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Probability vector over state positions.
struct BeliefState {
    std::vector<double> b;

    static BeliefState indicator(std::size_t num_states, std::size_t pos);
    /// Uniform over the states consistent with `o`.
    static BeliefState uniform_consistent(const ObservationModel& obs, std::uint32_t o);

    double total() const;
    /// Lowest position among the maximal entries.
    std::size_t argmax() const;
};

/// b'_j = p(o|j) sum_i P(j|i,k) b_i / normalizer. States where k is infeasible
/// propagate along their Hold row, matching how a plant treats such decisions.
/// Throws ZeroLikelihood when no propagated mass is consistent with o.
BeliefState belief_update(const BeliefState& b, Decision k, std::uint32_t o, const TransitionModel& model,
                          const ObservationModel& obs);

/// pi(argmax b), or Hold when that decision is infeasible on the whole support.
Decision mls_decide(const BeliefState& b, const Policy& pi, const TransitionModel& model);

/// Stateful Most-Likely-State controller for a single trajectory.
class MlsController {
public:
    MlsController(const TransitionModel& model, const Policy& pi, ObservationModel obs);

    /// Restarts from an indicator belief at `pos` (default: the empty surface).
    void reset(std::size_t pos = 0);
    Decision decide() const { return mls_decide(belief_, pi_, model_); }
    /// Absorbs the decision applied and the next observation. On a zero
    /// likelihood the belief restarts uniform over consistent states.
    void update(Decision applied, std::uint32_t o);

    const BeliefState& belief() const { return belief_; }
    std::size_t most_likely() const { return belief_.argmax(); }
    const ObservationModel& observations() const { return obs_; }
    std::size_t recoveries() const { return recoveries_; }

private:
    const TransitionModel& model_;
    const Policy& pi_;
    ObservationModel obs_;
    BeliefState belief_;
    std::size_t recoveries_ = 0;
};

/// Trajectory log row for MLS rollouts.
struct MlsLogRow {
    std::uint64_t t = 0;
    std::uint32_t observation = 0;
    std::uint32_t mls_state = 0;   ///< state index
    Decision decision = Decision::Hold;
};

void write_mls_log_csv(std::ostream& out, const std::vector<MlsLogRow>& rows);

} // namespace surfacemdp
