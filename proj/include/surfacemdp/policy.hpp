#pragma once

#include "surfacemdp/transitions.hpp"

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace surfacemdp {

/// Weight of a runway-idle step relative to one aircraft on the surface for one step.
struct CostParams {
    double beta = 0.0;
};

/// C = N_ac + beta * [queue empty]
double state_cost(const SurfaceState& s, CostParams cost);
double state_cost(StateIndex idx, CostParams cost, const AirportConfig& config);

enum class PolicyKind { FullState, Threshold, MLS };
std::string_view to_string(PolicyKind kind);

/// Deterministic stationary clearance policy, one decision per state position.
struct Policy {
    std::vector<Decision> decision;
    PolicyKind kind = PolicyKind::FullState;
    /// Positions carrying occupation mass (empty when not derived from a measure).
    std::vector<std::uint8_t> recurrent;
    /// Positions whose measure split mass over several decisions; resolved to Hold.
    std::vector<std::size_t> randomized;

    Decision operator()(std::size_t pos) const { return decision[pos]; }
    std::size_t size() const { return decision.size(); }
};

struct StationaryMetrics {
    double avg_taxiing = 0.0;     ///< E[N_ac], aircraft
    double utilization = 0.0;     ///< takeoff_rate / (c1 + c2)
    double expected_cost = 0.0;   ///< per-step cost
    double takeoff_rate = 0.0;    ///< aircraft per step
    double idle_probability = 0.0;///< P(queue empty)
};

/// Metrics of a state distribution (positions) under `cost`.
StationaryMetrics metrics_from_distribution(std::span<const double> pi, const StateSpace& space, CostParams cost);

struct PolicyEvaluation {
    std::vector<double> distribution;
    StationaryMetrics metrics;
    double residual = 0.0;
};

/// Long-run behaviour of the closed loop started at `start` (default: empty surface).
PolicyEvaluation evaluate_policy(const TransitionModel& model, const Policy& policy, CostParams cost,
                                 std::size_t start = 0);

} // namespace surfacemdp
