#include "surfacemdp/policy.hpp"

#include "surfacemdp/markov_chain.hpp"

namespace surfacemdp {

double state_cost(const SurfaceState& s, CostParams cost) {
    return static_cast<double>(s.aircraft()) + (s.queue == 0 ? cost.beta : 0.0);
}

double state_cost(StateIndex idx, CostParams cost, const AirportConfig& config) {
    return state_cost(decode(idx, config), cost);
}

std::string_view to_string(PolicyKind kind) {
    switch (kind) {
    case PolicyKind::FullState: return "FullState";
    case PolicyKind::Threshold: return "Threshold";
    case PolicyKind::MLS: return "MLS";
    }
    return "FullState";
}

StationaryMetrics metrics_from_distribution(std::span<const double> pi, const StateSpace& space, CostParams cost) {
    const auto& config = space.config();
    StationaryMetrics m;
    for (std::size_t pos = 0; pos < pi.size(); ++pos) {
        if (pi[pos] == 0.0) continue;
        const SurfaceState s = space.state_at(pos);
        m.avg_taxiing += pi[pos] * s.aircraft();
        m.takeoff_rate += pi[pos] * takeoff_distribution(s.queue, config.clear_prob_1, config.clear_prob_2).mean();
        if (s.queue == 0) m.idle_probability += pi[pos];
    }
    m.expected_cost = m.avg_taxiing + cost.beta * m.idle_probability;
    const double rate = config.service_rate();
    m.utilization = rate > 0.0 ? m.takeoff_rate / rate : 0.0;
    return m;
}

PolicyEvaluation evaluate_policy(const TransitionModel& model, const Policy& policy, CostParams cost,
                                 std::size_t start) {
    const ClosedLoopChain chain(model, policy.decision);
    PolicyEvaluation out;
    out.distribution = stationary_from(chain, start);
    out.residual = stationary_residual(chain, out.distribution);
    out.metrics = metrics_from_distribution(out.distribution, model.space(), cost);
    return out;
}

} // namespace surfacemdp
