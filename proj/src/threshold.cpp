#include "surfacemdp/threshold.hpp"

#include <stdexcept>

namespace surfacemdp {

Decision threshold_decide(const SurfaceState& s, ThresholdParams th, const AirportConfig& config) {
    if (s.aircraft() >= th.threshold) return Decision::Hold;
    if (config.num_ramps() == 1 || config.has_turn_bit()) {
        const Decision k = clear_ramp(config.has_turn_bit() && s.turn ? 1 : 0);
        return clearance_feasible(s, k, config) ? k : Decision::Hold;
    }
    for (int r = 0; r < config.num_ramps(); ++r) {
        if (clearance_feasible(s, clear_ramp(r), config)) return clear_ramp(r);
    }
    return Decision::Hold;
}

Policy threshold_policy(const TransitionModel& model, ThresholdParams th) {
    if (th.threshold < 1) throw std::invalid_argument("threshold must be >= 1");
    Policy p;
    p.kind = PolicyKind::Threshold;
    p.decision.resize(model.num_states());
    for (std::size_t pos = 0; pos < model.num_states(); ++pos) {
        p.decision[pos] = threshold_decide(model.space().state_at(pos), th, model.config());
    }
    return p;
}

ThresholdPoint evaluate_threshold_chain(const TransitionModel& model, ThresholdParams th, CostParams cost) {
    ThresholdPoint point;
    point.threshold = th.threshold;
    try {
        if (th.threshold > model.config().max_aircraft())
            throw std::invalid_argument("threshold exceeds taxiway plus queue capacity");
        const auto eval = evaluate_policy(model, threshold_policy(model, th), cost);
        point.metrics = eval.metrics;
        point.residual = eval.residual;
    } catch (const std::exception& e) {
        point.error = e.what();
    }
    return point;
}

std::vector<ThresholdPoint> threshold_sweep(const TransitionModel& model, const std::vector<int>& thresholds,
                                            CostParams cost) {
    std::vector<ThresholdPoint> out;
    out.reserve(thresholds.size());
    for (int th : thresholds) out.push_back(evaluate_threshold_chain(model, ThresholdParams{th}, cost));
    return out;
}

} // namespace surfacemdp
