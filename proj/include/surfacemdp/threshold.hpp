#pragma once

#include "surfacemdp/policy.hpp"

#include <vector>

namespace surfacemdp {

/// Surface-count limit of the windowing benchmark.
struct ThresholdParams {
    int threshold = 1;
};

/// Clear the ramp holding the turn iff N_ac < threshold and its entry sample is
/// free; Hold otherwise. Single-ramp configurations always use the first ramp,
/// two-ramp configurations without a turn bit use the first free ramp.
Decision threshold_decide(const SurfaceState& s, ThresholdParams th, const AirportConfig& config);

Policy threshold_policy(const TransitionModel& model, ThresholdParams th);

struct ThresholdPoint {
    int threshold = 1;
    StationaryMetrics metrics;
    double residual = 0.0;
    std::string error;
    bool ok() const { return error.empty(); }
};

/// Stationary metrics of the closed loop started from the empty surface.
ThresholdPoint evaluate_threshold_chain(const TransitionModel& model, ThresholdParams th, CostParams cost = {});

std::vector<ThresholdPoint> threshold_sweep(const TransitionModel& model, const std::vector<int>& thresholds,
                                            CostParams cost = {});

} // namespace surfacemdp
