#pragma once

#include "surfacemdp/optimal_policy.hpp"
#include "surfacemdp/simulation.hpp"
#include "surfacemdp/threshold.hpp"

#include <iosfwd>
#include <optional>
#include <vector>

namespace surfacemdp {

/// (utilization, average taxiing aircraft) pair of some operating point.
struct CurvePoint {
    double utilization = 0.0;
    double avg_taxiing = 0.0;
};

/// Piecewise-linear interpolation over points sorted by utilization; NaN
/// outside [first, last].
double interpolate_curve(const std::vector<CurvePoint>& curve, double utilization);

std::vector<CurvePoint> curve_of(const std::vector<ParetoPoint>& front);
std::vector<CurvePoint> curve_of(const std::vector<ThresholdPoint>& sweep);

struct ComparisonRow {
    int threshold = 0;
    double utilization = 0.0;
    double avg_taxiing_threshold = 0.0;
    double avg_taxiing_optimal = 0.0;
    double avg_taxiing_mls = 0.0;        ///< NaN when no MLS curve covers the point
    double reduction_percent = 0.0;      ///< 100 (thr - opt) / thr
};

/// One row per successful threshold point whose utilization the optimal curve
/// covers. Throws std::invalid_argument when the ranges do not overlap.
std::vector<ComparisonRow> compare_curves(const std::vector<ThresholdPoint>& thresholds,
                                          const std::vector<CurvePoint>& optimal,
                                          const std::vector<CurvePoint>& mls = {});

struct BandSummary {
    double lo = 0.0;
    double hi = 0.0;
    std::size_t rows = 0;
    double min_reduction = 0.0;   ///< NaN when the band holds no rows
    double max_reduction = 0.0;
};

BandSummary band_summary(const std::vector<ComparisonRow>& rows, double lo, double hi);

/// MLS operating point per optimal policy, estimated by simulation.
struct MlsPoint {
    double beta = 0.0;
    SimResult sim;
};

struct PolicyComparison {
    std::vector<ThresholdPoint> thresholds;
    std::vector<ParetoPoint> sweep;        ///< grid and refinement points, by beta
    std::vector<ParetoPoint> front;        ///< front of all sweep points
    std::vector<ParetoPoint> grid_front;   ///< front of the requested beta grid only
    std::vector<MlsPoint> mls;
    std::vector<ComparisonRow> rows;
};

/// Threshold sweep, optimal beta sweep refined at the threshold utilizations,
/// and (when `sim` is given) MLS rollouts of each front policy, joined at the
/// threshold utilizations.
PolicyComparison compare_policies(const TransitionModel& model, const std::vector<double>& betas,
                                  const std::vector<int>& thresholds, const std::optional<SimConfig>& sim,
                                  const SolverOptions& options = {});

void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows);
std::vector<ComparisonRow> read_comparison_csv(std::istream& in);

struct EmissionsRow {
    double utilization = 0.0;
    double threshold_kg_per_min = 0.0;
    double optimal_kg_per_min = 0.0;
    double delta_kg_per_min = 0.0;
    double reduction_percent = 0.0;
};

/// Emissions as a linear factor (kg per aircraft-minute) on taxiing aircraft.
std::vector<EmissionsRow> emissions_from(const std::vector<ComparisonRow>& rows, double kg_per_aircraft_minute);
void write_emissions_csv(std::ostream& out, const std::vector<EmissionsRow>& rows);

} // namespace surfacemdp
