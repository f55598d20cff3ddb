#include "surfacemdp/compare.hpp"

#include "surfacemdp/format.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace surfacemdp {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
}

double interpolate_curve(const std::vector<CurvePoint>& curve, double u) {
    if (curve.empty() || u < curve.front().utilization || u > curve.back().utilization) return kNaN;
    for (std::size_t i = 1; i < curve.size(); ++i) {
        const auto& a = curve[i - 1];
        const auto& b = curve[i];
        if (u > b.utilization) continue;
        const double w = b.utilization - a.utilization;
        if (w <= 0.0) return std::min(a.avg_taxiing, b.avg_taxiing);
        const double t = (u - a.utilization) / w;
        return a.avg_taxiing + t * (b.avg_taxiing - a.avg_taxiing);
    }
    return curve.back().avg_taxiing;
}

std::vector<CurvePoint> curve_of(const std::vector<ParetoPoint>& front) {
    std::vector<CurvePoint> out;
    for (const auto& p : front) {
        if (p.ok()) out.push_back({p.metrics.utilization, p.metrics.avg_taxiing});
    }
    std::sort(out.begin(), out.end(),
              [](const CurvePoint& a, const CurvePoint& b) { return a.utilization < b.utilization; });
    return out;
}

std::vector<CurvePoint> curve_of(const std::vector<ThresholdPoint>& sweep) {
    std::vector<CurvePoint> out;
    for (const auto& p : sweep) {
        if (p.ok()) out.push_back({p.metrics.utilization, p.metrics.avg_taxiing});
    }
    std::sort(out.begin(), out.end(),
              [](const CurvePoint& a, const CurvePoint& b) { return a.utilization < b.utilization; });
    return out;
}

std::vector<ComparisonRow> compare_curves(const std::vector<ThresholdPoint>& thresholds,
                                          const std::vector<CurvePoint>& optimal, const std::vector<CurvePoint>& mls) {
    std::vector<ComparisonRow> rows;
    for (const auto& t : thresholds) {
        if (!t.ok()) continue;
        const double opt = interpolate_curve(optimal, t.metrics.utilization);
        if (std::isnan(opt)) continue;
        ComparisonRow r;
        r.threshold = t.threshold;
        r.utilization = t.metrics.utilization;
        r.avg_taxiing_threshold = t.metrics.avg_taxiing;
        r.avg_taxiing_optimal = opt;
        r.avg_taxiing_mls = interpolate_curve(mls, r.utilization);
        r.reduction_percent = r.avg_taxiing_threshold > 0.0
                                  ? 100.0 * (r.avg_taxiing_threshold - opt) / r.avg_taxiing_threshold
                                  : 0.0;
        rows.push_back(r);
    }
    if (rows.empty()) throw std::invalid_argument("threshold and optimal utilization ranges do not overlap");
    std::sort(rows.begin(), rows.end(),
              [](const ComparisonRow& a, const ComparisonRow& b) { return a.utilization < b.utilization; });
    return rows;
}

BandSummary band_summary(const std::vector<ComparisonRow>& rows, double lo, double hi) {
    BandSummary s{lo, hi, 0, kNaN, kNaN};
    for (const auto& r : rows) {
        if (r.utilization < lo || r.utilization > hi) continue;
        if (s.rows++ == 0) {
            s.min_reduction = s.max_reduction = r.reduction_percent;
        } else {
            s.min_reduction = std::min(s.min_reduction, r.reduction_percent);
            s.max_reduction = std::max(s.max_reduction, r.reduction_percent);
        }
    }
    return s;
}

PolicyComparison compare_policies(const TransitionModel& model, const std::vector<double>& betas,
                                  const std::vector<int>& thresholds, const std::optional<SimConfig>& sim,
                                  const SolverOptions& options) {
    if (betas.empty() || thresholds.empty()) throw std::invalid_argument("beta and threshold lists must be nonempty");
    PolicyComparison out;
    out.thresholds = threshold_sweep(model, thresholds);
    std::vector<double> targets;
    for (const auto& t : out.thresholds) {
        if (t.ok()) targets.push_back(t.metrics.utilization);
    }
    auto grid = pareto_sweep(model, betas, options);
    out.grid_front = pareto_front(grid);
    out.sweep = refine_sweep(model, std::move(grid), targets, options);
    out.front = pareto_front(out.sweep);

    std::vector<CurvePoint> mls_curve;
    if (sim) {
        const auto obs = ObservationModel::deterministic(model.space());
        for (const auto& p : out.grid_front) {
            MlsSimController controller(model, p.policy, obs);
            MlsPoint m;
            m.beta = p.beta;
            m.sim = rollout(model, controller, *sim, CostParams{p.beta});
            mls_curve.push_back({m.sim.utilization, m.sim.avg_taxiing});
            out.mls.push_back(std::move(m));
        }
        std::sort(mls_curve.begin(), mls_curve.end(),
                  [](const CurvePoint& a, const CurvePoint& b) { return a.utilization < b.utilization; });
    }
    out.rows = compare_curves(out.thresholds, curve_of(out.front), mls_curve);
    return out;
}

void write_comparison_csv(std::ostream& out, const std::vector<ComparisonRow>& rows) {
    out << "threshold,utilization,avg_taxiing_threshold,avg_taxiing_optimal,avg_taxiing_mls,reduction_percent\n";
    for (const auto& r : rows) {
        out << r.threshold << ',' << fixed(r.utilization) << ',' << fixed(r.avg_taxiing_threshold) << ','
            << fixed(r.avg_taxiing_optimal) << ',' << fixed(r.avg_taxiing_mls) << ',' << fixed(r.reduction_percent)
            << '\n';
    }
}

std::vector<ComparisonRow> read_comparison_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) ||
        line.rfind("threshold,utilization,avg_taxiing_threshold,avg_taxiing_optimal", 0) != 0)
        throw std::invalid_argument("not a comparison table");
    std::vector<ComparisonRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) f.push_back(cell);
        if (f.size() != 6) throw std::invalid_argument("comparison row has " + std::to_string(f.size()) + " fields");
        ComparisonRow r;
        try {
            r.threshold = std::stoi(f[0]);
            r.utilization = std::stod(f[1]);
            r.avg_taxiing_threshold = std::stod(f[2]);
            r.avg_taxiing_optimal = std::stod(f[3]);
            r.avg_taxiing_mls = f[4] == "nan" ? kNaN : std::stod(f[4]);
            r.reduction_percent = std::stod(f[5]);
        } catch (const std::logic_error&) {
            throw std::invalid_argument("bad number in comparison row: " + line);
        }
        rows.push_back(r);
    }
    return rows;
}

std::vector<EmissionsRow> emissions_from(const std::vector<ComparisonRow>& rows, double factor) {
    if (!(factor > 0.0) || !std::isfinite(factor)) throw std::invalid_argument("emissions factor must be positive");
    std::vector<EmissionsRow> out;
    out.reserve(rows.size());
    for (const auto& r : rows) {
        EmissionsRow e;
        e.utilization = r.utilization;
        e.threshold_kg_per_min = factor * r.avg_taxiing_threshold;
        e.optimal_kg_per_min = factor * r.avg_taxiing_optimal;
        e.delta_kg_per_min = factor * (r.avg_taxiing_threshold - r.avg_taxiing_optimal);
        e.reduction_percent =
            e.threshold_kg_per_min > 0.0 ? 100.0 * e.delta_kg_per_min / e.threshold_kg_per_min : 0.0;
        out.push_back(e);
    }
    return out;
}

void write_emissions_csv(std::ostream& out, const std::vector<EmissionsRow>& rows) {
    out << "utilization,threshold_kg_per_min,optimal_kg_per_min,delta_kg_per_min,reduction_percent\n";
    for (const auto& e : rows) {
        out << fixed(e.utilization) << ',' << fixed(e.threshold_kg_per_min) << ',' << fixed(e.optimal_kg_per_min)
            << ',' << fixed(e.delta_kg_per_min) << ',' << fixed(e.reduction_percent) << '\n';
    }
}

} // namespace surfacemdp
