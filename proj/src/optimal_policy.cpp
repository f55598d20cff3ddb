#include "surfacemdp/optimal_policy.hpp"

#include "surfacemdp/markov_chain.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace surfacemdp {

double OccupationMeasure::state_mass(std::size_t pos) const {
    double mass = 0.0;
    for (int k = 0; k < num_decisions; ++k) mass += at(pos, static_cast<Decision>(k));
    return mass;
}

double OccupationMeasure::clearance_mass(int ramp) const {
    if (ramp + 1 >= num_decisions) return 0.0;
    double mass = 0.0;
    for (std::size_t pos = 0; pos < num_states; ++pos) mass += at(pos, clear_ramp(ramp));
    return mass;
}

LpResiduals lp_residuals(const OccupationMeasure& measure, const TransitionModel& model) {
    LpResiduals r;
    std::vector<double> inflow(model.num_states(), 0.0);
    double total = 0.0;
    r.min_entry = std::numeric_limits<double>::infinity();
    for (std::size_t pos = 0; pos < model.num_states(); ++pos) {
        for (int k = 0; k < model.num_decisions(); ++k) {
            const auto decision = static_cast<Decision>(k);
            const double y = measure.at(pos, decision);
            r.min_entry = std::min(r.min_entry, y);
            total += y;
            if (y == 0.0) continue;
            for (const auto& e : model.successors(pos, decision)) inflow[e.target] += y * e.prob;
        }
    }
    r.mass = std::abs(total - 1.0);
    for (std::size_t pos = 0; pos < model.num_states(); ++pos) {
        r.balance = std::max(r.balance, std::abs(measure.state_mass(pos) - inflow[pos]));
    }
    if (model.config().num_ramps() == 2) r.fairness = std::abs(measure.clearance_mass(0) - measure.clearance_mass(1));
    return r;
}

namespace {

struct RviResult {
    std::vector<double> h;  // relative values of the transformed problem
    double lower = 0.0;
    double upper = 0.0;
    std::vector<Decision> greedy;
    long iterations = 0;
    bool converged = false;
};

// Relative value iteration on P' = tau I + (1 - tau) P. At termination the
// pair (lower, (1 - tau) h) is feasible for the dual LP of the original model.
RviResult relative_value_iteration(const TransitionModel& model, const std::vector<double>& state_costs,
                                   const std::array<double, 3>& decision_costs, const SolverOptions& options,
                                   const std::vector<double>* warm_bias) {
    const std::size_t n = model.num_states();
    const int nk = model.num_decisions();
    const double tau = options.aperiodicity;
    const double keep = 1.0 - tau;

    RviResult out;
    out.h.assign(n, 0.0);
    if (warm_bias != nullptr && warm_bias->size() == n) {
        for (std::size_t i = 0; i < n; ++i) out.h[i] = (*warm_bias)[i] / keep;
    }
    out.greedy.assign(n, Decision::Hold);
    std::vector<double> next(n, 0.0);

    for (long it = 0; it < options.max_iterations; ++it) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < n; ++i) {
            double best = std::numeric_limits<double>::infinity();
            Decision arg = Decision::Hold;
            for (int k = 0; k < nk; ++k) {
                const auto decision = static_cast<Decision>(k);
                const auto row = model.successors(i, decision);
                if (row.empty()) continue;
                double expect = 0.0;
                for (const auto& e : row) expect += e.prob * out.h[e.target];
                const double value = state_costs[i] + decision_costs[static_cast<std::size_t>(k)] + tau * out.h[i] +
                                     keep * expect;
                if (k == 0 || best == std::numeric_limits<double>::infinity() ||
                    value < best - options.tie_tolerance * (1.0 + std::abs(best))) {
                    best = value;
                    arg = decision;
                }
            }
            next[i] = best;
            out.greedy[i] = arg;
            const double diff = best - out.h[i];
            lo = std::min(lo, diff);
            hi = std::max(hi, diff);
        }
        out.lower = lo;
        out.upper = hi;
        out.iterations = it + 1;
        const double scale = std::max({1.0, std::abs(lo), std::abs(hi)});
        if (hi - lo <= options.tolerance * scale) {
            out.converged = true;
            return out;
        }
        const double anchor = next[0];
        for (std::size_t i = 0; i < n; ++i) out.h[i] = next[i] - anchor;
    }
    return out;
}

struct Candidate {
    RviResult rvi;
    std::vector<double> pi;  // stationary distribution of the selected closed class
    double cost = 0.0;       // true cost sum C_i pi_i
    double imbalance = 0.0;  // ramp-1 minus ramp-2 clearance frequency
    double multiplier = 0.0;
};

Candidate solve_with_multiplier(const TransitionModel& model, const std::vector<double>& state_costs,
                                double multiplier, const SolverOptions& options,
                                const std::vector<double>* warm_h) {
    std::array<double, 3> decision_costs{0.0, multiplier, -multiplier};
    Candidate c;
    c.multiplier = multiplier;
    c.rvi = relative_value_iteration(model, state_costs, decision_costs, options, warm_h);

    const ClosedLoopChain chain(model, c.rvi.greedy);
    const auto classes = recurrent_classes(chain);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& cls : classes) {
        auto pi = class_stationary(chain, cls);
        double lagrangian = 0.0;
        double cost = 0.0;
        double imbalance = 0.0;
        for (auto v : cls) {
            const auto k = c.rvi.greedy[v];
            cost += pi[v] * state_costs[v];
            lagrangian += pi[v] * (state_costs[v] + decision_costs[static_cast<std::size_t>(k)]);
            if (k == Decision::ClearRamp1) imbalance += pi[v];
            if (k == Decision::ClearRamp2) imbalance -= pi[v];
        }
        if (lagrangian < best) {
            best = lagrangian;
            c.pi = std::move(pi);
            c.cost = cost;
            c.imbalance = imbalance;
        }
    }
    return c;
}

std::vector<double> original_scale_bias(const RviResult& rvi, double tau) {
    std::vector<double> bias(rvi.h.size());
    for (std::size_t i = 0; i < bias.size(); ++i) bias[i] = (1.0 - tau) * rvi.h[i];
    return bias;
}

void accumulate(OccupationMeasure& measure, const Candidate& c, double weight) {
    for (std::size_t pos = 0; pos < measure.num_states; ++pos) {
        if (c.pi[pos] > 0.0) measure.at(pos, c.rvi.greedy[pos]) += weight * c.pi[pos];
    }
}

} // namespace

LpSolution solve_average_cost_lp(const TransitionModel& model, CostParams cost, const SolverOptions& options,
                                 const std::vector<double>* warm_bias) {
    if (!std::isfinite(cost.beta) || cost.beta < 0.0) throw std::invalid_argument("beta must be finite and >= 0");
    const auto& space = model.space();
    std::vector<double> state_costs(model.num_states());
    for (std::size_t pos = 0; pos < state_costs.size(); ++pos) state_costs[pos] = state_cost(space.state_at(pos), cost);

    LpSolution sol;
    sol.cost = cost;
    sol.fairness = model.config().fairness;
    sol.measure.num_states = model.num_states();
    sol.measure.num_decisions = model.num_decisions();
    sol.measure.y.assign(model.num_states() * static_cast<std::size_t>(model.num_decisions()), 0.0);

    const bool statistical = model.config().fairness == Fairness::Statistical && model.config().num_ramps() == 2;
    const double tau = options.aperiodicity;
    std::vector<double> warm;
    if (warm_bias != nullptr) warm = *warm_bias;

    auto finish = [&](const Candidate& main) {
        sol.bias = original_scale_bias(main.rvi, tau);
        sol.greedy = main.rvi.greedy;
    };

    Candidate base = solve_with_multiplier(model, state_costs, 0.0, options, warm.empty() ? nullptr : &warm);
    sol.iterations = base.rvi.iterations;
    sol.converged = base.rvi.converged;
    const double balanced = 1e-13;
    if (!statistical || std::abs(base.imbalance) <= balanced) {
        accumulate(sol.measure, base, 1.0);
        sol.objective = base.cost;
        sol.dual_bound = base.rvi.lower;
        finish(base);
        return sol;
    }

    // Lagrangian relaxation of the ramp balance: the imbalance of the optimal
    // policy is nonincreasing in the multiplier, so bracket and bisect, then
    // mix the two bracketing measures to zero imbalance.
    const double direction = base.imbalance > 0.0 ? 1.0 : -1.0;
    Candidate pos_side = base;  // imbalance * direction > 0
    std::vector<double> warm_h = original_scale_bias(base.rvi, tau);
    double step = 1.0;
    Candidate neg_side;
    bool bracketed = false;
    for (int i = 0; i < 60; ++i, step *= 2.0) {
        Candidate c = solve_with_multiplier(model, state_costs, direction * step, options, &warm_h);
        sol.iterations += c.rvi.iterations;
        sol.converged = sol.converged && c.rvi.converged;
        warm_h = original_scale_bias(c.rvi, tau);
        if (c.imbalance * direction > balanced) {
            pos_side = std::move(c);
            continue;
        }
        neg_side = std::move(c);
        bracketed = true;
        break;
    }
    if (!bracketed) throw std::runtime_error("statistical fairness: multiplier bracket not found");

    while (std::abs(neg_side.imbalance) > balanced &&
           std::abs(neg_side.multiplier - pos_side.multiplier) >
               options.multiplier_tolerance * (1.0 + std::abs(neg_side.multiplier))) {
        const double mid = 0.5 * (neg_side.multiplier + pos_side.multiplier);
        Candidate c = solve_with_multiplier(model, state_costs, mid, options, &warm_h);
        sol.iterations += c.rvi.iterations;
        sol.converged = sol.converged && c.rvi.converged;
        warm_h = original_scale_bias(c.rvi, tau);
        if (c.imbalance * direction > balanced) {
            pos_side = std::move(c);
        } else {
            neg_side = std::move(c);
        }
    }

    if (std::abs(neg_side.imbalance) <= balanced) {
        accumulate(sol.measure, neg_side, 1.0);
        sol.objective = neg_side.cost;
        sol.dual_bound = neg_side.rvi.lower;
        sol.multiplier = neg_side.multiplier;
        finish(neg_side);
        return sol;
    }
    const double d_pos = pos_side.imbalance;
    const double d_neg = neg_side.imbalance;
    const double alpha = d_neg / (d_neg - d_pos);  // weight on pos_side
    accumulate(sol.measure, pos_side, alpha);
    accumulate(sol.measure, neg_side, 1.0 - alpha);
    sol.objective = alpha * pos_side.cost + (1.0 - alpha) * neg_side.cost;
    // Each Lagrangian gain bounds the constrained optimum from below.
    sol.dual_bound = std::max(pos_side.rvi.lower, neg_side.rvi.lower);
    sol.multiplier = alpha >= 0.5 ? pos_side.multiplier : neg_side.multiplier;
    finish(alpha >= 0.5 ? pos_side : neg_side);
    return sol;
}

Policy extract_policy(const LpSolution& solution, const TransitionModel& model) {
    const auto& m = solution.measure;
    Policy p;
    p.kind = PolicyKind::FullState;
    p.decision.assign(m.num_states, Decision::Hold);
    p.recurrent.assign(m.num_states, 0);
    for (std::size_t pos = 0; pos < m.num_states; ++pos) {
        int positive = 0;
        Decision chosen = Decision::Hold;
        for (int k = 0; k < m.num_decisions; ++k) {
            if (m.at(pos, static_cast<Decision>(k)) > 0.0) {
                if (positive == 0) chosen = static_cast<Decision>(k);
                ++positive;
            }
        }
        if (positive == 0) {
            p.decision[pos] = solution.greedy.empty() ? Decision::Hold : solution.greedy[pos];
            continue;
        }
        p.recurrent[pos] = 1;
        if (positive > 1) {
            p.randomized.push_back(pos);
            chosen = Decision::Hold;
        }
        p.decision[pos] = chosen;
    }
    for (std::size_t pos = 0; pos < m.num_states; ++pos) {
        if (!model.feasible(pos, p.decision[pos])) p.decision[pos] = Decision::Hold;
    }
    return p;
}

StationaryMetrics stationary_metrics(const OccupationMeasure& measure, const TransitionModel& model, CostParams cost) {
    std::vector<double> pi(measure.num_states);
    for (std::size_t pos = 0; pos < pi.size(); ++pos) pi[pos] = measure.state_mass(pos);
    return metrics_from_distribution(pi, model.space(), cost);
}

std::vector<ParetoPoint> pareto_sweep(const TransitionModel& model, const std::vector<double>& betas,
                                      const SolverOptions& options) {
    std::vector<ParetoPoint> out;
    out.reserve(betas.size());
    std::vector<double> warm;
    for (double beta : betas) {
        ParetoPoint point;
        point.beta = beta;
        try {
            const auto sol = solve_average_cost_lp(model, CostParams{beta}, options, warm.empty() ? nullptr : &warm);
            warm = sol.bias;
            point.policy = extract_policy(sol, model);
            point.metrics = stationary_metrics(sol.measure, model, CostParams{beta});
            point.gap = sol.gap();
            if (!sol.converged) point.error = "value iteration did not converge";
        } catch (const std::exception& e) {
            point.error = e.what();
        }
        out.push_back(std::move(point));
    }
    return out;
}

std::vector<ParetoPoint> refine_sweep(const TransitionModel& model, std::vector<ParetoPoint> points,
                                      const std::vector<double>& targets, const SolverOptions& options,
                                      double rel_tol, int max_solves_per_target) {
    const auto by_beta = [](const ParetoPoint& a, const ParetoPoint& b) { return a.beta < b.beta; };
    std::stable_sort(points.begin(), points.end(), by_beta);
    for (double target : targets) {
        std::vector<const ParetoPoint*> ok;
        for (const auto& p : points) {
            if (p.ok()) ok.push_back(&p);
        }
        if (ok.empty() || target < ok.front()->metrics.utilization || target > ok.back()->metrics.utilization)
            continue;
        // Last point at or below the target; utilization is nondecreasing in beta.
        std::size_t i = 0;
        while (i + 1 < ok.size() && ok[i + 1]->metrics.utilization <= target) ++i;
        if (ok[i]->metrics.utilization == target || i + 1 == ok.size()) continue;
        double lo = ok[i]->beta, hi = ok[i + 1]->beta;
        std::vector<ParetoPoint> added;
        for (int n = 0; n < max_solves_per_target && hi > lo * (1.0 + rel_tol); ++n) {
            const double mid = lo > 0.0 ? std::sqrt(lo * hi) : 0.5 * (lo + hi);
            auto p = pareto_sweep(model, {mid}, options).front();
            if (!p.ok()) {
                added.push_back(std::move(p));
                break;
            }
            const double u = p.metrics.utilization;
            added.push_back(std::move(p));
            if (u == target) break;
            (u < target ? lo : hi) = mid;
        }
        for (auto& p : added) points.push_back(std::move(p));
        std::stable_sort(points.begin(), points.end(), by_beta);
    }
    return points;
}

std::vector<ParetoPoint> pareto_front(const std::vector<ParetoPoint>& points, double tolerance) {
    std::vector<ParetoPoint> ok;
    for (const auto& p : points) {
        if (p.ok()) ok.push_back(p);
    }
    std::vector<ParetoPoint> front;
    for (std::size_t a = 0; a < ok.size(); ++a) {
        const auto& pa = ok[a].metrics;
        bool drop = false;
        for (std::size_t b = 0; b < ok.size() && !drop; ++b) {
            if (a == b) continue;
            const auto& pb = ok[b].metrics;
            const bool no_worse = pb.utilization >= pa.utilization - tolerance && pb.avg_taxiing <= pa.avg_taxiing + tolerance;
            const bool better = pb.utilization > pa.utilization + tolerance || pb.avg_taxiing < pa.avg_taxiing - tolerance;
            const bool duplicate = !better && no_worse && b < a;
            if ((no_worse && better) || duplicate) drop = true;
        }
        if (!drop) front.push_back(ok[a]);
    }
    std::stable_sort(front.begin(), front.end(), [](const ParetoPoint& x, const ParetoPoint& y) {
        return x.metrics.utilization < y.metrics.utilization;
    });
    return front;
}

bool alternation_holds(const TransitionModel& model, const Policy& policy) {
    const auto& config = model.config();
    if (config.num_ramps() < 2) return true;
    if (!config.has_turn_bit()) return false;
    const ClosedLoopChain chain(model, policy.decision);
    const auto& space = model.space();
    for (const auto& cls : recurrent_classes(chain)) {
        for (auto v : cls) {
            const SurfaceState s = space.state_at(v);
            const Decision k = policy(v);
            if (k != Decision::Hold && ramp_of(k) != (s.turn ? 1 : 0)) return false;
            for (const auto& e : chain.row(v)) {
                const bool flipped = space.state_at(e.target).turn != s.turn;
                if (flipped != (k != Decision::Hold)) return false;
            }
        }
    }
    return true;
}

} // namespace surfacemdp
