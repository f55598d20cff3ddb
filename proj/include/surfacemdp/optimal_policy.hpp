#pragma once

#include "surfacemdp/policy.hpp"

#include <optional>
#include <string>
#include <vector>

namespace surfacemdp {

/// Stationary state-decision probabilities y_ik, stored row-major by position.
struct OccupationMeasure {
    std::size_t num_states = 0;
    int num_decisions = 1;
    std::vector<double> y;

    double at(std::size_t pos, Decision k) const {
        return y[pos * static_cast<std::size_t>(num_decisions) + static_cast<std::size_t>(k)];
    }
    double& at(std::size_t pos, Decision k) {
        return y[pos * static_cast<std::size_t>(num_decisions) + static_cast<std::size_t>(k)];
    }
    double state_mass(std::size_t pos) const;
    /// Total mass on clearances of ramp r (0-based).
    double clearance_mass(int ramp) const;
};

/// Primal feasibility of a measure against the kernel.
struct LpResiduals {
    double mass = 0.0;      ///< |sum y - 1|
    double balance = 0.0;   ///< max_j |sum_k y_jk - sum_ik y_ik p(j|ik)|
    double min_entry = 0.0; ///< min y_ik
    double fairness = 0.0;  ///< |y(ramp 1) - y(ramp 2)|, two-ramp models only
};
LpResiduals lp_residuals(const OccupationMeasure& measure, const TransitionModel& model);

struct SolverOptions {
    /// Stop when the span of the Bellman increment falls below tolerance * max(1, |gain|).
    double tolerance = 1e-11;
    long max_iterations = 5'000'000;
    /// Self-loop weight of the aperiodicity transform; leaves gains and policies unchanged.
    double aperiodicity = 0.2;
    /// Relative margin below which a later decision does not displace an earlier one.
    double tie_tolerance = 1e-12;
    /// Bisection stopping width for the statistical-fairness multiplier.
    double multiplier_tolerance = 1e-9;
};

/// Solution of  min sum C_ik y_ik  s.t. balance, sum y = 1, y >= 0 (plus the ramp
/// balance equality under statistical fairness).
///
/// Solved by relative value iteration; `dual_bound` is a certified lower bound
/// (a feasible point of the dual LP), `objective` the cost of the returned
/// primal-feasible measure, so gap() bounds the distance to the LP optimum.
struct LpSolution {
    CostParams cost;
    Fairness fairness = Fairness::None;
    OccupationMeasure measure;
    double objective = 0.0;
    double dual_bound = 0.0;
    /// Dual values of the balance constraints (relative values), one per position.
    std::vector<double> bias;
    /// One-step lookahead decision against `bias`, ties to Hold then lowest ramp.
    std::vector<Decision> greedy;
    double multiplier = 0.0;
    long iterations = 0;
    bool converged = false;

    double gap() const { return objective - dual_bound; }
};

/// Fairness comes from the model's configuration: Alternation is carried by
/// the turn bit in the kernel, Statistical adds the ramp balance equality.
LpSolution solve_average_cost_lp(const TransitionModel& model, CostParams cost, const SolverOptions& options = {},
                                 const std::vector<double>* warm_bias = nullptr);

/// Deterministic policy from a solved measure: the decision carrying mass on
/// recurrent states (Hold on randomized rows), the greedy decision elsewhere.
Policy extract_policy(const LpSolution& solution, const TransitionModel& model);

StationaryMetrics stationary_metrics(const OccupationMeasure& measure, const TransitionModel& model, CostParams cost);

struct ParetoPoint {
    double beta = 0.0;
    StationaryMetrics metrics;
    Policy policy;
    double gap = 0.0;
    std::string error;
    bool ok() const { return error.empty(); }
};

/// One solve per beta (warm-started along the list). Failed points carry an
/// error message and the sweep continues.
std::vector<ParetoPoint> pareto_sweep(const TransitionModel& model, const std::vector<double>& betas,
                                      const SolverOptions& options = {});

/// Bisects beta between neighbouring sweep points until every target
/// utilization inside the swept range lies between two points whose betas
/// differ by at most a factor (1 + rel_tol). Near such a breakpoint both
/// neighbours are optimal vertices, so interpolating between them is exact.
/// Returns all points, old and new, ordered by beta.
std::vector<ParetoPoint> refine_sweep(const TransitionModel& model, std::vector<ParetoPoint> points,
                                      const std::vector<double>& targets, const SolverOptions& options = {},
                                      double rel_tol = 1e-6, int max_solves_per_target = 48);

/// Successful points that no other point dominates in (utilization up,
/// avg_taxiing down), duplicates collapsed, ordered by utilization.
std::vector<ParetoPoint> pareto_front(const std::vector<ParetoPoint>& points, double tolerance = 1e-9);

/// Verifies that, on the closed loop of `policy`, every clearance from a
/// recurrent state is issued by the ramp holding the turn and flips it.
bool alternation_holds(const TransitionModel& model, const Policy& policy);

} // namespace surfacemdp
