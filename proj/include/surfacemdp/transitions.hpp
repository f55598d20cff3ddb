#pragma once

#include "surfacemdp/airport.hpp"

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace surfacemdp {

/// P(0), P(1), P(2) take-offs in one step.
struct TakeoffDistribution {
    std::array<double, 3> p{1.0, 0.0, 0.0};
    double mean() const { return p[1] + 2.0 * p[2]; }
};

/// Number of take-offs min(queue, X1 + X2) with X1 ~ B(c1), X2 ~ B(c2) independent.
TakeoffDistribution takeoff_distribution(int queue, double c1, double c2);

/// One weighted outcome of a step; `target` is a dense state position.
struct Successor {
    std::uint32_t target = 0;
    double prob = 0.0;
};

/// Whether decision k may be taken in state s: Hold always, a clearance iff the
/// ramp's entry sample is free and, under alternation, the ramp holds the turn.
bool clearance_feasible(const SurfaceState& s, Decision k, const AirportConfig& config);

/// Exact successor distribution of one step from `s` under a feasible decision,
/// sorted by target position with duplicates merged and zero entries dropped.
std::vector<Successor> step_distribution(const SurfaceState& s, Decision k, const StateSpace& space);

/// Sparse kernel P(j | i, k) stored row-wise, one row per (position, decision).
///
/// Rows of infeasible pairs are empty. The model is immutable once built.
class TransitionModel {
public:
    TransitionModel(StateSpace space, std::vector<std::size_t> row_offsets,
                    std::vector<Successor> entries);

    const StateSpace& space() const { return space_; }
    const AirportConfig& config() const { return space_.config(); }
    std::size_t num_states() const { return space_.size(); }
    int num_decisions() const { return num_decisions_; }
    std::size_t nonzeros() const { return entries_.size(); }

    std::span<const Successor> successors(std::size_t pos, Decision k) const {
        const std::size_t row = pos * static_cast<std::size_t>(num_decisions_) + static_cast<std::size_t>(k);
        return {entries_.data() + offsets_[row], offsets_[row + 1] - offsets_[row]};
    }
    bool feasible(std::size_t pos, Decision k) const {
        return static_cast<int>(k) < num_decisions_ && !successors(pos, k).empty();
    }

    const std::vector<std::size_t>& row_offsets() const { return offsets_; }
    const std::vector<Successor>& entries() const { return entries_; }

private:
    StateSpace space_;
    int num_decisions_ = 1;
    std::vector<std::size_t> offsets_;
    std::vector<Successor> entries_;
};

/// Composes take-offs, the clearance and the move scan into the full kernel.
TransitionModel build_transitions(const AirportConfig& config);

struct KernelReport {
    std::vector<std::string> violations;
    std::size_t nonzeros = 0;
    std::size_t feasible_pairs = 0;
    double max_row_error = 0.0;
    bool ok() const { return violations.empty(); }
};

/// Checks row sums, positivity, feasibility mask, capacity and the per-step
/// aircraft-count change bounds. An empty violation list means the kernel passed.
KernelReport validate_kernel(const TransitionModel& model, double row_tolerance = 1e-12);

/// CSV with header `i,k,j,p`; i and j are state indices, rows in (i, k, j) order.
void write_kernel_csv(std::ostream& out, const TransitionModel& model);

} // namespace surfacemdp
