#pragma once

#include "surfacemdp/transitions.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace surfacemdp {

/// Markov chain obtained by fixing one decision per state of a kernel.
class ClosedLoopChain {
public:
    /// `decisions` holds one entry per state position; each must be feasible.
    ClosedLoopChain(const TransitionModel& model, std::span<const Decision> decisions);

    std::size_t size() const { return rows_.size(); }
    std::span<const Successor> row(std::size_t pos) const { return rows_[pos]; }

private:
    std::vector<std::span<const Successor>> rows_;
};

/// Closed communicating classes (bottom strongly connected components), each
/// sorted ascending, ordered by their smallest position.
std::vector<std::vector<std::uint32_t>> recurrent_classes(const ClosedLoopChain& chain);

/// Positions reachable from `start` (including it).
std::vector<std::uint8_t> reachable_from(const ClosedLoopChain& chain, std::size_t start);

/// Stationary distribution supported on one closed class, returned as a
/// full-length vector. Small classes use a dense LU, larger ones Gauss-Seidel
/// with a sparse LU fallback.
std::vector<double> class_stationary(const ClosedLoopChain& chain, std::span<const std::uint32_t> cls);

/// Long-run state distribution of the chain started at `start`: the
/// absorption-weighted mixture of the closed classes reachable from it.
std::vector<double> stationary_from(const ClosedLoopChain& chain, std::size_t start);

/// max_j |(pi P)_j - pi_j|
double stationary_residual(const ClosedLoopChain& chain, std::span<const double> pi);

} // namespace surfacemdp
