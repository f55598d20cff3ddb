#include "surfacemdp/markov_chain.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace surfacemdp {

ClosedLoopChain::ClosedLoopChain(const TransitionModel& model, std::span<const Decision> decisions) {
    if (decisions.size() != model.num_states())
        throw std::invalid_argument("one decision per state is required");
    rows_.reserve(decisions.size());
    for (std::size_t pos = 0; pos < decisions.size(); ++pos) {
        auto row = model.successors(pos, decisions[pos]);
        if (row.empty()) throw std::invalid_argument("policy selects an infeasible decision");
        rows_.push_back(row);
    }
}

std::vector<std::vector<std::uint32_t>> recurrent_classes(const ClosedLoopChain& chain) {
    // Iterative Tarjan; a component is closed when no edge leaves it.
    const std::size_t n = chain.size();
    constexpr std::uint32_t unvisited = std::numeric_limits<std::uint32_t>::max();
    std::vector<std::uint32_t> index(n, unvisited), low(n, 0), comp(n, unvisited);
    std::vector<std::uint8_t> on_stack(n, 0);
    std::vector<std::uint32_t> stack;
    std::vector<std::pair<std::uint32_t, std::size_t>> frames;
    std::vector<std::vector<std::uint32_t>> components;
    std::uint32_t counter = 0;

    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != unvisited) continue;
        frames.emplace_back(static_cast<std::uint32_t>(root), 0);
        while (!frames.empty()) {
            auto& [v, edge] = frames.back();
            if (edge == 0) {
                index[v] = low[v] = counter++;
                stack.push_back(v);
                on_stack[v] = 1;
            }
            const auto row = chain.row(v);
            bool descended = false;
            while (edge < row.size()) {
                const std::uint32_t w = row[edge].target;
                ++edge;
                if (index[w] == unvisited) {
                    frames.emplace_back(w, 0);
                    descended = true;
                    break;
                }
                if (on_stack[w]) low[v] = std::min(low[v], index[w]);
            }
            if (descended) continue;
            if (low[v] == index[v]) {
                std::vector<std::uint32_t> component;
                std::uint32_t w = 0;
                do {
                    w = stack.back();
                    stack.pop_back();
                    on_stack[w] = 0;
                    comp[w] = static_cast<std::uint32_t>(components.size());
                    component.push_back(w);
                } while (w != v);
                components.push_back(std::move(component));
            }
            const std::uint32_t finished = v;
            frames.pop_back();
            if (!frames.empty()) {
                auto& parent = frames.back().first;
                low[parent] = std::min(low[parent], low[finished]);
            }
        }
    }

    std::vector<std::vector<std::uint32_t>> closed;
    for (std::size_t c = 0; c < components.size(); ++c) {
        bool leaves = false;
        for (auto v : components[c]) {
            for (const auto& e : chain.row(v)) {
                if (comp[e.target] != c) {
                    leaves = true;
                    break;
                }
            }
            if (leaves) break;
        }
        if (!leaves) {
            std::sort(components[c].begin(), components[c].end());
            closed.push_back(std::move(components[c]));
        }
    }
    std::sort(closed.begin(), closed.end(), [](const auto& a, const auto& b) { return a.front() < b.front(); });
    return closed;
}

std::vector<std::uint8_t> reachable_from(const ClosedLoopChain& chain, std::size_t start) {
    std::vector<std::uint8_t> seen(chain.size(), 0);
    std::vector<std::uint32_t> todo{static_cast<std::uint32_t>(start)};
    seen[start] = 1;
    while (!todo.empty()) {
        const auto v = todo.back();
        todo.pop_back();
        for (const auto& e : chain.row(v)) {
            if (!seen[e.target]) {
                seen[e.target] = 1;
                todo.push_back(e.target);
            }
        }
    }
    return seen;
}

namespace {

constexpr std::size_t kDenseLimit = 256;
constexpr double kSweepResidual = 1e-14;
constexpr int kMaxSweeps = 50000;

// (P^T - I) pi = 0 with the last balance row replaced by sum(pi) = 1.
template <typename Emit>
void assemble_balance(const ClosedLoopChain& chain, std::span<const std::uint32_t> cls,
                      const std::vector<std::int64_t>& local, Emit&& emit) {
    const auto last = static_cast<Eigen::Index>(cls.size() - 1);
    for (std::size_t a = 0; a < cls.size(); ++a) {
        const auto col = static_cast<Eigen::Index>(a);
        for (const auto& e : chain.row(cls[a])) {
            const auto row = static_cast<Eigen::Index>(local[e.target]);
            if (row < 0) throw std::invalid_argument("class is not closed");
            if (row != last) emit(row, col, e.prob);
        }
        if (col != last) emit(col, col, -1.0);
        emit(last, col, 1.0);
    }
}

std::vector<double> solve_dense(const ClosedLoopChain& chain, std::span<const std::uint32_t> cls,
                                const std::vector<std::int64_t>& local) {
    const auto m = static_cast<Eigen::Index>(cls.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(m, m);
    assemble_balance(chain, cls, local, [&](Eigen::Index r, Eigen::Index c, double v) { a(r, c) += v; });
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    rhs[m - 1] = 1.0;
    const Eigen::VectorXd x = a.fullPivLu().solve(rhs);
    return {x.data(), x.data() + x.size()};
}

std::vector<double> solve_sparse(const ClosedLoopChain& chain, std::span<const std::uint32_t> cls,
                                 const std::vector<std::int64_t>& local) {
    const auto m = static_cast<Eigen::Index>(cls.size());
    std::vector<Eigen::Triplet<double>> triplets;
    assemble_balance(chain, cls, local, [&](Eigen::Index r, Eigen::Index c, double v) { triplets.emplace_back(r, c, v); });
    Eigen::SparseMatrix<double> a(m, m);
    a.setFromTriplets(triplets.begin(), triplets.end());
    a.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success) throw std::runtime_error("stationary solve: factorization failed");
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(m);
    rhs[m - 1] = 1.0;
    const Eigen::VectorXd x = lu.solve(rhs);
    if (lu.info() != Eigen::Success) throw std::runtime_error("stationary solve failed");
    return {x.data(), x.data() + x.size()};
}

// Gauss-Seidel sweeps on pi = pi P; returns an empty vector when the
// residual target is not reached.
std::vector<double> solve_sweeps(const ClosedLoopChain& chain, std::span<const std::uint32_t> cls,
                                 const std::vector<std::int64_t>& local) {
    const std::size_t m = cls.size();
    std::vector<std::size_t> start(m + 1, 0);
    std::vector<double> self(m, 0.0);
    for (std::size_t a = 0; a < m; ++a) {
        for (const auto& e : chain.row(cls[a])) {
            const auto b = static_cast<std::size_t>(local[e.target]);
            if (b == a) {
                self[a] += e.prob;
            } else {
                ++start[b + 1];
            }
        }
    }
    for (std::size_t b = 0; b < m; ++b) start[b + 1] += start[b];
    std::vector<std::pair<std::uint32_t, double>> incoming(start[m]);
    std::vector<std::size_t> fill(start.begin(), start.end() - 1);
    for (std::size_t a = 0; a < m; ++a) {
        for (const auto& e : chain.row(cls[a])) {
            const auto b = static_cast<std::size_t>(local[e.target]);
            if (b != a) incoming[fill[b]++] = {static_cast<std::uint32_t>(a), e.prob};
        }
    }

    std::vector<double> pi(m, 1.0 / static_cast<double>(m));
    std::vector<double> next(m);
    for (int sweep = 1; sweep <= kMaxSweeps; ++sweep) {
        for (std::size_t b = 0; b < m; ++b) {
            double inflow = 0.0;
            for (std::size_t e = start[b]; e < start[b + 1]; ++e) inflow += pi[incoming[e].first] * incoming[e].second;
            pi[b] = inflow / (1.0 - self[b]);
        }
        double total = 0.0;
        for (double v : pi) total += v;
        for (double& v : pi) v /= total;
        if (sweep % 10 != 0) continue;
        double worst = 0.0;
        for (std::size_t b = 0; b < m; ++b) {
            double inflow = self[b] * pi[b];
            for (std::size_t e = start[b]; e < start[b + 1]; ++e) inflow += pi[incoming[e].first] * incoming[e].second;
            worst = std::max(worst, std::abs(inflow - pi[b]));
        }
        if (worst <= kSweepResidual) return pi;
    }
    return {};
}

} // namespace

std::vector<double> class_stationary(const ClosedLoopChain& chain, std::span<const std::uint32_t> cls) {
    std::vector<double> pi(chain.size(), 0.0);
    const std::size_t m = cls.size();
    if (m == 0) throw std::invalid_argument("empty class");
    if (m == 1) {
        pi[cls[0]] = 1.0;
        return pi;
    }
    std::vector<std::int64_t> local(chain.size(), -1);
    for (std::size_t a = 0; a < m; ++a) local[cls[a]] = static_cast<std::int64_t>(a);

    std::vector<double> x;
    if (m <= kDenseLimit) {
        x = solve_dense(chain, cls, local);
    } else {
        x = solve_sweeps(chain, cls, local);
        if (x.empty()) x = solve_sparse(chain, cls, local);
    }
    double total = 0.0;
    for (double v : x) total += std::max(0.0, v);
    for (std::size_t a = 0; a < m; ++a) pi[cls[a]] = std::max(0.0, x[a]) / total;
    return pi;
}

std::vector<double> stationary_from(const ClosedLoopChain& chain, std::size_t start) {
    const auto seen = reachable_from(chain, start);
    auto classes = recurrent_classes(chain);
    std::erase_if(classes, [&](const auto& c) { return !seen[c.front()]; });
    if (classes.size() == 1) return class_stationary(chain, classes.front());

    // Several closed classes reachable: weight each by its absorption probability.
    const std::size_t n = chain.size();
    std::vector<std::int64_t> class_of(n, -1);
    for (std::size_t c = 0; c < classes.size(); ++c) {
        for (auto v : classes[c]) class_of[v] = static_cast<std::int64_t>(c);
    }
    std::vector<std::int64_t> local(n, -1);
    std::vector<std::uint32_t> transient;
    for (std::size_t v = 0; v < n; ++v) {
        if (seen[v] && class_of[v] < 0) {
            local[v] = static_cast<std::int64_t>(transient.size());
            transient.push_back(static_cast<std::uint32_t>(v));
        }
    }
    std::vector<double> weights(classes.size(), 0.0);
    if (class_of[start] >= 0) {
        weights[static_cast<std::size_t>(class_of[start])] = 1.0;
    } else {
        const auto t = static_cast<Eigen::Index>(transient.size());
        std::vector<Eigen::Triplet<double>> triplets;
        Eigen::MatrixXd rhs = Eigen::MatrixXd::Zero(t, static_cast<Eigen::Index>(classes.size()));
        for (Eigen::Index a = 0; a < t; ++a) {
            triplets.emplace_back(a, a, 1.0);
            for (const auto& e : chain.row(transient[static_cast<std::size_t>(a)])) {
                if (local[e.target] >= 0) {
                    triplets.emplace_back(a, local[e.target], -e.prob);
                } else if (class_of[e.target] >= 0) {
                    rhs(a, class_of[e.target]) += e.prob;
                }
            }
        }
        Eigen::SparseMatrix<double> a(t, t);
        a.setFromTriplets(triplets.begin(), triplets.end());
        a.makeCompressed();
        Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
        lu.compute(a);
        if (lu.info() != Eigen::Success) throw std::runtime_error("absorption solve failed");
        Eigen::MatrixXd x = lu.solve(rhs);
        const auto row = local[start];
        for (std::size_t c = 0; c < classes.size(); ++c) weights[c] = std::max(0.0, x(row, static_cast<Eigen::Index>(c)));
    }
    std::vector<double> pi(n, 0.0);
    double total = 0.0;
    for (double w : weights) total += w;
    for (std::size_t c = 0; c < classes.size(); ++c) {
        if (weights[c] <= 0.0) continue;
        const auto part = class_stationary(chain, classes[c]);
        for (auto v : classes[c]) pi[v] += weights[c] / total * part[v];
    }
    return pi;
}

double stationary_residual(const ClosedLoopChain& chain, std::span<const double> pi) {
    std::vector<double> next(chain.size(), 0.0);
    for (std::size_t v = 0; v < chain.size(); ++v) {
        if (pi[v] == 0.0) continue;
        for (const auto& e : chain.row(v)) next[e.target] += pi[v] * e.prob;
    }
    double worst = 0.0;
    for (std::size_t v = 0; v < chain.size(); ++v) worst = std::max(worst, std::abs(next[v] - pi[v]));
    return worst;
}

} // namespace surfacemdp
