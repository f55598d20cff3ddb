#include "surfacemdp/transitions.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace surfacemdp {

TakeoffDistribution takeoff_distribution(int queue, double c1, double c2) {
    if (!(c1 >= 0.0 && c1 <= 1.0) || !(c2 >= 0.0 && c2 <= 1.0))
        throw std::invalid_argument("take-off probabilities must lie in [0, 1]");
    if (queue < 0) throw std::invalid_argument("queue must be nonnegative");
    const double none = (1.0 - c1) * (1.0 - c2);
    const double both = c1 * c2;
    const double one = c1 * (1.0 - c2) + c2 * (1.0 - c1);
    TakeoffDistribution d;
    if (queue == 0) {
        d.p = {1.0, 0.0, 0.0};
    } else if (queue == 1) {
        d.p = {none, one + both, 0.0};
    } else {
        d.p = {none, one, both};
    }
    return d;
}

bool clearance_feasible(const SurfaceState& s, Decision k, const AirportConfig& config) {
    if (k == Decision::Hold) return true;
    const int ramp = ramp_of(k);
    if (ramp < 0 || ramp >= config.num_ramps()) return false;
    if (config.has_turn_bit() && ramp != (s.turn ? 1 : 0)) return false;
    return !s.occupied(config.ramps[static_cast<std::size_t>(ramp)].entry_sample);
}

namespace {

struct Branch {
    SurfaceState state;
    double prob;
};

// Move scan from the runway end backwards: each aircraft advances with
// probability m when the next sample (or the queue) has room after the moves
// already resolved in this step.
void scan_moves(std::vector<Branch>& branches, const AirportConfig& config) {
    const int n = config.taxiway_len;
    const double m = config.move_prob;
    std::vector<Branch> next;
    for (int s = n; s >= 1; --s) {
        next.clear();
        next.reserve(branches.size() * 2);
        for (const auto& b : branches) {
            const bool can_move = b.state.occupied(s) &&
                                  (s == n ? b.state.queue < config.queue_capacity : !b.state.occupied(s + 1));
            if (!can_move) {
                next.push_back(b);
                continue;
            }
            Branch moved = b;
            moved.state.set(s, false);
            if (s == n) {
                ++moved.state.queue;
            } else {
                moved.state.set(s + 1, true);
            }
            moved.prob *= m;
            next.push_back(moved);
            if (m < 1.0) next.push_back(Branch{b.state, b.prob * (1.0 - m)});
        }
        branches.swap(next);
    }
}

} // namespace

std::vector<Successor> step_distribution(const SurfaceState& s, Decision k, const StateSpace& space) {
    const AirportConfig& config = space.config();
    if (!clearance_feasible(s, k, config)) throw std::invalid_argument("infeasible decision");
    const auto takeoffs = takeoff_distribution(s.queue, config.clear_prob_1, config.clear_prob_2);

    std::vector<Branch> branches;
    for (int t = 0; t <= 2; ++t) {
        if (takeoffs.p[static_cast<std::size_t>(t)] <= 0.0) continue;
        SurfaceState after = s;
        after.queue -= t;
        if (k != Decision::Hold) {
            after.set(config.ramps[static_cast<std::size_t>(ramp_of(k))].entry_sample, true);
            if (config.has_turn_bit()) after.turn = !after.turn;
        }
        branches.push_back(Branch{after, takeoffs.p[static_cast<std::size_t>(t)]});
    }
    scan_moves(branches, config);

    std::vector<Successor> out;
    out.reserve(branches.size());
    for (const auto& b : branches) {
        if (b.prob > 0.0) out.push_back(Successor{static_cast<std::uint32_t>(space.position(b.state)), b.prob});
    }
    std::sort(out.begin(), out.end(), [](const Successor& a, const Successor& b) { return a.target < b.target; });
    std::vector<Successor> merged;
    merged.reserve(out.size());
    for (const auto& e : out) {
        if (!merged.empty() && merged.back().target == e.target) {
            merged.back().prob += e.prob;
        } else {
            merged.push_back(e);
        }
    }
    return merged;
}

TransitionModel::TransitionModel(StateSpace space, std::vector<std::size_t> row_offsets,
                                 std::vector<Successor> entries)
    : space_(std::move(space)), num_decisions_(space_.config().num_decisions()),
      offsets_(std::move(row_offsets)), entries_(std::move(entries)) {
    const std::size_t rows = space_.size() * static_cast<std::size_t>(num_decisions_);
    if (offsets_.size() != rows + 1 || offsets_.back() != entries_.size())
        throw std::invalid_argument("row offsets do not match the state space");
}

TransitionModel build_transitions(const AirportConfig& config) {
    StateSpace space(config);
    const int nk = config.num_decisions();
    std::vector<std::size_t> offsets;
    offsets.reserve(space.size() * static_cast<std::size_t>(nk) + 1);
    offsets.push_back(0);
    std::vector<Successor> entries;
    entries.reserve(space.size() * static_cast<std::size_t>(nk) * 16);
    for (std::size_t pos = 0; pos < space.size(); ++pos) {
        const SurfaceState s = space.state_at(pos);
        for (int k = 0; k < nk; ++k) {
            const auto decision = static_cast<Decision>(k);
            if (clearance_feasible(s, decision, config)) {
                const auto row = step_distribution(s, decision, space);
                entries.insert(entries.end(), row.begin(), row.end());
            }
            offsets.push_back(entries.size());
        }
    }
    entries.shrink_to_fit();
    return TransitionModel(std::move(space), std::move(offsets), std::move(entries));
}

KernelReport validate_kernel(const TransitionModel& model, double row_tolerance) {
    KernelReport report;
    report.nonzeros = model.nonzeros();
    const auto& space = model.space();
    const auto& config = model.config();
    auto violation = [&](std::size_t pos, int k, const std::string& what) {
        std::ostringstream os;
        os << "state " << space.index_at(pos).value << " decision " << k << ": " << what;
        report.violations.push_back(os.str());
    };
    for (std::size_t pos = 0; pos < model.num_states(); ++pos) {
        const SurfaceState s = space.state_at(pos);
        for (int k = 0; k < model.num_decisions(); ++k) {
            const auto decision = static_cast<Decision>(k);
            const auto row = model.successors(pos, decision);
            const bool allowed = clearance_feasible(s, decision, config);
            if (row.empty()) {
                if (allowed) violation(pos, k, "feasible decision has no successors");
                continue;
            }
            if (!allowed) violation(pos, k, "infeasible decision has successors");
            ++report.feasible_pairs;
            double sum = 0.0;
            for (const auto& e : row) {
                sum += e.prob;
                if (!(e.prob > 0.0)) violation(pos, k, "nonpositive probability");
                if (e.target >= model.num_states()) {
                    violation(pos, k, "successor outside the state space");
                    continue;
                }
                const SurfaceState t = space.state_at(e.target);
                if (t.queue > config.queue_capacity) violation(pos, k, "queue above capacity");
                const int delta = t.aircraft() - s.aircraft();
                const int cleared = decision == Decision::Hold ? 0 : 1;
                if (delta < -2 || delta > 1 || delta > cleared || delta < cleared - std::min(s.queue, 2))
                    violation(pos, k, "aircraft count change out of bounds");
                if (config.has_turn_bit() && (t.turn != s.turn) != (cleared == 1))
                    violation(pos, k, "turn bit does not follow clearances");
            }
            const double err = std::abs(sum - 1.0);
            report.max_row_error = std::max(report.max_row_error, err);
            if (err > row_tolerance) violation(pos, k, "row does not sum to one");
        }
    }
    return report;
}

void write_kernel_csv(std::ostream& out, const TransitionModel& model) {
    const auto& space = model.space();
    out << "i,k,j,p\n";
    std::ostringstream line;
    line.precision(17);
    for (std::size_t pos = 0; pos < model.num_states(); ++pos) {
        const auto i = space.index_at(pos).value;
        for (int k = 0; k < model.num_decisions(); ++k) {
            for (const auto& e : model.successors(pos, static_cast<Decision>(k))) {
                line.str({});
                line << i << ',' << k << ',' << space.index_at(e.target).value << ',' << e.prob << '\n';
                out << line.str();
            }
        }
    }
}

} // namespace surfacemdp
