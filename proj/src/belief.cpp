#include "surfacemdp/belief.hpp"

#include <algorithm>
#include <bit>
#include <ostream>

namespace surfacemdp {

Observation observe(const SurfaceState& s, const AirportConfig& config) {
    Observation o;
    o.n_ac = s.aircraft();
    for (int r = 0; r < config.num_ramps(); ++r) {
        if (clearance_feasible(s, clear_ramp(r), config)) o.ramp_free |= 1U << r;
    }
    return o;
}

int observation_count_bits(const AirportConfig& config) {
    return std::max(1, static_cast<int>(std::bit_width(static_cast<unsigned>(config.max_aircraft()))));
}

std::uint32_t observation_index(const Observation& o, const AirportConfig& config) {
    const int rbits = config.num_ramps();
    const int cbits = observation_count_bits(config);
    if (o.n_ac < 0 || o.n_ac >= (1 << cbits)) throw std::out_of_range("aircraft count exceeds its field");
    if (o.ramp_free >> rbits) throw std::out_of_range("ramp flags exceed their field");
    return (static_cast<std::uint32_t>(o.n_ac) << rbits) | o.ramp_free;
}

Observation observation_from_index(std::uint32_t index, const AirportConfig& config) {
    const int rbits = config.num_ramps();
    if (index >> (rbits + observation_count_bits(config))) throw std::out_of_range("observation index too large");
    return Observation{static_cast<int>(index >> rbits), index & ((1U << rbits) - 1U)};
}

ObservationModel ObservationModel::deterministic(const StateSpace& space) {
    ObservationModel m;
    const auto& config = space.config();
    m.obs_.resize(space.size());
    for (std::size_t pos = 0; pos < space.size(); ++pos)
        m.obs_[pos] = observation_index(observe(space.state_at(pos), config), config);
    m.num_codes_ = 1U << (config.num_ramps() + observation_count_bits(config));
    return m;
}

ObservationModel ObservationModel::identity(const StateSpace& space) {
    ObservationModel m;
    m.obs_.resize(space.size());
    for (std::size_t pos = 0; pos < space.size(); ++pos) m.obs_[pos] = static_cast<std::uint32_t>(pos);
    m.num_codes_ = static_cast<std::uint32_t>(space.size());
    return m;
}

ObservationModel ObservationModel::from_codes(std::vector<std::uint32_t> codes) {
    ObservationModel m;
    m.obs_ = std::move(codes);
    for (auto o : m.obs_) m.num_codes_ = std::max(m.num_codes_, o + 1);
    return m;
}

std::vector<std::size_t> ObservationModel::consistent_states(std::uint32_t o) const {
    std::vector<std::size_t> out;
    for (std::size_t pos = 0; pos < obs_.size(); ++pos) {
        if (obs_[pos] == o) out.push_back(pos);
    }
    return out;
}

BeliefState BeliefState::indicator(std::size_t num_states, std::size_t pos) {
    if (pos >= num_states) throw std::out_of_range("belief position outside the state space");
    BeliefState out;
    out.b.assign(num_states, 0.0);
    out.b[pos] = 1.0;
    return out;
}

BeliefState BeliefState::uniform_consistent(const ObservationModel& obs, std::uint32_t o) {
    const auto states = obs.consistent_states(o);
    if (states.empty()) throw ZeroLikelihood("no state emits the observation");
    BeliefState out;
    out.b.assign(obs.num_states(), 0.0);
    const double w = 1.0 / static_cast<double>(states.size());
    for (auto pos : states) out.b[pos] = w;
    return out;
}

double BeliefState::total() const {
    double s = 0.0;
    for (double v : b) s += v;
    return s;
}

std::size_t BeliefState::argmax() const {
    return static_cast<std::size_t>(std::max_element(b.begin(), b.end()) - b.begin());
}

BeliefState belief_update(const BeliefState& b, Decision k, std::uint32_t o, const TransitionModel& model,
                          const ObservationModel& obs) {
    const std::size_t n = model.num_states();
    if (b.b.size() != n || obs.num_states() != n) throw std::invalid_argument("belief size mismatch");
    BeliefState out;
    out.b.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double w = b.b[i];
        if (w <= 0.0) continue;
        const Decision applied = model.feasible(i, k) ? k : Decision::Hold;
        for (const auto& e : model.successors(i, applied)) {
            if (obs.of(e.target) == o) out.b[e.target] += w * e.prob;
        }
    }
    double total = 0.0;
    for (double v : out.b) total += v;
    if (!(total > 0.0)) throw ZeroLikelihood("observation has zero likelihood under the belief");
    const double inv = 1.0 / total;
    for (double& v : out.b) v *= inv;
    return out;
}

Decision mls_decide(const BeliefState& b, const Policy& pi, const TransitionModel& model) {
    const std::size_t best = b.argmax();
    const Decision d = pi(best);
    if (d == Decision::Hold) return d;
    for (std::size_t i = 0; i < b.b.size(); ++i) {
        if (b.b[i] > 0.0 && model.feasible(i, d)) return d;
    }
    return Decision::Hold;
}

MlsController::MlsController(const TransitionModel& model, const Policy& pi, ObservationModel obs)
    : model_(model), pi_(pi), obs_(std::move(obs)) {
    if (pi_.size() != model_.num_states() || obs_.num_states() != model_.num_states())
        throw std::invalid_argument("policy or observation model does not match the state space");
    reset();
}

void MlsController::reset(std::size_t pos) {
    belief_ = BeliefState::indicator(model_.num_states(), pos);
    recoveries_ = 0;
}

void MlsController::update(Decision applied, std::uint32_t o) {
    try {
        belief_ = belief_update(belief_, applied, o, model_, obs_);
    } catch (const ZeroLikelihood&) {
        belief_ = BeliefState::uniform_consistent(obs_, o);
        ++recoveries_;
    }
}

void write_mls_log_csv(std::ostream& out, const std::vector<MlsLogRow>& rows) {
    out << "t,observation_index,mls_state,decision\n";
    for (const auto& r : rows)
        out << r.t << ',' << r.observation << ',' << r.mls_state << ',' << static_cast<int>(r.decision) << '\n';
}

} // namespace surfacemdp
