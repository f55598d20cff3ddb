#include "surfacemdp/airport.hpp"

#include <bit>
#include <cmath>

namespace surfacemdp {

namespace {

constexpr int kMaxCodeBits = 30;

} // namespace

std::string_view to_string(Fairness f) {
    switch (f) {
    case Fairness::Alternation: return "Alternation";
    case Fairness::Statistical: return "Statistical";
    case Fairness::None: return "None";
    }
    return "None";
}

Fairness fairness_from_string(std::string_view s) {
    if (s == "Alternation" || s == "alternation") return Fairness::Alternation;
    if (s == "Statistical" || s == "statistical") return Fairness::Statistical;
    if (s == "None" || s == "none") return Fairness::None;
    throw ConfigError("unknown fairness mode: " + std::string(s));
}

std::string_view to_string(Decision k) {
    switch (k) {
    case Decision::Hold: return "Hold";
    case Decision::ClearRamp1: return "ClearRamp1";
    case Decision::ClearRamp2: return "ClearRamp2";
    }
    return "Hold";
}

void AirportConfig::validate() const {
    if (taxiway_len < 1) throw ConfigError("taxiway_len must be >= 1");
    if (queue_capacity < 1) throw ConfigError("queue_capacity must be >= 1");
    if (ramps.empty() || ramps.size() > 2) throw ConfigError("one or two ramps are supported");
    if (!(move_prob > 0.0 && move_prob <= 1.0)) throw ConfigError("move_prob must lie in (0, 1]");
    for (double c : {clear_prob_1, clear_prob_2}) {
        if (!(c >= 0.0 && c <= 1.0)) throw ConfigError("take-off probabilities must lie in [0, 1]");
    }
    for (const auto& r : ramps) {
        if (r.entry_sample < 1 || r.entry_sample > taxiway_len)
            throw ConfigError("ramp '" + r.name + "' entry sample outside [1, taxiway_len]");
    }
    if (ramps.size() == 2 && !(ramps[0].entry_sample < ramps[1].entry_sample))
        throw ConfigError("the first ramp must be the farther one (entry_1 < entry_2)");
    const int bits = (has_turn_bit() ? 1 : 0) + taxiway_len + queue_bits();
    if (bits > kMaxCodeBits) throw ConfigError("state code exceeds 30 bits");
}

int AirportConfig::queue_bits() const {
    return std::bit_width(static_cast<unsigned>(queue_capacity));
}

bool AirportConfig::has_turn_bit() const {
    return ramps.size() == 2 && fairness == Fairness::Alternation;
}

void SurfaceState::set(int sample, bool on) {
    const std::uint32_t bit = 1U << (sample - 1);
    taxiway = on ? (taxiway | bit) : (taxiway & ~bit);
}

int SurfaceState::taxiing() const { return std::popcount(taxiway); }

SurfaceState make_state(std::string_view taxiway_bits, int queue, bool turn) {
    SurfaceState s;
    for (std::size_t i = 0; i < taxiway_bits.size(); ++i) {
        const char c = taxiway_bits[i];
        if (c != '0' && c != '1') throw std::invalid_argument("taxiway bits must be 0/1");
        s.set(static_cast<int>(i) + 1, c == '1');
    }
    s.queue = queue;
    s.turn = turn;
    return s;
}

std::string taxiway_string(const SurfaceState& s, int taxiway_len) {
    std::string out(static_cast<std::size_t>(taxiway_len), '0');
    for (int i = 1; i <= taxiway_len; ++i) {
        if (s.occupied(i)) out[static_cast<std::size_t>(i - 1)] = '1';
    }
    return out;
}

std::uint32_t reverse_bits(std::uint32_t bits, int width) {
    std::uint32_t out = 0;
    for (int i = 0; i < width; ++i) {
        out = (out << 1) | ((bits >> i) & 1U);
    }
    return out;
}

StateIndex encode(const SurfaceState& state, const AirportConfig& config) {
    const int n = config.taxiway_len;
    const int b = config.queue_bits();
    if (state.queue < 0 || state.queue > config.queue_capacity)
        throw InvalidState("queue " + std::to_string(state.queue) + " outside [0, capacity]");
    if (n < 32 && (state.taxiway >> n) != 0)
        throw InvalidState("taxiway bits exceed taxiway length");
    if (state.turn && !config.has_turn_bit())
        throw InvalidState("turn bit set on a configuration without ramp alternation");
    std::uint32_t code = state.turn ? 1U : 0U;
    code = (code << n) | reverse_bits(state.taxiway, n);
    code = (code << b) | static_cast<std::uint32_t>(state.queue);
    return StateIndex{code};
}

SurfaceState decode(StateIndex idx, const AirportConfig& config) {
    const int n = config.taxiway_len;
    const int b = config.queue_bits();
    const int total = n + b + (config.has_turn_bit() ? 1 : 0);
    if (total < 32 && (idx.value >> total) != 0)
        throw InvalidState("state index " + std::to_string(idx.value) + " out of range");
    SurfaceState s;
    s.queue = static_cast<int>(idx.value & ((1U << b) - 1U));
    if (s.queue > config.queue_capacity)
        throw InvalidState("state index " + std::to_string(idx.value) +
                           " decodes to a queue above capacity");
    s.taxiway = reverse_bits((idx.value >> b) & ((1U << n) - 1U), n);
    s.turn = config.has_turn_bit() && ((idx.value >> (n + b)) & 1U);
    return s;
}

std::vector<StateIndex> enumerate_states(const AirportConfig& config) {
    config.validate();
    const StateSpace space(config);
    std::vector<StateIndex> out;
    out.reserve(space.size());
    for (std::size_t p = 0; p < space.size(); ++p) out.push_back(space.index_at(p));
    return out;
}

StateSpace::StateSpace(AirportConfig config) : config_(std::move(config)) {
    config_.validate();
    taxiway_codes_ = std::size_t{1} << config_.taxiway_len;
    queue_levels_ = static_cast<std::size_t>(config_.queue_capacity) + 1;
    size_ = (config_.has_turn_bit() ? 2 : 1) * taxiway_codes_ * queue_levels_;
}

std::size_t StateSpace::position(const SurfaceState& s) const {
    if (s.queue < 0 || s.queue > config_.queue_capacity)
        throw InvalidState("queue outside [0, capacity]");
    const std::size_t code = reverse_bits(s.taxiway, config_.taxiway_len);
    const std::size_t turn = (config_.has_turn_bit() && s.turn) ? 1 : 0;
    return (turn * taxiway_codes_ + code) * queue_levels_ + static_cast<std::size_t>(s.queue);
}

SurfaceState StateSpace::state_at(std::size_t pos) const {
    if (pos >= size_) throw InvalidState("state position out of range");
    SurfaceState s;
    s.queue = static_cast<int>(pos % queue_levels_);
    pos /= queue_levels_;
    s.taxiway = reverse_bits(static_cast<std::uint32_t>(pos % taxiway_codes_), config_.taxiway_len);
    s.turn = (pos / taxiway_codes_) == 1;
    return s;
}

} // namespace surfacemdp
