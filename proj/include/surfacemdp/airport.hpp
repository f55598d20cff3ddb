#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace surfacemdp {

/// Raised for configurations that violate the model's structural invariants.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised when a state or state index does not belong to the valid state space.
class InvalidState : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

/// How clearances are shared between two ramps.
///
/// Alternation adds a turn bit to the state so that ramps are serviced strictly
/// in turn; Statistical adds a long-run balance constraint to the optimization;
/// None leaves clearances unconstrained.
enum class Fairness { Alternation, Statistical, None };

std::string_view to_string(Fairness f);
Fairness fairness_from_string(std::string_view s);

/// Control decision issued at the beginning of a time step.
enum class Decision : std::uint8_t { Hold = 0, ClearRamp1 = 1, ClearRamp2 = 2 };

inline int ramp_of(Decision k) { return static_cast<int>(k) - 1; }
inline Decision clear_ramp(int ramp) { return static_cast<Decision>(ramp + 1); }
std::string_view to_string(Decision k);

struct RampSpec {
    std::string name;
    /// Taxiway sample (1-based) occupied by an aircraft cleared from this ramp.
    int entry_sample = 1;
};

/// Topology and stochastic parameters of a single-runway departure model.
struct AirportConfig {
    int taxiway_len = 1;
    std::vector<RampSpec> ramps;
    int queue_capacity = 1;
    double move_prob = 1.0;
    double clear_prob_1 = 0.0;
    double clear_prob_2 = 0.0;
    double sample_len_m = 200.0;
    double step_seconds = 60.0;
    Fairness fairness = Fairness::Alternation;

    /// Throws ConfigError when any invariant is violated.
    void validate() const;

    /// Bits used to code the runway queue, ceil(log2(queue_capacity + 1)).
    int queue_bits() const;
    /// True when the state carries a ramp-turn bit (two ramps, Alternation).
    bool has_turn_bit() const;
    int num_ramps() const { return static_cast<int>(ramps.size()); }
    /// Size of the decision set: Hold plus one clearance per ramp.
    int num_decisions() const { return 1 + num_ramps(); }
    /// Largest possible number of aircraft on the surface.
    int max_aircraft() const { return taxiway_len + queue_capacity; }
    double service_rate() const { return clear_prob_1 + clear_prob_2; }
};

/// Bit-coded surface configuration.
///
/// Bit (s - 1) of `taxiway` is set iff sample s is occupied. The turn bit selects
/// the ramp to be serviced next (0: first ramp, 1: second ramp) and is always
/// false for configurations without a turn bit.
struct SurfaceState {
    std::uint32_t taxiway = 0;
    int queue = 0;
    bool turn = false;

    bool occupied(int sample) const { return (taxiway >> (sample - 1)) & 1U; }
    void set(int sample, bool on);
    int taxiing() const;
    /// Aircraft on the taxiway plus aircraft in the runway queue.
    int aircraft() const { return taxiing() + queue; }

    friend bool operator==(const SurfaceState&, const SurfaceState&) = default;
};

/// Builds a state from a taxiway bit string written sample 1 first, e.g. "001001101".
SurfaceState make_state(std::string_view taxiway_bits, int queue, bool turn = false);
/// Taxiway bits written sample 1 first.
std::string taxiway_string(const SurfaceState& s, int taxiway_len);

/// Integer identification number of a surface state.
struct StateIndex {
    std::uint32_t value = 0;
    friend auto operator<=>(const StateIndex&, const StateIndex&) = default;
};

/// Concatenates [turn][taxiway, sample 1 most significant][queue] into an index.
StateIndex encode(const SurfaceState& state, const AirportConfig& config);
SurfaceState decode(StateIndex idx, const AirportConfig& config);
/// Valid indices in ascending order (codes with queue > capacity excluded).
std::vector<StateIndex> enumerate_states(const AirportConfig& config);

/// Dense numbering of the valid states, monotone in the state index.
///
/// Solvers and kernels address states by position in [0, size()); positions and
/// state indices coincide when the queue capacity fills its bit field.
class StateSpace {
public:
    explicit StateSpace(AirportConfig config);

    const AirportConfig& config() const { return config_; }
    std::size_t size() const { return size_; }

    std::size_t position(const SurfaceState& s) const;
    SurfaceState state_at(std::size_t pos) const;
    std::size_t position(StateIndex idx) const { return position(decode(idx, config_)); }
    StateIndex index_at(std::size_t pos) const { return encode(state_at(pos), config_); }
    /// Position of the empty surface (turn bit cleared).
    std::size_t empty_position() const { return 0; }

private:
    AirportConfig config_;
    std::size_t taxiway_codes_ = 0;
    std::size_t queue_levels_ = 0;
    std::size_t size_ = 0;
};

/// Reverses the low `width` bits; converts between sample-1-first and LSB-first order.
std::uint32_t reverse_bits(std::uint32_t bits, int width);

} // namespace surfacemdp
