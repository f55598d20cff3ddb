#pragma once

#include "surfacemdp/airport.hpp"

namespace testcfg {

using namespace surfacemdp;

inline AirportConfig single(int n, int cap, double m, double c1, double c2 = 0.0) {
    AirportConfig c;
    c.taxiway_len = n;
    c.ramps = {{"ramp1", 1}};
    c.queue_capacity = cap;
    c.move_prob = m;
    c.clear_prob_1 = c1;
    c.clear_prob_2 = c2;
    c.fairness = Fairness::None;
    return c;
}

inline AirportConfig two_ramp(int n, int entry2, int cap, double m, double c1, double c2, Fairness f) {
    AirportConfig c = single(n, cap, m, c1, c2);
    c.ramps.push_back({"ramp2", entry2});
    c.fairness = f;
    return c;
}

/// 4-state airport used across the examples: N = 1, B_cap = 1.
inline AirportConfig toy(double c1 = 0.5, double m = 1.0) { return single(1, 1, m, c1); }

/// Calibrated LaGuardia model.
inline AirportConfig lga(Fairness f = Fairness::Alternation) {
    return two_ramp(9, 7, 7, 0.9084, 0.5140, 0.0929, f);
}

} // namespace testcfg
