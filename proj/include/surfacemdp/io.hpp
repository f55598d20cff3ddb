#pragma once

#include "surfacemdp/calibration.hpp"
#include "surfacemdp/optimal_policy.hpp"
#include "surfacemdp/threshold.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace surfacemdp {

/// Malformed JSON, missing fields or wrong types in an input document.
class ParseError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

AirportConfig airport_config_from_json(const std::string& text);
std::string airport_config_to_json(const AirportConfig& config);
AirportConfig load_airport_config(const std::string& path);

/// Aggregates file: {"throughput": {...}, "ramp1": {...}, "ramp2_unimpeded_mean": x, ...}.
CalibrationInputs calibration_inputs_from_json(const std::string& text);
std::string calibration_report_to_json(const CalibrationReport& report);

/// `state_index,decision`, ascending state index.
void write_policy_csv(std::ostream& out, const Policy& policy, const StateSpace& space);
std::vector<Decision> read_policy_csv(std::istream& in, const StateSpace& space);

void write_pareto_csv(std::ostream& out, const std::vector<ParetoPoint>& points);
void write_threshold_csv(std::ostream& out, const std::vector<ThresholdPoint>& points);

std::string read_file(const std::string& path);

} // namespace surfacemdp
