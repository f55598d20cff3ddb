#pragma once

#include "surfacemdp/compare.hpp"
#include "surfacemdp/io.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace surfacemdp {

inline constexpr const char* kToolVersion = "surfacemdp 0.1.0";

/// Everything one `run` needs. Paths inside the JSON are relative to the file.
struct ExperimentSpec {
    AirportConfig airport;
    std::vector<double> betas;
    std::vector<int> thresholds;
    SimConfig sim;
    bool simulate = true;              ///< simulation consistency checks and MLS rollouts
    bool mls = true;
    std::optional<double> emissions_factor;   ///< kg per aircraft-minute
    std::string output_dir = "out";
    std::string canonical_json;        ///< normalized spec used for the manifest hash
};

ExperimentSpec experiment_from_json(const std::string& text, const std::string& base_dir = ".");
ExperimentSpec load_experiment(const std::string& path);

/// 64-bit FNV-1a.
std::uint64_t fnv1a64(const std::string& bytes);
std::string hex64(std::uint64_t v);

/// Simulated against analytic expected cost for one stationary policy.
struct ConsistencyRow {
    std::string policy;
    double beta = 0.0;
    double utilization = 0.0;
    double analytic_cost = 0.0;
    double simulated_cost = 0.0;
    double simulated_se = 0.0;
    double relative_error = 0.0;
    bool checked = true;    ///< false above utilization 0.98, where divergence is only logged
    bool ok() const { return !checked || relative_error <= 0.02; }
};

void write_consistency_csv(std::ostream& out, const std::vector<ConsistencyRow>& rows);

struct StageStatus {
    std::string name;
    bool ok = true;
    std::string message;
};

struct RunReport {
    std::vector<StageStatus> stages;
    std::vector<std::string> files;     ///< relative to the output directory, in write order
    PolicyComparison comparison;
    std::vector<ConsistencyRow> consistency;
    bool ok() const;
};

/// Runs threshold sweep, optimal sweep, MLS rollouts, comparison, simulation
/// consistency and emissions, writing CSVs and manifest.json to output_dir.
/// A failing stage is recorded (and a `<stage>.FAILED` file written); later
/// stages that do not depend on it still run.
RunReport run_experiment(const ExperimentSpec& spec);

/// Writes `<dir>/<name>` and returns its FNV-1a digest.
std::string write_output(const std::string& dir, const std::string& name, const std::string& content);

} // namespace surfacemdp
