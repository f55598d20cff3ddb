// Command-line driver: calibrate, build, solve, threshold, mls, simulate,
// compare, emissions and run.
#include "surfacemdp/format.hpp"
#include "surfacemdp/harness.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace surfacemdp;

namespace {

constexpr int kOk = 0;
constexpr int kParseError = 2;
constexpr int kInfeasible = 3;

struct Globals {
    std::string config;
    std::string out = "out";
    std::optional<std::uint64_t> seed;
};

void emit(const Globals& g, const std::string& name, const std::string& content) {
    fs::create_directories(g.out);
    write_output(g.out, name, content);
    std::cout << (fs::path(g.out) / name).string() << '\n';
}

int cmd_calibrate(const Globals& g, const std::string& series_path, int cutoff) {
    auto inputs = calibration_inputs_from_json(read_file(g.config));
    if (!series_path.empty()) {
        std::ifstream in(series_path);
        if (!in) throw ParseError("cannot open " + series_path);
        MinuteSeries series;
        try {
            series = read_minute_series(in);
        } catch (const CalibrationError& e) {
            throw ParseError(e.what());
        }
        inputs.throughput = saturation_stats(series, cutoff);
    }
    const auto report = calibrate_airport(inputs);
    emit(g, "calibration.json", calibration_report_to_json(report));
    emit(g, "airport.json", airport_config_to_json(report.to_config()));
    return kOk;
}

int cmd_build(const Globals& g) {
    const auto model = build_transitions(load_airport_config(g.config));
    const auto rep = validate_kernel(model);
    std::ostringstream kernel;
    write_kernel_csv(kernel, model);
    emit(g, "kernel.csv", kernel.str());
    std::ostringstream summary;
    summary << "states,nonzeros,feasible_pairs,max_row_error,violations\n"
            << model.num_states() << ',' << rep.nonzeros << ',' << rep.feasible_pairs << ','
            << fixed(rep.max_row_error, 17) << ',' << rep.violations.size() << '\n';
    emit(g, "kernel_summary.csv", summary.str());
    for (const auto& v : rep.violations) std::cerr << v << '\n';
    return rep.ok() ? kOk : kInfeasible;
}

int cmd_solve(const Globals& g, const std::vector<double>& betas) {
    if (betas.empty()) throw ParseError("at least one --beta is required");
    const auto model = build_transitions(load_airport_config(g.config));
    const auto points = pareto_sweep(model, betas);
    std::ostringstream os;
    write_pareto_csv(os, points);
    emit(g, "optimal_sweep.csv", os.str());
    bool ok = true;
    for (const auto& p : points) {
        if (!p.ok()) {
            ok = false;
            continue;
        }
        std::ostringstream pol;
        write_policy_csv(pol, p.policy, model.space());
        char label[32];
        std::snprintf(label, sizeof label, "%.6g", p.beta);
        emit(g, std::string("policy_beta_") + label + ".csv", pol.str());
    }
    return ok ? kOk : kInfeasible;
}

int cmd_threshold(const Globals& g, const std::vector<int>& ths) {
    if (ths.empty()) throw ParseError("at least one --th is required");
    const auto model = build_transitions(load_airport_config(g.config));
    const auto points = threshold_sweep(model, ths);
    std::ostringstream os;
    write_threshold_csv(os, points);
    emit(g, "threshold_sweep.csv", os.str());
    for (const auto& p : points) {
        if (!p.ok()) return kInfeasible;
    }
    return kOk;
}

SimConfig sim_config(const Globals& g, std::uint64_t steps, std::uint64_t warmup, int reps) {
    SimConfig sim;
    sim.steps = steps;
    sim.warmup = warmup;
    sim.replications = reps;
    if (g.seed) sim.seed = *g.seed;
    try {
        sim.validate();
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
    return sim;
}

int cmd_mls(const Globals& g, double beta, const SimConfig& sim) {
    const auto model = build_transitions(load_airport_config(g.config));
    const auto sol = solve_average_cost_lp(model, CostParams{beta});
    const auto pi = extract_policy(sol, model);
    MlsSimController controller(model, pi, ObservationModel::deterministic(model.space()), true);
    const auto res = rollout(model, controller, sim, CostParams{beta});
    std::ostringstream log;
    auto rows = controller.log();
    for (auto& r : rows) r.mls_state = model.space().index_at(r.mls_state).value;
    write_mls_log_csv(log, rows);
    emit(g, "mls_log.csv", log.str());
    std::ostringstream summary;
    write_sim_summary_csv(summary, {{"mls", res}});
    emit(g, "mls_summary.csv", summary.str());
    return kOk;
}

int cmd_simulate(const Globals& g, const std::string& controller_name, double beta, const SimConfig& sim,
                 const std::string& data_path, int offset) {
    const auto model = build_transitions(load_airport_config(g.config));
    const auto& config = model.config();
    std::unique_ptr<Controller> controller;
    Policy pi;
    if (controller_name == "always") {
        controller = std::make_unique<AlwaysClearController>(config);
    } else if (controller_name == "never") {
        controller = std::make_unique<NeverClearController>();
    } else if (controller_name.rfind("threshold:", 0) == 0) {
        int th = 0;
        try {
            th = std::stoi(controller_name.substr(10));
        } catch (const std::exception&) {
            throw ParseError("bad threshold controller " + controller_name);
        }
        controller = std::make_unique<ThresholdController>(ThresholdParams{th}, config);
    } else if (controller_name == "optimal") {
        pi = extract_policy(solve_average_cost_lp(model, CostParams{beta}), model);
        controller = std::make_unique<PolicyController>(pi);
    } else {
        throw ParseError("unknown controller " + controller_name + " (always|never|threshold:N|optimal)");
    }
    const auto res = rollout(model, *controller, sim, CostParams{beta});
    std::ostringstream summary, curve;
    write_sim_summary_csv(summary, {{controller_name, res}});
    write_congestion_csv(curve, congestion_curve(res));
    emit(g, "sim_summary.csv", summary.str());
    emit(g, "congestion.csv", curve.str());
    if (!data_path.empty()) {
        std::ifstream in(data_path);
        if (!in) throw ParseError("cannot open " + data_path);
        MinuteSeries series;
        try {
            series = read_minute_series(in);
        } catch (const CalibrationError& e) {
            throw ParseError(e.what());
        }
        std::ostringstream observed;
        write_congestion_csv(observed, observed_congestion_curve(series, offset));
        emit(g, "observed_congestion.csv", observed.str());
    }
    return res.conservation_violations == 0 ? kOk : kInfeasible;
}

int cmd_compare(const Globals& g, bool with_mls) {
    auto spec = load_experiment(g.config);
    if (g.seed) spec.sim.seed = *g.seed;
    const auto model = build_transitions(spec.airport);
    std::optional<SimConfig> sim;
    if (with_mls) sim = spec.sim;
    const auto cmp = compare_policies(model, spec.betas, spec.thresholds, sim);
    std::ostringstream os;
    write_comparison_csv(os, cmp.rows);
    emit(g, "comparison.csv", os.str());
    return kOk;
}

int cmd_emissions(const Globals& g, const std::string& comparison, double factor) {
    if (!(factor > 0.0)) throw ParseError("--factor must be positive");
    std::ifstream in(comparison);
    if (!in) throw ParseError("cannot open " + comparison);
    std::vector<ComparisonRow> rows;
    try {
        rows = read_comparison_csv(in);
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
    std::ostringstream os;
    write_emissions_csv(os, emissions_from(rows, factor));
    emit(g, "emissions.csv", os.str());
    return kOk;
}

int cmd_run(Globals g, bool out_given) {
    auto spec = load_experiment(g.config);
    if (out_given) spec.output_dir = g.out;
    if (g.seed) spec.sim.seed = *g.seed;
    spec.canonical_json.clear();
    const auto report = run_experiment(spec);
    for (const auto& s : report.stages)
        std::cout << s.name << ": " << (s.ok ? "ok" : "FAILED " + s.message) << '\n';
    std::cout << (fs::path(spec.output_dir) / "manifest.json").string() << '\n';
    return report.ok() ? kOk : kInfeasible;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Airport departure control as a Markov decision process"};
    app.require_subcommand(1);
    Globals g;
    std::uint64_t seed = 0;
    auto add_globals = [&](CLI::App* sub, bool config_required = true) {
        auto* opt = sub->add_option("--config", g.config, "Input JSON")->check(CLI::ExistingFile);
        if (config_required) opt->required();
        sub->add_option("--out", g.out, "Output directory");
        sub->add_option("--seed", seed, "Simulation seed");
    };

    auto* calibrate = app.add_subcommand("calibrate", "Calibrate parameters from aggregate statistics");
    add_globals(calibrate);
    std::string series;
    int cutoff = 14;
    calibrate->add_option("--series", series, "Minute series CSV replacing the throughput aggregates");
    calibrate->add_option("--cutoff", cutoff, "Saturation cutoff on estimated taxiing aircraft");

    auto* build = app.add_subcommand("build", "Build and validate the transition kernel");
    add_globals(build);

    auto* solve = app.add_subcommand("solve", "Solve the average-cost LP for each beta");
    add_globals(solve);
    std::vector<double> betas;
    solve->add_option("--beta", betas, "Idle-runway cost weight (repeatable)");

    auto* threshold = app.add_subcommand("threshold", "Evaluate threshold policies");
    add_globals(threshold);
    std::vector<int> ths;
    threshold->add_option("--th", ths, "Threshold (repeatable)");

    std::uint64_t steps = 1'000'000, warmup = 10'000;
    int reps = 1;
    double beta = 10.0;
    auto add_sim = [&](CLI::App* sub) {
        sub->add_option("--steps", steps, "Steps per replication, warmup included");
        sub->add_option("--warmup", warmup, "Discarded initial steps");
        sub->add_option("--replications", reps, "Independent replications");
        sub->add_option("--beta", beta, "Cost weight for policies and reported cost");
    };

    auto* mls = app.add_subcommand("mls", "Roll out the most-likely-state controller");
    add_globals(mls);
    add_sim(mls);

    auto* simulate = app.add_subcommand("simulate", "Monte Carlo rollout of a controller");
    add_globals(simulate);
    add_sim(simulate);
    std::string controller = "always";
    simulate->add_option("--controller", controller, "always | never | threshold:N | optimal");
    std::string data_path;
    int offset = 0;
    simulate->add_option("--data", data_path, "Minute series CSV for an observed congestion curve");
    simulate->add_option("--offset", offset, "Aircraft subtracted from the observed taxiing estimate");

    auto* compare = app.add_subcommand("compare", "Compare optimal and threshold policies for an experiment");
    add_globals(compare);
    bool with_mls = false;
    compare->add_flag("--mls", with_mls, "Include simulated MLS column");

    auto* emissions = app.add_subcommand("emissions", "Emission deltas from a comparison table");
    add_globals(emissions, false);
    std::string comparison;
    double factor = 0.0;
    emissions->add_option("--comparison", comparison, "comparison.csv")->required();
    emissions->add_option("--factor", factor, "kg per aircraft-minute")->required();

    auto* run = app.add_subcommand("run", "Run a full experiment and write a manifest");
    add_globals(run);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kParseError;
    }
    for (auto* sub : app.get_subcommands()) {
        if (sub->count("--seed")) g.seed = seed;
    }

    try {
        if (*calibrate) return cmd_calibrate(g, series, cutoff);
        if (*build) return cmd_build(g);
        if (*solve) return cmd_solve(g, betas);
        if (*threshold) return cmd_threshold(g, ths);
        if (*mls) return cmd_mls(g, beta, sim_config(g, steps, warmup, reps));
        if (*simulate) return cmd_simulate(g, controller, beta, sim_config(g, steps, warmup, reps), data_path, offset);
        if (*compare) return cmd_compare(g, with_mls);
        if (*emissions) return cmd_emissions(g, comparison, factor);
        if (*run) return cmd_run(g, run->count("--out") > 0);
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kParseError;
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kParseError;
    } catch (const CalibrationError& e) {
        std::cerr << "calibration failed: " << e.what() << '\n';
        return kInfeasible;
    } catch (const std::exception& e) {
        std::cerr << "failed: " << e.what() << '\n';
        return kInfeasible;
    }
    return kParseError;
}
