#include "surfacemdp/harness.hpp"

#include "surfacemdp/format.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace surfacemdp {

using nlohmann::json;
using nlohmann::ordered_json;
namespace fs = std::filesystem;

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

namespace {
std::string canonical(const ExperimentSpec& spec);
}

ExperimentSpec experiment_from_json(const std::string& text, const std::string& base_dir) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ParseError("experiment must be a JSON object");
    ExperimentSpec spec;
    try {
        if (!j.contains("airport")) throw ParseError("missing field 'airport'");
        const auto& a = j["airport"];
        if (a.is_string()) {
            const fs::path p = fs::path(base_dir) / a.get<std::string>();
            spec.airport = load_airport_config(p.string());
        } else {
            spec.airport = airport_config_from_json(a.dump());
        }
        if (j.contains("fairness")) {
            spec.airport.fairness = fairness_from_string(j["fairness"].get<std::string>());
            spec.airport.validate();
        }
        spec.betas = j.value("betas", std::vector<double>{});
        spec.thresholds = j.value("thresholds", std::vector<int>{});
        if (j.contains("sim")) {
            const auto& s = j["sim"];
            spec.sim.steps = s.value("steps", spec.sim.steps);
            spec.sim.warmup = s.value("warmup", spec.sim.warmup);
            spec.sim.seed = s.value("seed", spec.sim.seed);
            spec.sim.replications = s.value("replications", spec.sim.replications);
        }
        spec.simulate = j.value("simulate", true);
        spec.mls = j.value("mls", true);
        if (j.contains("emissions_factor")) spec.emissions_factor = j["emissions_factor"].get<double>();
        spec.output_dir = j.value("output_dir", std::string("out"));
    } catch (const json::exception& e) {
        throw ParseError(std::string("experiment field has the wrong type: ") + e.what());
    } catch (const ConfigError& e) {
        throw ParseError(e.what());
    }
    if (spec.betas.empty()) throw ParseError("beta list is empty");
    if (spec.thresholds.empty()) throw ParseError("threshold list is empty");
    for (double b : spec.betas) {
        if (!(b >= 0.0) || !std::isfinite(b)) throw ParseError("betas must be finite and nonnegative");
    }
    for (int t : spec.thresholds) {
        if (t < 1) throw ParseError("thresholds must be >= 1");
    }
    if (spec.emissions_factor && !(*spec.emissions_factor > 0.0)) throw ParseError("emissions factor must be positive");
    try {
        spec.sim.validate();
    } catch (const std::invalid_argument& e) {
        throw ParseError(e.what());
    }
    spec.canonical_json = canonical(spec);
    return spec;
}

namespace {

std::string canonical(const ExperimentSpec& spec) {
    json j;
    j["airport"] = json::parse(airport_config_to_json(spec.airport));
    j["betas"] = spec.betas;
    j["thresholds"] = spec.thresholds;
    j["sim"] = {{"steps", spec.sim.steps},
                {"warmup", spec.sim.warmup},
                {"seed", spec.sim.seed},
                {"replications", spec.sim.replications}};
    j["simulate"] = spec.simulate;
    j["mls"] = spec.mls;
    if (spec.emissions_factor) j["emissions_factor"] = *spec.emissions_factor;
    return j.dump();
}

std::string beta_label(double beta) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", beta);
    return buf;
}

} // namespace

ExperimentSpec load_experiment(const std::string& path) {
    const auto base = fs::path(path).parent_path();
    return experiment_from_json(read_file(path), base.empty() ? "." : base.string());
}

void write_consistency_csv(std::ostream& out, const std::vector<ConsistencyRow>& rows) {
    out << "policy,beta,utilization,analytic_cost,simulated_cost,simulated_se,relative_error,checked,ok\n";
    for (const auto& r : rows) {
        out << r.policy << ',' << fixed(r.beta) << ',' << fixed(r.utilization) << ',' << fixed(r.analytic_cost) << ','
            << fixed(r.simulated_cost) << ',' << fixed(r.simulated_se) << ',' << fixed(r.relative_error) << ','
            << (r.checked ? 1 : 0) << ',' << (r.ok() ? 1 : 0) << '\n';
    }
}

bool RunReport::ok() const {
    for (const auto& s : stages) {
        if (!s.ok) return false;
    }
    return true;
}

std::string write_output(const std::string& dir, const std::string& name, const std::string& content) {
    const fs::path p = fs::path(dir) / name;
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + p.string());
    out << content;
    if (!out) throw std::runtime_error("write failed for " + p.string());
    return hex64(fnv1a64(content));
}

RunReport run_experiment(const ExperimentSpec& input) {
    ExperimentSpec spec = input;
    if (spec.canonical_json.empty()) spec.canonical_json = canonical(spec);
    fs::create_directories(spec.output_dir);

    RunReport report;
    ordered_json files = ordered_json::array();
    auto emit = [&](const std::string& name, const std::string& content) {
        const auto digest = write_output(spec.output_dir, name, content);
        report.files.push_back(name);
        files.push_back({{"file", name}, {"fnv1a64", digest}});
    };
    auto stage = [&](const std::string& name, auto&& body) {
        StageStatus st{name, true, ""};
        try {
            body();
        } catch (const std::exception& e) {
            st.ok = false;
            st.message = e.what();
            emit(name + ".FAILED", st.message + "\n");
        }
        report.stages.push_back(st);
        return st.ok;
    };

    const TransitionModel model = build_transitions(spec.airport);
    auto& cmp = report.comparison;

    const bool have_thresholds = stage("threshold", [&] {
        cmp.thresholds = threshold_sweep(model, spec.thresholds);
        std::ostringstream os;
        write_threshold_csv(os, cmp.thresholds);
        emit("threshold_sweep.csv", os.str());
        for (const auto& t : cmp.thresholds) {
            if (!t.ok()) throw std::runtime_error("threshold " + std::to_string(t.threshold) + ": " + t.error);
        }
    });

    const bool have_optimal = stage("optimal", [&] {
        auto grid = pareto_sweep(model, spec.betas);
        cmp.grid_front = pareto_front(grid);
        std::vector<double> targets;
        for (const auto& t : cmp.thresholds) {
            if (t.ok()) targets.push_back(t.metrics.utilization);
        }
        cmp.sweep = refine_sweep(model, std::move(grid), targets);
        cmp.front = pareto_front(cmp.sweep);
        std::ostringstream all, front;
        write_pareto_csv(all, cmp.sweep);
        write_pareto_csv(front, cmp.front);
        emit("optimal_sweep.csv", all.str());
        emit("pareto_front.csv", front.str());
        for (const auto& p : cmp.grid_front) {
            std::ostringstream os;
            write_policy_csv(os, p.policy, model.space());
            emit("policy_beta_" + beta_label(p.beta) + ".csv", os.str());
        }
        for (const auto& p : cmp.sweep) {
            if (!p.ok()) throw std::runtime_error("beta " + beta_label(p.beta) + ": " + p.error);
        }
    });

    std::vector<CurvePoint> mls_curve;
    if (spec.simulate && spec.mls && have_optimal) {
        stage("mls", [&] {
            const auto obs = ObservationModel::deterministic(model.space());
            std::ostringstream os;
            os << "beta,utilization,avg_taxiing,avg_taxiing_se,expected_cost,expected_cost_se,recoveries,"
                  "max_normalization_error\n";
            for (const auto& p : cmp.grid_front) {
                MlsSimController controller(model, p.policy, obs);
                MlsPoint m{p.beta, rollout(model, controller, spec.sim, CostParams{p.beta})};
                os << fixed(p.beta) << ',' << fixed(m.sim.utilization) << ',' << fixed(m.sim.avg_taxiing) << ','
                   << fixed(m.sim.avg_taxiing_se) << ',' << fixed(m.sim.expected_cost) << ','
                   << fixed(m.sim.expected_cost_se) << ',' << controller.mls().recoveries() << ','
                   << fixed(controller.max_normalization_error(), 17) << '\n';
                mls_curve.push_back({m.sim.utilization, m.sim.avg_taxiing});
                cmp.mls.push_back(std::move(m));
            }
            std::sort(mls_curve.begin(), mls_curve.end(),
                      [](const CurvePoint& a, const CurvePoint& b) { return a.utilization < b.utilization; });
            emit("mls_sweep.csv", os.str());
        });
    }

    bool have_rows = false;
    if (have_thresholds || have_optimal) {
        have_rows = stage("compare", [&] {
            if (!have_thresholds || !have_optimal) throw std::runtime_error("comparison needs both sweeps");
            cmp.rows = compare_curves(cmp.thresholds, curve_of(cmp.front), mls_curve);
            std::ostringstream os;
            write_comparison_csv(os, cmp.rows);
            emit("comparison.csv", os.str());
        });
    }

    if (spec.simulate) {
        stage("consistency", [&] {
            auto check = [&](const std::string& name, const Policy& pi, CostParams cost) {
                const auto eval = evaluate_policy(model, pi, cost);
                PolicyController controller(pi);
                const auto sim = rollout(model, controller, spec.sim, cost);
                ConsistencyRow r;
                r.policy = name;
                r.beta = cost.beta;
                r.utilization = eval.metrics.utilization;
                r.analytic_cost = eval.metrics.expected_cost;
                r.simulated_cost = sim.expected_cost;
                r.simulated_se = sim.expected_cost_se;
                r.relative_error = std::abs(sim.expected_cost - eval.metrics.expected_cost) /
                                   std::max(1e-12, std::abs(eval.metrics.expected_cost));
                r.checked = eval.metrics.utilization <= 0.98;
                report.consistency.push_back(r);
            };
            for (const auto& t : cmp.thresholds) {
                if (t.ok()) check("threshold_" + std::to_string(t.threshold), threshold_policy(model, {t.threshold}), {});
            }
            for (const auto& p : cmp.grid_front) check("optimal_beta_" + beta_label(p.beta), p.policy, CostParams{p.beta});
            std::ostringstream os;
            write_consistency_csv(os, report.consistency);
            emit("consistency.csv", os.str());
            for (const auto& r : report.consistency) {
                if (!r.ok()) throw std::runtime_error("simulation disagrees with analysis for " + r.policy);
            }
        });
    }

    if (spec.emissions_factor && have_rows) {
        stage("emissions", [&] {
            std::ostringstream os;
            write_emissions_csv(os, emissions_from(cmp.rows, *spec.emissions_factor));
            emit("emissions.csv", os.str());
        });
    }

    ordered_json manifest;
    manifest["tool"] = kToolVersion;
    manifest["config_hash"] = hex64(fnv1a64(spec.canonical_json));
    manifest["seed"] = spec.sim.seed;
    manifest["rng"] = Rng::name();
    manifest["states"] = model.num_states();
    manifest["nonzeros"] = model.nonzeros();
    ordered_json stages = ordered_json::array();
    for (const auto& s : report.stages) stages.push_back({{"stage", s.name}, {"ok", s.ok}, {"message", s.message}});
    manifest["stages"] = stages;
    manifest["files"] = files;
    write_output(spec.output_dir, "manifest.json", manifest.dump(2) + "\n");
    report.files.push_back("manifest.json");
    return report;
}

} // namespace surfacemdp
