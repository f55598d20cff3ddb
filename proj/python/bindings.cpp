#include "surfacemdp/airport.hpp"
#include "surfacemdp/belief.hpp"
#include "surfacemdp/calibration.hpp"
#include "surfacemdp/compare.hpp"
#include "surfacemdp/harness.hpp"
#include "surfacemdp/io.hpp"
#include "surfacemdp/optimal_policy.hpp"
#include "surfacemdp/simulation.hpp"
#include "surfacemdp/threshold.hpp"
#include "surfacemdp/transitions.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <memory>

namespace py = pybind11;
using namespace surfacemdp;

namespace {

py::dict metrics_dict(const StationaryMetrics& m) {
    py::dict d;
    d["avg_taxiing"] = m.avg_taxiing;
    d["utilization"] = m.utilization;
    d["expected_cost"] = m.expected_cost;
    d["takeoff_rate"] = m.takeoff_rate;
    d["idle_probability"] = m.idle_probability;
    return d;
}

py::dict sim_dict(const SimResult& r) {
    py::dict d;
    d["rng"] = r.rng;
    d["samples"] = r.samples;
    d["takeoff_mean"] = r.takeoff_mean;
    d["takeoff_std"] = r.takeoff_std;
    d["avg_taxiing"] = r.avg_taxiing;
    d["utilization"] = r.utilization;
    d["expected_cost"] = r.expected_cost;
    d["idle_probability"] = r.idle_probability;
    d["takeoff_se"] = r.takeoff_se;
    d["avg_taxiing_se"] = r.avg_taxiing_se;
    d["expected_cost_se"] = r.expected_cost_se;
    d["coerced_holds"] = r.coerced_holds;
    d["conservation_violations"] = r.conservation_violations;
    py::list curve;
    for (const auto& p : congestion_curve(r)) {
        py::dict c;
        c["n_ac"] = p.n_ac;
        c["samples"] = p.samples;
        c["mean_rate"] = p.mean_rate;
        c["q1"] = p.q1;
        c["median"] = p.median;
        c["q3"] = p.q3;
        curve.append(c);
    }
    d["congestion"] = curve;
    return d;
}

SimConfig sim_config(std::uint64_t steps, std::uint64_t warmup, std::uint64_t seed, int replications) {
    SimConfig s;
    s.steps = steps;
    s.warmup = warmup;
    s.seed = seed;
    s.replications = replications;
    s.validate();
    return s;
}

} // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Departure surface MDP: transition kernel, optimal and threshold policies, simulation.";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<InvalidState>(m, "InvalidState", PyExc_IndexError);
    py::register_exception<CalibrationError>(m, "CalibrationError", PyExc_ValueError);
    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<ZeroLikelihood>(m, "ZeroLikelihood", PyExc_RuntimeError);

    py::enum_<Fairness>(m, "Fairness")
        .value("Alternation", Fairness::Alternation)
        .value("Statistical", Fairness::Statistical)
        .value("None_", Fairness::None);
    py::enum_<Decision>(m, "Decision")
        .value("Hold", Decision::Hold)
        .value("ClearRamp1", Decision::ClearRamp1)
        .value("ClearRamp2", Decision::ClearRamp2);

    py::class_<RampSpec>(m, "RampSpec")
        .def(py::init([](std::string name, int entry) { return RampSpec{std::move(name), entry}; }),
             py::arg("name"), py::arg("entry_sample"))
        .def_readwrite("name", &RampSpec::name)
        .def_readwrite("entry_sample", &RampSpec::entry_sample);

    py::class_<AirportConfig>(m, "AirportConfig")
        .def(py::init<>())
        .def_readwrite("taxiway_len", &AirportConfig::taxiway_len)
        .def_readwrite("ramps", &AirportConfig::ramps)
        .def_readwrite("queue_capacity", &AirportConfig::queue_capacity)
        .def_readwrite("move_prob", &AirportConfig::move_prob)
        .def_readwrite("clear_prob_1", &AirportConfig::clear_prob_1)
        .def_readwrite("clear_prob_2", &AirportConfig::clear_prob_2)
        .def_readwrite("fairness", &AirportConfig::fairness)
        .def("validate", &AirportConfig::validate)
        .def("max_aircraft", &AirportConfig::max_aircraft)
        .def("to_json", [](const AirportConfig& c) { return airport_config_to_json(c); })
        .def_static("from_json", &airport_config_from_json)
        .def_static("load", &load_airport_config);

    py::class_<SurfaceState>(m, "SurfaceState")
        .def(py::init([](const std::string& bits, int queue, bool turn) { return make_state(bits, queue, turn); }),
             py::arg("taxiway_bits"), py::arg("queue") = 0, py::arg("turn") = false)
        .def_readonly("queue", &SurfaceState::queue)
        .def_readonly("turn", &SurfaceState::turn)
        .def("occupied", &SurfaceState::occupied)
        .def("aircraft", &SurfaceState::aircraft)
        .def("taxiway_bits", [](const SurfaceState& s, int n) { return taxiway_string(s, n); })
        .def("__eq__", [](const SurfaceState& a, const SurfaceState& b) { return a == b; });

    m.def("encode", [](const SurfaceState& s, const AirportConfig& c) { return encode(s, c).value; });
    m.def("decode", [](std::uint32_t idx, const AirportConfig& c) { return decode(StateIndex{idx}, c); });
    m.def("enumerate_states", [](const AirportConfig& c) {
        std::vector<std::uint32_t> out;
        for (auto idx : enumerate_states(c)) out.push_back(idx.value);
        return out;
    });

    py::class_<TransitionModel, std::shared_ptr<TransitionModel>>(m, "TransitionModel")
        .def(py::init([](const AirportConfig& c) { return std::make_shared<TransitionModel>(build_transitions(c)); }))
        .def_property_readonly("num_states", &TransitionModel::num_states)
        .def_property_readonly("num_decisions", &TransitionModel::num_decisions)
        .def_property_readonly("nonzeros", &TransitionModel::nonzeros)
        .def("state_index", [](const TransitionModel& t, std::size_t pos) { return t.space().index_at(pos).value; })
        .def("position", [](const TransitionModel& t, std::uint32_t idx) { return t.space().position(StateIndex{idx}); })
        .def("successors",
             [](const TransitionModel& t, std::size_t pos, Decision k) {
                 if (pos >= t.num_states()) throw InvalidState("position out of range");
                 std::vector<std::pair<std::uint32_t, double>> out;
                 for (const auto& s : t.successors(pos, k)) out.emplace_back(s.target, s.prob);
                 return out;
             })
        .def("validate", [](const TransitionModel& t) { return validate_kernel(t).violations; });

    py::class_<Policy>(m, "Policy")
        .def_property_readonly("decisions", [](const Policy& p) { return p.decision; })
        .def_property_readonly("kind", [](const Policy& p) { return std::string(to_string(p.kind)); })
        .def("__len__", &Policy::size)
        .def("__getitem__", [](const Policy& p, std::size_t pos) {
            if (pos >= p.size()) throw py::index_error();
            return p(pos);
        });

    m.def(
        "solve",
        [](const TransitionModel& t, double beta) {
            const auto sol = solve_average_cost_lp(t, CostParams{beta});
            py::dict d;
            d["objective"] = sol.objective;
            d["dual_bound"] = sol.dual_bound;
            d["gap"] = sol.gap();
            d["converged"] = sol.converged;
            d["iterations"] = sol.iterations;
            d["multiplier"] = sol.multiplier;
            d["metrics"] = metrics_dict(stationary_metrics(sol.measure, t, sol.cost));
            d["policy"] = extract_policy(sol, t);
            return d;
        },
        py::arg("model"), py::arg("beta"));

    m.def("evaluate_policy",
          [](const TransitionModel& t, const Policy& p, double beta) {
              return metrics_dict(evaluate_policy(t, p, CostParams{beta}).metrics);
          },
          py::arg("model"), py::arg("policy"), py::arg("beta") = 0.0);

    m.def(
        "pareto_sweep",
        [](const TransitionModel& t, const std::vector<double>& betas) {
            py::list out;
            for (const auto& p : pareto_sweep(t, betas)) {
                py::dict d;
                d["beta"] = p.beta;
                d["ok"] = p.ok();
                d["error"] = p.error;
                d["gap"] = p.gap;
                d["metrics"] = metrics_dict(p.metrics);
                d["policy"] = p.policy;
                out.append(d);
            }
            return out;
        },
        py::arg("model"), py::arg("betas"));

    m.def("threshold_policy", [](const TransitionModel& t, int th) { return threshold_policy(t, ThresholdParams{th}); });
    m.def(
        "evaluate_threshold",
        [](const TransitionModel& t, int th, double beta) {
            const auto p = evaluate_threshold_chain(t, ThresholdParams{th}, CostParams{beta});
            if (!p.ok()) throw std::runtime_error(p.error);
            return metrics_dict(p.metrics);
        },
        py::arg("model"), py::arg("threshold"), py::arg("beta") = 0.0);

    m.def(
        "compare",
        [](const TransitionModel& t, const std::vector<double>& betas, const std::vector<int>& thresholds) {
            const auto cmp = compare_policies(t, betas, thresholds, std::nullopt);
            py::list rows;
            for (const auto& r : cmp.rows) {
                py::dict d;
                d["threshold"] = r.threshold;
                d["utilization"] = r.utilization;
                d["avg_taxiing_threshold"] = r.avg_taxiing_threshold;
                d["avg_taxiing_optimal"] = r.avg_taxiing_optimal;
                d["reduction_percent"] = r.reduction_percent;
                rows.append(d);
            }
            return rows;
        },
        py::arg("model"), py::arg("betas"), py::arg("thresholds"));

    m.def(
        "simulate",
        [](const TransitionModel& t, const std::string& controller, py::object arg, std::uint64_t steps,
           std::uint64_t warmup, std::uint64_t seed, int replications, double beta) {
            const auto sim = sim_config(steps, warmup, seed, replications);
            const CostParams cost{beta};
            if (controller == "threshold") {
                ThresholdController c({arg.cast<int>()}, t.config());
                return sim_dict(rollout(t, c, sim, cost));
            }
            if (controller == "policy") {
                const auto pi = arg.cast<Policy>();
                PolicyController c(pi);
                return sim_dict(rollout(t, c, sim, cost));
            }
            if (controller == "mls") {
                const auto pi = arg.cast<Policy>();
                MlsSimController c(t, pi, ObservationModel::deterministic(t.space()));
                return sim_dict(rollout(t, c, sim, cost));
            }
            if (controller == "always") {
                AlwaysClearController c(t.config());
                return sim_dict(rollout(t, c, sim, cost));
            }
            throw std::invalid_argument("unknown controller: " + controller);
        },
        py::arg("model"), py::arg("controller"), py::arg("arg") = py::none(), py::arg("steps") = 100'000,
        py::arg("warmup") = 1'000, py::arg("seed") = 1, py::arg("replications") = 1, py::arg("beta") = 0.0);

    m.def("solve_bernoulli_pair", [](double mean, double sd) {
        const auto p = solve_bernoulli_pair({mean, sd});
        return std::make_pair(p.c1, p.c2);
    });
    m.def("calibrate", [](const std::string& inputs_json) {
        return calibration_report_to_json(calibrate_airport(calibration_inputs_from_json(inputs_json)));
    });

    m.def("observation_index", [](const SurfaceState& s, const AirportConfig& c) {
        return observation_index(observe(s, c), c);
    });

    m.def(
        "run_experiment",
        [](const std::string& path, std::optional<std::string> output_dir) {
            auto spec = load_experiment(path);
            if (output_dir) spec.output_dir = *output_dir;
            const auto report = run_experiment(spec);
            py::dict d;
            d["ok"] = report.ok();
            d["files"] = report.files;
            py::list stages;
            for (const auto& s : report.stages) stages.append(py::make_tuple(s.name, s.ok, s.message));
            d["stages"] = stages;
            return d;
        },
        py::arg("path"), py::arg("output_dir") = py::none());

    m.attr("__version__") = "0.1.0";
}
