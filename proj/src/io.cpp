#include "surfacemdp/io.hpp"

#include "surfacemdp/format.hpp"

#include <nlohmann/json.hpp>

#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace surfacemdp {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

template <typename T>
T field(const json& j, const char* name) {
    if (!j.contains(name)) throw ParseError(std::string("missing field '") + name + "'");
    try {
        return j.at(name).get<T>();
    } catch (const json::exception&) {
        throw ParseError(std::string("field '") + name + "' has the wrong type");
    }
}

template <typename T>
T field_or(const json& j, const char* name, T fallback) {
    return j.contains(name) ? field<T>(j, name) : fallback;
}

json parse(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
}

} // namespace

AirportConfig airport_config_from_json(const std::string& text) {
    const json j = parse(text);
    if (!j.is_object()) throw ParseError("airport config must be a JSON object");
    AirportConfig c;
    c.taxiway_len = field<int>(j, "taxiway_len");
    if (!j.contains("ramps") || !j["ramps"].is_array()) throw ParseError("missing array 'ramps'");
    for (const auto& r : j["ramps"]) {
        c.ramps.push_back(RampSpec{field<std::string>(r, "name"), field<int>(r, "entry_sample")});
    }
    c.queue_capacity = field<int>(j, "queue_capacity");
    c.move_prob = field<double>(j, "move_prob");
    c.clear_prob_1 = field<double>(j, "clear_prob_1");
    c.clear_prob_2 = field_or<double>(j, "clear_prob_2", 0.0);
    c.sample_len_m = field_or<double>(j, "sample_len_m", 200.0);
    c.step_seconds = field_or<double>(j, "step_seconds", 60.0);
    const auto fairness = field_or<std::string>(j, "fairness", "Alternation");
    try {
        c.fairness = fairness_from_string(fairness);
    } catch (const std::exception&) {
        throw ParseError("unknown fairness mode '" + fairness + "'");
    }
    c.validate();
    return c;
}

std::string airport_config_to_json(const AirportConfig& c) {
    ordered_json j;
    j["taxiway_len"] = c.taxiway_len;
    j["ramps"] = ordered_json::array();
    for (const auto& r : c.ramps) j["ramps"].push_back({{"name", r.name}, {"entry_sample", r.entry_sample}});
    j["queue_capacity"] = c.queue_capacity;
    j["move_prob"] = c.move_prob;
    j["clear_prob_1"] = c.clear_prob_1;
    j["clear_prob_2"] = c.clear_prob_2;
    j["sample_len_m"] = c.sample_len_m;
    j["step_seconds"] = c.step_seconds;
    j["fairness"] = std::string(to_string(c.fairness));
    return j.dump(2) + "\n";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

AirportConfig load_airport_config(const std::string& path) { return airport_config_from_json(read_file(path)); }

CalibrationInputs calibration_inputs_from_json(const std::string& text) {
    const json j = parse(text);
    if (!j.is_object()) throw ParseError("calibration inputs must be a JSON object");
    CalibrationInputs in;
    if (!j.contains("throughput")) throw ParseError("missing object 'throughput'");
    in.throughput.mean_rate = field<double>(j["throughput"], "mean_rate");
    in.throughput.std_rate = field<double>(j["throughput"], "std_rate");
    if (!j.contains("ramp1")) throw ParseError("missing object 'ramp1'");
    const auto& r1 = j["ramp1"];
    in.ramp1.unimpeded_mean = field<double>(r1, "unimpeded_mean");
    in.ramp1.unimpeded_std = field<double>(r1, "unimpeded_std");
    in.ramp1.pushback_mean = field_or<double>(r1, "pushback_mean", 0.0);
    in.ramp1.pushback_std = field_or<double>(r1, "pushback_std", 0.0);
    if (j.contains("ramp2_unimpeded_mean")) in.ramp2_unimpeded_mean = field<double>(j, "ramp2_unimpeded_mean");
    in.step_seconds = field_or<double>(j, "step_seconds", 60.0);
    in.sample_len_m = field_or<double>(j, "sample_len_m", 200.0);
    in.k_sigma = field_or<double>(j, "k_sigma", 3.0);
    return in;
}

std::string calibration_report_to_json(const CalibrationReport& r) {
    ordered_json j;
    j["Ls"] = r.Ls;
    j["Ts"] = r.Ts;
    j["N"] = ordered_json::object();
    j["N"]["ramp1"] = r.N_ramp1;
    if (r.N_ramp2) j["N"]["ramp2"] = *r.N_ramp2;
    j["m"] = r.m;
    j["c1"] = r.c1;
    j["c2"] = r.c2;
    j["B"] = r.B;
    ordered_json d;
    d["clearance_wait_mean"] = r.clearance.mean;
    d["clearance_wait_std"] = r.clearance.std;
    d["taxi_mean_ramp1"] = r.taxi_ramp1.mean;
    d["taxi_std_ramp1"] = r.taxi_ramp1.std;
    if (r.taxi_ramp2_mean) d["taxi_mean_ramp2"] = *r.taxi_ramp2_mean;
    d["steps_real"] = r.steps_real;
    d["combined_std"] = r.combined_std;
    d["supply_minutes"] = r.supply_minutes;
    d["buffer_real"] = r.buffer_real;
    j["intermediate"] = d;
    return j.dump(2) + "\n";
}

void write_policy_csv(std::ostream& out, const Policy& policy, const StateSpace& space) {
    out << "state_index,decision\n";
    for (std::size_t pos = 0; pos < policy.size(); ++pos)
        out << space.index_at(pos).value << ',' << static_cast<int>(policy(pos)) << '\n';
}

std::vector<Decision> read_policy_csv(std::istream& in, const StateSpace& space) {
    std::string line;
    if (!std::getline(in, line) || line != "state_index,decision") throw ParseError("expected header state_index,decision");
    std::vector<Decision> out(space.size(), Decision::Hold);
    std::vector<bool> seen(space.size(), false);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::istringstream ss(line);
        std::uint32_t idx = 0;
        int k = 0;
        char comma = 0;
        if (!(ss >> idx >> comma >> k) || comma != ',' || k < 0 || k >= space.config().num_decisions())
            throw ParseError("bad policy row: " + line);
        std::size_t pos = 0;
        try {
            pos = space.position(StateIndex{idx});
        } catch (const std::exception&) {
            throw ParseError("policy row names an invalid state: " + line);
        }
        out[pos] = static_cast<Decision>(k);
        seen[pos] = true;
    }
    for (bool s : seen) {
        if (!s) throw ParseError("policy does not cover every state");
    }
    return out;
}

void write_pareto_csv(std::ostream& out, const std::vector<ParetoPoint>& points) {
    out << "beta,utilization,avg_taxiing,expected_cost,takeoff_rate,gap,error\n";
    for (const auto& p : points) {
        out << fixed(p.beta) << ',' << fixed(p.metrics.utilization) << ',' << fixed(p.metrics.avg_taxiing) << ','
            << fixed(p.metrics.expected_cost) << ',' << fixed(p.metrics.takeoff_rate) << ',' << fixed(p.gap, 12)
            << ',' << (p.ok() ? "" : "\"" + p.error + "\"") << '\n';
    }
}

void write_threshold_csv(std::ostream& out, const std::vector<ThresholdPoint>& points) {
    out << "threshold,utilization,avg_taxiing,expected_cost,takeoff_rate,error\n";
    for (const auto& p : points) {
        out << p.threshold << ',' << fixed(p.metrics.utilization) << ',' << fixed(p.metrics.avg_taxiing) << ','
            << fixed(p.metrics.expected_cost) << ',' << fixed(p.metrics.takeoff_rate) << ','
            << (p.ok() ? "" : "\"" + p.error + "\"") << '\n';
    }
}

} // namespace surfacemdp
