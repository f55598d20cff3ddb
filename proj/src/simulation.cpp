#include "surfacemdp/simulation.hpp"

#include "surfacemdp/format.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <stdexcept>

namespace surfacemdp {

void SimConfig::validate() const {
    if (steps <= warmup) throw std::invalid_argument("steps must exceed warmup");
    if (replications < 1) throw std::invalid_argument("replications must be >= 1");
}

std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t replication_seed(std::uint64_t seed, int replication) {
    std::uint64_t state = seed;
    std::uint64_t out = 0;
    for (int r = 0; r <= replication; ++r) out = splitmix64(state);
    return out;
}

Decision AlwaysClearController::decide(const SurfaceState& s, std::size_t) {
    for (int r = 0; r < config_.num_ramps(); ++r) {
        if (clearance_feasible(s, clear_ramp(r), config_)) return clear_ramp(r);
    }
    return Decision::Hold;
}

void MlsSimController::reset(const SurfaceState& s, std::size_t pos) {
    (void)s;
    mls_.reset(pos);
    last_obs_ = mls_.observations().of(pos);
    t_ = 0;
    log_.clear();
}

Decision MlsSimController::decide(const SurfaceState&, std::size_t) {
    const Decision d = mls_.decide();
    if (keep_log_) {
        log_.push_back(MlsLogRow{t_, last_obs_, static_cast<std::uint32_t>(mls_.most_likely()), d});
    }
    ++t_;
    return d;
}

void MlsSimController::observe(Decision applied, const SurfaceState&, std::size_t pos) {
    last_obs_ = mls_.observations().of(pos);
    mls_.update(applied, last_obs_);
    ++updates_;
    max_norm_error_ = std::max(max_norm_error_, std::abs(mls_.belief().total() - 1.0));
}

double CongestionBin::mean() const {
    return samples == 0 ? 0.0
                        : static_cast<double>(takeoff_hist[1] + 2 * takeoff_hist[2]) / static_cast<double>(samples);
}

int CongestionBin::quartile(int q) const {
    if (samples == 0) return 0;
    // Smallest value v with P(X <= v) >= q/4.
    const double target = static_cast<double>(q) * static_cast<double>(samples) / 4.0;
    std::uint64_t cum = 0;
    for (int v = 0; v < 3; ++v) {
        cum += takeoff_hist[static_cast<std::size_t>(v)];
        if (static_cast<double>(cum) >= target) return v;
    }
    return 2;
}

int sample_step(SurfaceState& s, Decision k, const AirportConfig& config, Rng& rng) {
    const bool x1 = rng.bernoulli(config.clear_prob_1);
    const bool x2 = rng.bernoulli(config.clear_prob_2);
    const int takeoffs = std::min(s.queue, static_cast<int>(x1) + static_cast<int>(x2));
    s.queue -= takeoffs;
    if (k != Decision::Hold) {
        s.set(config.ramps[static_cast<std::size_t>(ramp_of(k))].entry_sample, true);
        if (config.has_turn_bit()) s.turn = !s.turn;
    }
    const int n = config.taxiway_len;
    for (int i = n; i >= 1; --i) {
        if (!s.occupied(i)) continue;
        const bool room = i == n ? s.queue < config.queue_capacity : !s.occupied(i + 1);
        if (!room || !rng.bernoulli(config.move_prob)) continue;
        s.set(i, false);
        if (i == n) {
            ++s.queue;
        } else {
            s.set(i + 1, true);
        }
    }
    return takeoffs;
}

namespace {

double batch_se(const std::vector<double>& means) {
    const std::size_t n = means.size();
    if (n < 2) return 0.0;
    double mu = 0.0;
    for (double m : means) mu += m;
    mu /= static_cast<double>(n);
    double ss = 0.0;
    for (double m : means) ss += (m - mu) * (m - mu);
    return std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n));
}

} // namespace

SimResult rollout(const TransitionModel& model, Controller& controller, const SimConfig& sim, CostParams cost) {
    sim.validate();
    const auto& config = model.config();
    const auto& space = model.space();
    constexpr std::uint64_t kBatches = 20;

    SimResult res;
    double sum_t = 0.0, sum_t2 = 0.0, sum_n = 0.0, sum_c = 0.0;
    std::uint64_t idle = 0;
    std::vector<double> bt, bn, bc;

    for (int r = 0; r < sim.replications; ++r) {
        ReplicationStats rep;
        rep.seed = replication_seed(sim.seed, r);
        Rng rng(rep.seed);
        SurfaceState s;
        std::size_t pos = space.position(s);
        controller.reset(s, pos);

        const std::uint64_t measured = sim.steps - sim.warmup;
        const std::uint64_t batch_len = std::max<std::uint64_t>(1, measured / kBatches);
        double rt = 0.0, rn = 0.0, rc = 0.0;
        double batch_t = 0.0, batch_n = 0.0, batch_c = 0.0;
        std::uint64_t in_batch = 0;

        for (std::uint64_t step = 0; step < sim.steps; ++step) {
            Decision k = controller.decide(s, pos);
            if (!clearance_feasible(s, k, config)) {
                k = Decision::Hold;
                ++res.coerced_holds;
            }
            const int before = s.aircraft();
            const double c = state_cost(s, cost);
            const bool empty_queue = s.queue == 0;
            const int takeoffs = sample_step(s, k, config, rng);
            if (s.aircraft() - before != (k == Decision::Hold ? 0 : 1) - takeoffs) ++res.conservation_violations;
            pos = space.position(s);
            controller.observe(k, s, pos);

            if (step < sim.warmup) continue;
            const double t = takeoffs;
            rt += t;
            rn += before;
            rc += c;
            sum_t2 += t * t;
            idle += empty_queue;
            if (res.bins.size() <= static_cast<std::size_t>(before)) res.bins.resize(static_cast<std::size_t>(before) + 1);
            auto& bin = res.bins[static_cast<std::size_t>(before)];
            ++bin.samples;
            ++bin.takeoff_hist[static_cast<std::size_t>(takeoffs)];

            batch_t += t;
            batch_n += before;
            batch_c += c;
            if (++in_batch == batch_len) {
                bt.push_back(batch_t / static_cast<double>(batch_len));
                bn.push_back(batch_n / static_cast<double>(batch_len));
                bc.push_back(batch_c / static_cast<double>(batch_len));
                batch_t = batch_n = batch_c = 0.0;
                in_batch = 0;
            }
        }
        const double m = static_cast<double>(measured);
        rep.takeoff_mean = rt / m;
        rep.avg_taxiing = rn / m;
        rep.expected_cost = rc / m;
        res.replications.push_back(rep);
        sum_t += rt;
        sum_n += rn;
        sum_c += rc;
        res.samples += measured;
    }

    for (std::size_t i = 0; i < res.bins.size(); ++i) res.bins[i].n_ac = static_cast<int>(i);
    const double n = static_cast<double>(res.samples);
    res.takeoff_mean = sum_t / n;
    res.takeoff_std = std::sqrt(std::max(0.0, sum_t2 / n - res.takeoff_mean * res.takeoff_mean));
    res.avg_taxiing = sum_n / n;
    res.expected_cost = sum_c / n;
    res.idle_probability = static_cast<double>(idle) / n;
    const double rate = config.service_rate();
    res.utilization = rate > 0.0 ? res.takeoff_mean / rate : 0.0;
    res.takeoff_se = batch_se(bt);
    res.avg_taxiing_se = batch_se(bn);
    res.expected_cost_se = batch_se(bc);
    return res;
}

std::vector<CongestionPoint> congestion_curve(const SimResult& result) {
    std::vector<CongestionPoint> out;
    for (const auto& bin : result.bins) {
        if (bin.samples == 0) continue;
        CongestionPoint p;
        p.n_ac = bin.n_ac;
        p.samples = bin.samples;
        p.mean_rate = bin.mean();
        p.q1 = bin.quartile(1);
        p.median = bin.quartile(2);
        p.q3 = bin.quartile(3);
        p.sparse = bin.samples < 100;
        out.push_back(p);
    }
    return out;
}

std::vector<CongestionPoint> observed_congestion_curve(const MinuteSeries& series, int offset) {
    const auto estimate = series.taxiing_estimate();
    std::map<int, std::vector<int>> bins;
    for (std::size_t t = 0; t < series.rows.size(); ++t) {
        bins[std::max(0, estimate[t] - offset)].push_back(series.rows[t].takeoffs);
    }
    std::vector<CongestionPoint> out;
    for (auto& [n, counts] : bins) {
        std::sort(counts.begin(), counts.end());
        const auto rank = [&](int q) { return counts[(counts.size() * static_cast<std::size_t>(q) - 1) / 4]; };
        CongestionPoint p;
        p.n_ac = n;
        p.samples = counts.size();
        double sum = 0;
        for (int c : counts) sum += c;
        p.mean_rate = sum / static_cast<double>(counts.size());
        p.q1 = rank(1);
        p.median = rank(2);
        p.q3 = rank(3);
        p.sparse = counts.size() < 100;
        out.push_back(p);
    }
    return out;
}

void write_congestion_csv(std::ostream& out, const std::vector<CongestionPoint>& curve) {
    out << "n_ac,samples,mean_takeoffs_per_min,q1,median,q3,sparse\n";
    for (const auto& p : curve) {
        out << p.n_ac << ',' << p.samples << ',' << fixed(p.mean_rate) << ',' << p.q1 << ',' << p.median << ','
            << p.q3 << ',' << (p.sparse ? 1 : 0) << '\n';
    }
}

void write_sim_summary_csv(std::ostream& out, const std::vector<std::pair<std::string, SimResult>>& rows) {
    out << "controller,rng,samples,takeoff_mean_per_min,takeoff_std,takeoff_se,avg_taxiing,avg_taxiing_se,"
           "utilization,expected_cost,expected_cost_se,idle_probability,coerced_holds,conservation_violations\n";
    for (const auto& [name, r] : rows) {
        out << name << ',' << r.rng << ',' << r.samples << ',' << fixed(r.takeoff_mean) << ',' << fixed(r.takeoff_std)
            << ',' << fixed(r.takeoff_se) << ',' << fixed(r.avg_taxiing) << ',' << fixed(r.avg_taxiing_se) << ','
            << fixed(r.utilization) << ',' << fixed(r.expected_cost) << ',' << fixed(r.expected_cost_se) << ','
            << fixed(r.idle_probability) << ',' << r.coerced_holds << ',' << r.conservation_violations << '\n';
    }
}

} // namespace surfacemdp
