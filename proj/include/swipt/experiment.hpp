#pragma once

#include "swipt/baseline_separate.hpp"
#include "swipt/energymax.hpp"
#include "swipt/offline_solver.hpp"
#include "swipt/online_scheduler.hpp"
#include "swipt/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace swipt {

enum class Scheme { offline, online, baseline };

inline std::string to_string(Scheme s) {
    switch (s) {
    case Scheme::offline: return "offline";
    case Scheme::online: return "online";
    case Scheme::baseline: return "baseline";
    }
    return "?";
}

inline Scheme scheme_from(const std::string& s) {
    if (s == "offline") return Scheme::offline;
    if (s == "online") return Scheme::online;
    if (s == "baseline") return Scheme::baseline;
    throw std::invalid_argument("unknown scheme: " + s);
}

/// RF targets as average harvested power q̄ in µW, or as fractions of each
/// realisation's q_max.
struct QGrid {
    std::vector<double> values;
    bool relative = false;
};

enum class Status { ok, infeasible, shortfall, not_converged, error };

inline std::string to_string(Status s) {
    switch (s) {
    case Status::ok: return "ok";
    case Status::infeasible: return "infeasible";
    case Status::shortfall: return "shortfall";
    case Status::not_converged: return "not_converged";
    case Status::error: return "error";
    }
    return "?";
}

struct TrialRecord {
    Scheme scheme = Scheme::offline;
    int trial = 0;
    int q_index = 0;
    double q_avg_uW = 0;     // requested q̄
    double r_avg_mbps = 0;   // achieved r̄, 0 when the target is missed
    double q_got_uW = 0;     // delivered q̄
    double rho = 0;
    double q_max_uW = 0;     // this realisation's q̄ ceiling
    double gap = 0;          // offline only
    Status status = Status::ok;
    std::string message;
    std::optional<BeamformingSchedule> schedule;
};

struct SchemeMean {
    Scheme scheme;
    int q_index;
    double q_avg_uW;  // mean requested
    double r_avg_mbps;
    double q_got_uW;
    int failures;
};

struct ExperimentResult {
    std::vector<TrialRecord> records; // sorted by scheme, q index, trial
    std::vector<SchemeMean> means;
    std::vector<double> rho;          // per trial
    std::vector<double> q_max_uW;     // per trial
};

struct ExperimentOptions {
    int threads = 0;             // 0: hardware concurrency
    bool keep_schedules = false;
    OnlineOptions online;
    SolverOptions solver;
};

/// Unit conversions shared by the runner and the emitters.
inline double to_uW(double Q, const Scenario& sc) { return Q / (sc.params.N * sc.params.slot_length) * 1e6; }
inline double from_uW(double q_uW, const Scenario& sc) { return q_uW * 1e-6 * sc.params.N * sc.params.slot_length; }
inline double to_mbps(double T, const Scenario& sc) {
    return T / (sc.params.N * std::log(2.0)) * sc.params.bandwidth / 1e6;
}

/// Runs one scheme at one target on one realisation.
inline TrialRecord run_one(const Scenario& sc, Scheme scheme, double q_total, const ExperimentOptions& opt) {
    TrialRecord r;
    r.scheme = scheme;
    r.q_avg_uW = to_uW(q_total, sc);
    r.rho = correlation(sc.ch);
    std::optional<BeamformingSchedule> sched;
    double T = 0, Q = 0;
    try {
        switch (scheme) {
        case Scheme::offline: {
            OfflineSolution s = solve_offline(sc, q_total, opt.solver);
            T = s.T;
            Q = s.Q;
            r.gap = s.gap;
            sched = std::move(s.schedule);
            break;
        }
        case Scheme::online: {
            OnlineResult s = run_online(sc, q_total, opt.online);
            T = s.T;
            Q = s.Q;
            if (s.shortfall > 1e-9 * std::max(q_total, 1e-300)) {
                r.status = Status::shortfall;
                r.message = "RF shortfall " + std::to_string(s.shortfall) + " J";
            }
            sched = std::move(s.schedule);
            break;
        }
        case Scheme::baseline: {
            BaselineResult s = run_baseline(sc, q_total, opt.solver);
            T = s.T;
            Q = s.Q;
            sched = std::move(s.schedule);
            break;
        }
        }
    } catch (const InfeasibleError& e) {
        r.status = Status::infeasible;
        r.message = e.what();
    } catch (const NotConverged<OfflineSolution>& e) {
        r.status = Status::not_converged;
        r.message = e.what();
        r.gap = e.gap();
        T = e.best().T;
        Q = e.best().Q;
        sched = e.best().schedule;
    } catch (const std::exception& e) {
        r.status = Status::error;
        r.message = e.what();
    }
    r.q_got_uW = to_uW(Q, sc);
    // a missed target earns nothing
    r.r_avg_mbps = (r.status == Status::ok || r.status == Status::not_converged) ? to_mbps(T, sc) : 0.0;
    if (opt.keep_schedules) r.schedule = std::move(sched);
    return r;
}

/**
 * Monte Carlo over cfg.trials realisations. Trials run on a worker pool;
 * the output does not depend on scheduling.
 */
inline ExperimentResult run_experiment(const ScenarioConfig& cfg, const std::vector<Scheme>& schemes, const QGrid& grid,
                                       const ExperimentOptions& opt = {}) {
    cfg.validate();
    if (schemes.empty()) throw std::invalid_argument("run_experiment: no schemes");
    if (grid.values.empty()) throw std::invalid_argument("run_experiment: empty q grid");
    for (double v : grid.values)
        if (!(v >= 0) || (grid.relative && v > 1)) throw std::invalid_argument("run_experiment: q grid value out of range");

    const int trials = cfg.trials;
    std::vector<std::vector<TrialRecord>> per(trials);
    ExperimentResult res;
    res.rho.assign(trials, 0.0);
    res.q_max_uW.assign(trials, 0.0);
    std::atomic<int> next{0};
    auto worker = [&] {
        for (int t = next++; t < trials; t = next++) {
            Scenario sc = generate_scenario(cfg, cfg.rng_seed, static_cast<std::uint64_t>(t));
            const double qm = solve_qmax(sc.E, sc.ch.g, sc.params.eta).q_max;
            res.rho[t] = correlation(sc.ch);
            res.q_max_uW[t] = to_uW(qm, sc);
            for (Scheme s : schemes)
                for (size_t i = 0; i < grid.values.size(); ++i) {
                    double q = grid.relative ? grid.values[i] * qm : from_uW(grid.values[i], sc);
                    if (grid.relative && grid.values[i] == 1.0) q = qm;
                    TrialRecord r = run_one(sc, s, q, opt);
                    r.trial = t;
                    r.q_index = static_cast<int>(i);
                    r.q_max_uW = res.q_max_uW[t];
                    per[t].push_back(std::move(r));
                }
        }
    };
    int nt = opt.threads > 0 ? opt.threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    nt = std::min(nt, trials);
    if (nt <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (int k = 0; k < nt; ++k) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    for (auto& v : per)
        for (auto& r : v) res.records.push_back(std::move(r));
    auto rank = [&](Scheme s) { return std::find(schemes.begin(), schemes.end(), s) - schemes.begin(); };
    std::sort(res.records.begin(), res.records.end(), [&](const TrialRecord& a, const TrialRecord& b) {
        if (a.scheme != b.scheme) return rank(a.scheme) < rank(b.scheme);
        if (a.q_index != b.q_index) return a.q_index < b.q_index;
        return a.trial < b.trial;
    });
    for (Scheme s : schemes)
        for (size_t i = 0; i < grid.values.size(); ++i) {
            SchemeMean m{s, static_cast<int>(i), 0, 0, 0, 0};
            int k = 0;
            for (const auto& r : res.records)
                if (r.scheme == s && r.q_index == static_cast<int>(i)) {
                    m.q_avg_uW += r.q_avg_uW;
                    m.r_avg_mbps += r.r_avg_mbps;
                    m.q_got_uW += r.q_got_uW;
                    m.failures += r.status != Status::ok;
                    ++k;
                }
            if (k) {
                m.q_avg_uW /= k;
                m.r_avg_mbps /= k;
                m.q_got_uW /= k;
            }
            res.means.push_back(m);
        }
    return res;
}

} // namespace swipt
