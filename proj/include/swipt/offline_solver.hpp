#pragma once

#include "swipt/energymax.hpp"
#include "swipt/errors.hpp"
#include "swipt/interval_solver.hpp"
#include "swipt/intervals.hpp"
#include "swipt/model.hpp"

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace swipt {

struct OfflineSolution {
    BeamformingSchedule schedule;
    IntervalPartition partition;      // one vector per interval over this partition
    std::vector<CVec> per_interval_w;
    IntervalPartition dual_partition; // partition the multipliers refer to
    RMat lambda;                      // M x L over dual_partition
    double mu = 0;
    double T = 0;     // nats
    double Q = 0;     // J, post-eta
    double upper = 0; // certified bound on T
    double gap = 0;
    int iterations = 0;
    int refinements = 0; // boundaries added to restore per-slot causality
};

namespace detail {

// Fine partition that reports every slot of an interval carrying several
// vectors as its own interval.
inline IntervalPartition reported_partition(const IntervalPartition& part, const std::vector<Piece>& pieces) {
    std::vector<int> b;
    int slot = 0;
    for (const auto& p : pieces) {
        slot += p.count;
        if (p.count == 1 || slot == part.boundaries[p.interval]) b.push_back(slot);
    }
    for (int e : part.boundaries) b.push_back(e);
    std::sort(b.begin(), b.end());
    b.erase(std::unique(b.begin(), b.end()), b.end());
    IntervalPartition r = partition_from_boundaries(b, part.boundaries.back());
    r.per_bs_changing_slots = part.per_bs_changing_slots;
    return r;
}


} // namespace detail

/**
 * Offline optimum for RF target q (J, post-eta) over the whole horizon.
 * @throws InfeasibleError if q > q_max; NotConverged<OfflineSolution> if the
 *         certified gap stays above 1e-3
 */
inline OfflineSolution solve_offline(const Scenario& sc, double q, const SolverOptions& opt = {}) {
    sc.validate();
    if (!(q >= 0)) throw std::invalid_argument("solve_offline: q must be >= 0");
    const SystemParams& P = sc.params;
    const double qm = solve_qmax(sc.E, sc.ch.g, P.eta).q_max;
    if (q > qm * (1 + 1e-9) + 1e-300) throw InfeasibleError("RF target above q_max", q - qm);

    IntervalPartition part = partition_of(sc.E);
    OfflineSolution out;
    for (int round = 0;; ++round) {
        IntervalProblem ip;
        ip.h = sc.ch.h;
        ip.g = sc.ch.g;
        ip.C = cumulative_caps(sc.E, part);
        ip.I = part.lengths;
        ip.Q = std::min(q, qm) / P.eta;
        ip.sigma2 = P.noise_energy();
        IntervalSolution is = solve_intervals(ip, opt);

        std::vector<CVec> w;
        w.reserve(P.N);
        for (const auto& p : is.pieces)
            for (int k = 0; k < p.count; ++k) w.push_back(p.w);
        BeamformingSchedule sched = make_schedule(std::move(w), P, sc.ch);
        CausalityReport rep = check_causality(sched, sc.E);
        out.iterations += is.iterations;
        if (!rep.ok && round < P.N) {
            const int end = rep.slot + 1;
            if (std::find(part.boundaries.begin(), part.boundaries.end(), end) == part.boundaries.end()) {
                std::vector<int> b = part.boundaries;
                b.push_back(end);
                std::sort(b.begin(), b.end());
                auto keep = part.per_bs_changing_slots;
                part = partition_from_boundaries(b, P.N);
                part.per_bs_changing_slots = keep;
                ++out.refinements;
                continue;
            }
        }
        out.schedule = std::move(sched);
        out.dual_partition = part;
        out.partition = detail::reported_partition(part, is.pieces);
        out.lambda = is.lambda.transpose();
        out.mu = is.mu;
        out.upper = is.upper;
        out.gap = is.gap;
        break;
    }
    out.T = throughput(out.schedule, P, sc.ch.h);
    out.Q = rf_charged_energy(out.schedule, P, sc.ch.g);
    for (int m = 0; m < out.partition.M(); ++m) {
        const int s = out.partition.start(m);
        for (int n = s + 1; n < out.partition.boundaries[m]; ++n)
            if (out.schedule.w[n] != out.schedule.w[s])
                throw std::logic_error("solve_offline: unequal vectors inside an interval");
        out.per_interval_w.push_back(out.schedule.w[s]);
    }
    if (out.gap > 1e-3) throw NotConverged<OfflineSolution>("offline solver: duality gap above 1e-3", out.gap, out);
    return out;
}

/// Offline optimum at num_points evenly spaced targets in [0, q_max].
inline TradeoffCurve sweep_region(const Scenario& sc, int num_points, const SolverOptions& opt = {}) {
    if (num_points < 2) throw std::invalid_argument("sweep_region: num_points must be >= 2");
    TradeoffCurve c;
    c.q_max = solve_qmax(sc.E, sc.ch.g, sc.params.eta).q_max;
    for (int i = 0; i < num_points; ++i) {
        double q = i == num_points - 1 ? c.q_max : c.q_max * i / (num_points - 1);
        c.points.push_back({q, solve_offline(sc, q, opt).T});
    }
    return c;
}

} // namespace swipt
