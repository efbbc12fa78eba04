#pragma once

#include "swipt/energymax.hpp"
#include "swipt/model.hpp"
#include "swipt/offline_solver.hpp"

#include <stdexcept>

namespace swipt {

struct BaselineResult {
    BeamformingSchedule schedule; // charging-slot rates are reported as 0
    double T = 0;                 // nats, data slots only
    double Q = 0;                 // J, post-eta
    int N_E = 0;                  // charging slots
};

/// Largest RF energy deliverable within the first n slots.
inline double prefix_qmax(const Scenario& sc, int n) {
    if (n <= 0) return 0;
    return solve_qmax(sc.E.leftCols(n), sc.ch.g, sc.params.eta).q_max;
}

/**
 * Energy beamforming in the shortest prefix able to deliver q_total, then
 * data-only transmission on what is left.
 * @throws InfeasibleError if even the full horizon cannot deliver q_total
 */
inline BaselineResult run_baseline(const Scenario& sc, double q_total, const SolverOptions& opt = {}) {
    sc.validate();
    if (!(q_total >= 0)) throw std::invalid_argument("run_baseline: q_total must be >= 0");
    const SystemParams& P = sc.params;
    const int L = P.L, N = P.N;
    BaselineResult r;
    int NE = 0;
    if (q_total > 0) {
        const double full = prefix_qmax(sc, N);
        if (q_total > full * (1 + 1e-9)) throw InfeasibleError("RF target above prefix capability", q_total - full);
        NE = N;
        for (int n = 1; n <= N; ++n)
            if (prefix_qmax(sc, n) >= std::min(q_total, full)) {
                NE = n;
                break;
            }
    }
    r.N_E = NE;

    std::vector<CVec> w;
    RVec carry = RVec::Zero(L);
    if (NE > 0) {
        EnergyMaxSolution em = solve_qmax(sc.E.leftCols(NE), sc.ch.g, P.eta);
        const double gain = P.eta * abs2(inner(sc.ch.g, em.w0));
        // trim the surplus from the last charging slots
        double surplus = std::max(em.q_max - q_total, 0.0) / gain;
        for (int n = NE - 1; n >= 0 && surplus > 0; --n) {
            double cut = std::min(surplus, em.P[n]);
            em.P[n] -= cut;
            surplus -= cut;
        }
        for (int n = 0; n < NE; ++n) w.push_back(em.w0 * std::sqrt(em.P[n]));
        carry = sc.E.leftCols(NE).rowwise().sum();
        for (const auto& v : w) carry -= v.cwiseAbs2();
        carry = carry.cwiseMax(0.0);
    }
    if (NE < N) {
        Scenario rest = sc;
        rest.params.N = N - NE;
        rest.E = sc.E.rightCols(N - NE);
        rest.E.col(0) += carry;
        try {
            OfflineSolution off = solve_offline(rest, 0.0, opt);
            for (const auto& v : off.schedule.w) w.push_back(v);
        } catch (const NotConverged<OfflineSolution>& e) {
            for (const auto& v : e.best().schedule.w) w.push_back(v);
        }
    }
    r.schedule = make_schedule(std::move(w), P, sc.ch);
    for (int n = 0; n < NE; ++n) r.schedule.per_slot_rate[n] = 0;
    for (double v : r.schedule.per_slot_rate) r.T += v;
    r.Q = rf_charged_energy(r.schedule, P, sc.ch.g);
    return r;
}

} // namespace swipt
