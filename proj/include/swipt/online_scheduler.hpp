#pragma once

#include "swipt/energymax.hpp"
#include "swipt/model.hpp"
#include "swipt/slot_solver.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace swipt {

struct OnlineState {
    RVec b;                  // residual energy per BS after this slot's arrival (J)
    int n = 0;               // slots already served
    double rf_delivered = 0; // J, post-eta
    double q_committed = 0;  // Σ q_t so far, pre-eta
    RVec P_H;                // per-BS mean harvest power (W)
    RVec seen;               // cumulative arrivals, for the empirical estimate
};

struct OnlineOptions {
    bool empirical_rates = false; // estimate P_H from the arrivals seen so far
};

struct OnlineStep {
    CVec w;
    double rate = 0;      // nats
    RVec p;               // per-BS energy allowed this slot (J)
    double q = 0;         // RF floor handed to the slot solver (pre-eta)
    double shortfall = 0; // J post-eta, nonzero only in the last slot
};

inline OnlineState online_start(const RVec& P_H, int L) {
    OnlineState s;
    s.b = RVec::Zero(L);
    s.seen = RVec::Zero(L);
    s.P_H = P_H.size() ? P_H : RVec(RVec::Zero(L));
    return s;
}

/**
 * One slot of the proportional heuristic.
 * @param E_n     arrivals of this slot (J)
 * @param q_total RF target over the horizon (J, post-eta)
 */
inline OnlineStep online_step(OnlineState& st, const RVec& E_n, double q_total, const ChannelState& ch,
                              const SystemParams& P, const OnlineOptions& opt = {}) {
    const int L = P.L;
    if (E_n.size() != L) throw std::invalid_argument("online_step: arrival length differs from L");
    if (st.n >= P.N) throw std::invalid_argument("online_step: horizon exhausted");
    st.b += E_n;
    st.seen += E_n;
    RVec rates = opt.empirical_rates ? RVec(st.seen / ((st.n + 1) * P.slot_length)) : st.P_H;
    if (rates.size() != L) throw std::invalid_argument("online_step: P_H length differs from L");

    OnlineStep out;
    double k = std::numeric_limits<double>::infinity();
    for (int l = 0; l < L; ++l)
        if (rates(l) > 0) k = std::min(k, std::max(st.b(l), 0.0) / (rates(l) * P.slot_length));
    if (!std::isfinite(k)) k = 0;
    out.p = k * rates * P.slot_length;
    for (int l = 0; l < L; ++l) out.p(l) = std::min(out.p(l), std::max(st.b(l), 0.0));

    const double Qpre = q_total / P.eta;
    const double cap = fE(out.p, ch.g);
    const bool last = st.n == P.N - 1;
    if (!last) {
        out.q = std::min(k / P.N * Qpre, cap);
    } else {
        double want = std::max(Qpre - st.q_committed, 0.0);
        if (want > cap * (1 + 1e-12)) out.shortfall = P.eta * (want - cap);
        out.q = std::min(want, cap);
    }

    SlotProblem sp{out.p, out.q, ch.h, ch.g, P.noise_energy()};
    if (out.q >= cap * (1 - 1e-12) && cap > 0) {
        out.w = energy_beam(out.p, ch.g);
    } else {
        try {
            out.w = solve_fR(sp).w;
        } catch (const NotConverged<SlotSolution>& e) {
            out.w = e.best().w;
        }
    }
    // causal by construction; guard the last ulp
    for (int l = 0; l < L; ++l) {
        double u = abs2(out.w(l));
        if (u > st.b(l)) out.w(l) *= u > 0 ? std::sqrt(std::max(st.b(l), 0.0) / u) : 0.0;
    }
    out.rate = slot_rate(ch.h, out.w, P.noise_energy());
    for (int l = 0; l < L; ++l) st.b(l) -= abs2(out.w(l));
    st.q_committed += out.q;
    st.rf_delivered += P.eta * abs2(inner(ch.g, out.w));
    ++st.n;
    return out;
}

struct OnlineResult {
    BeamformingSchedule schedule;
    double T = 0;         // nats
    double Q = 0;         // J, post-eta
    double shortfall = 0; // J, post-eta
    std::vector<double> q_slots; // per-slot floors, pre-eta
};

inline OnlineResult run_online(const Scenario& sc, double q_total, const OnlineOptions& opt = {}) {
    sc.validate();
    if (!(q_total >= 0)) throw std::invalid_argument("run_online: q_total must be >= 0");
    if (!opt.empirical_rates && sc.P_H.size() == 0)
        throw std::invalid_argument("run_online: scenario carries no P_H; use empirical rates");
    const SystemParams& P = sc.params;
    OnlineState st = online_start(sc.P_H, P.L);
    OnlineResult r;
    std::vector<CVec> w;
    for (int n = 0; n < P.N; ++n) {
        OnlineStep s = online_step(st, sc.E.col(n), q_total, sc.ch, P, opt);
        w.push_back(s.w);
        r.q_slots.push_back(s.q);
        r.shortfall += s.shortfall;
    }
    r.schedule = make_schedule(std::move(w), P, sc.ch);
    r.T = throughput(r.schedule, P, sc.ch.h);
    r.Q = rf_charged_energy(r.schedule, P, sc.ch.g);
    return r;
}

} // namespace swipt
