#pragma once

#include "swipt/linalg.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace swipt {

struct SystemParams {
    int L = 1;
    int N = 1;
    double slot_length = 1.0;     // s
    double noise_variance = 1e-9; // W
    double eta = 0.8;
    double bandwidth = 1e6;       // Hz, reporting only

    /// |w|² is transmit energy per slot, so the SNR divides by σ²·slot_length.
    double noise_energy() const { return noise_variance * slot_length; }

    void validate() const {
        if (L < 1) throw std::invalid_argument("SystemParams: L must be >= 1");
        if (N < 1) throw std::invalid_argument("SystemParams: N must be >= 1");
        if (!(slot_length > 0)) throw std::invalid_argument("SystemParams: slot_length must be > 0");
        if (!(noise_variance > 0)) throw std::invalid_argument("SystemParams: noise_variance must be > 0");
        if (!(eta > 0 && eta < 1)) throw std::invalid_argument("SystemParams: eta must lie in (0,1)");
    }
};

struct ChannelState {
    CVec h; // data receiver
    CVec g; // energy receiver

    CMat gram_g() const { return g * g.adjoint(); }

    void validate(int L) const {
        if (h.size() != L || g.size() != L)
            throw std::invalid_argument("ChannelState: channel length differs from L");
        if (!h.allFinite() || !g.allFinite())
            throw std::invalid_argument("ChannelState: non-finite channel");
        if (h.norm() == 0 || g.norm() == 0)
            throw std::invalid_argument("ChannelState: zero channel");
    }
};

/// L x N harvested energy in Joules.
using EnergyProfile = RMat;

inline void validate_profile(const EnergyProfile& E, int L, int N) {
    if (E.rows() != L || E.cols() != N)
        throw std::invalid_argument("EnergyProfile: shape differs from L x N");
    if (!E.allFinite() || (E.array() < 0).any())
        throw std::invalid_argument("EnergyProfile: entries must be finite and >= 0");
}

struct Scenario {
    SystemParams params;
    ChannelState ch;
    EnergyProfile E;
    /// Mean harvest power per BS (W). Empty when unknown.
    RVec P_H;

    void validate() const {
        params.validate();
        ch.validate(params.L);
        validate_profile(E, params.L, params.N);
        if (P_H.size() != 0 && P_H.size() != params.L)
            throw std::invalid_argument("Scenario: P_H length differs from L");
    }
};

struct BeamformingSchedule {
    std::vector<CVec> w;
    std::vector<double> per_slot_rate; // nats
    std::vector<double> rf_energy;     // J, post-eta
};

inline double slot_rate(const CVec& h, const CVec& w, double sigma2) {
    return std::log1p(abs2(inner(h, w)) / sigma2);
}

/// Fills the derived per-slot fields from the vectors.
inline BeamformingSchedule make_schedule(std::vector<CVec> w, const SystemParams& p, const ChannelState& ch) {
    BeamformingSchedule s;
    s.per_slot_rate.reserve(w.size());
    s.rf_energy.reserve(w.size());
    for (const auto& wn : w) {
        if (wn.size() != ch.h.size()) throw std::invalid_argument("make_schedule: dimension mismatch");
        s.per_slot_rate.push_back(slot_rate(ch.h, wn, p.noise_energy()));
        s.rf_energy.push_back(p.eta * abs2(inner(ch.g, wn)));
    }
    s.w = std::move(w);
    return s;
}

inline BeamformingSchedule zero_schedule(const SystemParams& p, const ChannelState& ch) {
    return make_schedule(std::vector<CVec>(p.N, CVec::Zero(p.L)), p, ch);
}

inline double throughput(const BeamformingSchedule& s, const SystemParams& p, const CVec& h) {
    double T = 0;
    for (const auto& wn : s.w) {
        if (wn.size() != h.size()) throw std::invalid_argument("throughput: dimension mismatch");
        T += slot_rate(h, wn, p.noise_energy());
    }
    return T;
}

inline double rf_charged_energy(const BeamformingSchedule& s, const SystemParams& p, const CVec& g) {
    double Q = 0;
    for (const auto& wn : s.w) {
        if (wn.size() != g.size()) throw std::invalid_argument("rf_charged_energy: dimension mismatch");
        Q += abs2(inner(g, wn));
    }
    return p.eta * Q;
}

struct CausalityReport {
    bool ok = true;
    int bs = -1;   // first violation, 0-based
    int slot = -1;
    double excess = 0;
};

/// Cumulative per-BS energy causality with an absolute slack.
inline CausalityReport check_causality(const BeamformingSchedule& s, const EnergyProfile& E, double tol = 1e-9) {
    const int L = static_cast<int>(E.rows());
    const int N = static_cast<int>(E.cols());
    if (static_cast<int>(s.w.size()) != N) throw std::invalid_argument("check_causality: slot count mismatch");
    CausalityReport rep;
    for (int l = 0; l < L; ++l) {
        double used = 0, got = 0;
        for (int n = 0; n < N; ++n) {
            if (s.w[n].size() != L) throw std::invalid_argument("check_causality: dimension mismatch");
            used += abs2(s.w[n](l));
            got += E(l, n);
            double ex = used - got;
            if (ex > tol && (rep.ok || n < rep.slot)) {
                rep.ok = false;
                rep.bs = l;
                rep.slot = n;
                rep.excess = ex;
                break;
            }
        }
    }
    return rep;
}

/// ρ = |gᴴh| / (‖g‖‖h‖)
inline double correlation(const ChannelState& ch) {
    return std::abs(inner(ch.g, ch.h)) / (ch.g.norm() * ch.h.norm());
}

struct TradeoffCurve {
    std::vector<std::pair<double, double>> points; // (q J, T nats)
    double q_max = 0;
};

} // namespace swipt
