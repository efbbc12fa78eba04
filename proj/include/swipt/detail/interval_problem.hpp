#pragma once

#include "swipt/intervals.hpp"
#include "swipt/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace swipt {

/// Rate maximisation over a partition with one beamformer per interval:
///   max Σ_m I_m log(1 + |hᴴw_m|²/σ²)
///   s.t. Σ_{t≤m} I_t |w_{l,t}|² ≤ C_{l,m},  Σ_m I_m |gᴴw_m|² ≥ Q.
/// A single slot is the case M = 1, I = 1, C = p, Q = q.
struct IntervalProblem {
    CVec h, g;
    RMat C;              // L x M, nondecreasing along m
    std::vector<int> I;  // interval lengths
    double Q = 0;        // pre-eta floor
    double sigma2 = 1;

    int L() const { return static_cast<int>(h.size()); }
    int M() const { return static_cast<int>(I.size()); }

    void validate() const {
        if (h.size() != g.size() || C.rows() != h.size() || C.cols() != static_cast<long>(I.size()))
            throw std::invalid_argument("IntervalProblem: dimension mismatch");
        if (I.empty()) throw std::invalid_argument("IntervalProblem: no intervals");
        for (int len : I)
            if (len < 1) throw std::invalid_argument("IntervalProblem: interval length < 1");
        if (!(sigma2 > 0)) throw std::invalid_argument("IntervalProblem: sigma2 must be > 0");
        if (!(Q >= 0)) throw std::invalid_argument("IntervalProblem: negative RF floor");
        if (!C.allFinite() || (C.array() < 0).any())
            throw std::invalid_argument("IntervalProblem: caps must be finite and >= 0");
        for (int l = 0; l < C.rows(); ++l)
            for (int m = 1; m < C.cols(); ++m)
                if (C(l, m) < C(l, m - 1)) throw std::invalid_argument("IntervalProblem: caps must be cumulative");
    }
};

/// A run of `count` consecutive slots of interval `interval` sharing vector `w`.
struct Piece {
    int interval = 0;
    int count = 1;
    CVec w;
};

namespace detail {

// Scaled copy with σ² = 1, ‖g‖ = 1 and unit mean energy per slot.
struct NormProblem {
    int L = 0, M = 0;
    CVec h, g;
    RMat C;
    RVec I;
    double Q = 0;
    double P0 = 1;    // energy scale
    double gs = 1;    // ‖g‖
    std::vector<int> first; // first interval with C > 0, M if never

    bool active(int l, int m) const { return m >= first[l]; }
};

inline NormProblem normalise(const IntervalProblem& p) {
    NormProblem n;
    n.L = p.L();
    n.M = p.M();
    n.I.resize(n.M);
    long slots = 0;
    for (int m = 0; m < n.M; ++m) {
        n.I(m) = p.I[m];
        slots += p.I[m];
    }
    double total = p.C.col(n.M - 1).sum();
    n.P0 = total > 0 ? total / (static_cast<double>(slots) * n.L) : 1.0;
    n.gs = p.g.norm();
    n.h = p.h * std::sqrt(n.P0 / p.sigma2);
    n.g = n.gs > 0 ? CVec(p.g / n.gs) : CVec::Zero(n.L);
    n.C = p.C / n.P0;
    n.Q = n.gs > 0 ? p.Q / (n.P0 * n.gs * n.gs) : p.Q;
    n.first.assign(n.L, n.M);
    for (int l = 0; l < n.L; ++l)
        for (int m = 0; m < n.M; ++m)
            if (n.C(l, m) > 0) {
                n.first[l] = m;
                break;
            }
    return n;
}

inline double qmax_of(const NormProblem& n) {
    double a = 0;
    for (int l = 0; l < n.L; ++l) a += std::abs(n.g(l)) * std::sqrt(n.C(l, n.M - 1));
    return a * a;
}

// Fixed-direction energy schedule on the partition: w0 ∝ g with per-BS
// share of total energy, greedy cumulative power per interval.
struct EnergyDirection {
    CVec w0;
    RVec cap; // cumulative energy along w0 allowed at each interval end
};

inline EnergyDirection energy_direction(const NormProblem& n) {
    EnergyDirection d;
    d.w0 = CVec::Zero(n.L);
    double tot = n.C.col(n.M - 1).sum();
    d.cap = RVec::Zero(n.M);
    if (!(tot > 0)) return d;
    for (int l = 0; l < n.L; ++l) {
        double c = n.C(l, n.M - 1);
        if (c <= 0) continue;
        double a = std::abs(n.g(l));
        d.w0(l) = (a > 0 ? n.g(l) / a : cplx(1, 0)) * std::sqrt(c / tot);
    }
    for (int m = 0; m < n.M; ++m) {
        double cap = std::numeric_limits<double>::infinity();
        for (int l = 0; l < n.L; ++l)
            if (n.C(l, n.M - 1) > 0) cap = std::min(cap, n.C(l, m) / std::norm(d.w0(l)));
        d.cap(m) = m == n.M - 1 ? tot : cap;
    }
    return d;
}

inline std::vector<Piece> energy_pieces(const NormProblem& n, const EnergyDirection& d) {
    std::vector<Piece> out;
    double prev = 0;
    for (int m = 0; m < n.M; ++m) {
        double P = std::max(0.0, d.cap(m) - prev) / n.I(m);
        prev = std::max(prev, d.cap(m));
        out.push_back({m, static_cast<int>(n.I(m)), d.w0 * std::sqrt(P)});
    }
    return out;
}

inline double pieces_rate(const NormProblem& n, const std::vector<Piece>& ps) {
    double T = 0;
    for (const auto& p : ps) T += p.count * std::log1p(abs2(inner(n.h, p.w)));
    return T;
}

inline double pieces_rf(const NormProblem& n, const std::vector<Piece>& ps) {
    double q = 0;
    for (const auto& p : ps) q += p.count * abs2(inner(n.g, p.w));
    return q;
}

// L x M cumulative consumption at interval ends.
inline RMat pieces_consumption(const NormProblem& n, const std::vector<Piece>& ps) {
    RMat use = RMat::Zero(n.L, n.M);
    for (const auto& p : ps)
        for (int l = 0; l < n.L; ++l) use(l, p.interval) += p.count * std::norm(p.w(l));
    for (int m = 1; m < n.M; ++m) use.col(m) += use.col(m - 1);
    return use;
}

// Makes a candidate feasible: per-BS scaling for causality, then the
// smallest mix toward an energy-delivering schedule restoring the RF floor.
inline std::vector<Piece> repair(const NormProblem& n, std::vector<Piece> ps, const std::vector<Piece>& fallback) {
    RMat use = pieces_consumption(n, ps);
    for (int l = 0; l < n.L; ++l) {
        double s = 1;
        for (int m = 0; m < n.M; ++m)
            if (use(l, m) > n.C(l, m)) s = std::min(s, use(l, m) > 0 ? n.C(l, m) / use(l, m) : 0.0);
        if (s < 1) {
            double r = std::sqrt(s) * (1 - 1e-15);
            for (auto& p : ps) p.w(l) *= r;
        }
    }
    for (auto& p : ps) {
        cplx z = inner(n.g, p.w);
        if (std::abs(z) > 0) p.w *= std::conj(z) / std::abs(z);
    }
    if (n.Q <= 0 || pieces_rf(n, ps) >= n.Q) return ps;

    auto mix = [&](const std::vector<Piece>& tgt, double t) {
        std::vector<Piece> r = ps;
        for (size_t k = 0; k < r.size(); ++k) r[k].w = (1 - t) * ps[k].w + t * tgt[k].w;
        return r;
    };
    auto settle = [&](const std::vector<Piece>& tgt, std::vector<Piece>& out) {
        if (pieces_rf(n, mix(tgt, 1.0)) < n.Q) return false;
        double lo = 0, hi = 1;
        for (int it = 0; it < 80; ++it) {
            double mid = 0.5 * (lo + hi);
            (pieces_rf(n, mix(tgt, mid)) >= n.Q ? hi : lo) = mid;
        }
        out = mix(tgt, hi);
        return true;
    };

    std::vector<Piece> own = ps;
    for (auto& p : own)
        for (int l = 0; l < n.L; ++l) {
            double a = std::abs(n.g(l));
            p.w(l) = (a > 0 ? n.g(l) / a : cplx(1, 0)) * std::abs(p.w(l));
        }
    // interval-level energy schedule expanded onto the same pieces
    std::vector<Piece> lem = ps;
    for (auto& p : lem) {
        for (const auto& f : fallback)
            if (f.interval == p.interval) p.w = f.w;
    }

    std::vector<Piece> a, b;
    bool okA = settle(own, a), okB = settle(lem, b);
    if (okA && okB) return pieces_rate(n, a) >= pieces_rate(n, b) ? a : b;
    if (okA) return a;
    if (okB) return b;
    return lem; // cannot happen for Q ≤ q_max
}

inline double rel_gap(double upper, double T) { return (upper - T) / std::max(std::abs(T), 1e-6); }

} // namespace detail
} // namespace swipt
