#pragma once

#include "swipt/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace swipt {

struct EnergyMaxSolution {
    CVec w0;              // unit norm, zero entries for BSs with no energy
    double q_max = 0;     // J, post-eta
    std::vector<double> P; // per-slot transmit energy along w0
};

/**
 * Maximum RF energy deliverable over the horizon and the fixed-direction
 * schedule that attains it.
 * @param E   L x N harvested energy
 * @param g   energy-receiver channel
 * @param eta conversion efficiency
 */
inline EnergyMaxSolution solve_qmax(const RMat& E, const CVec& g, double eta) {
    const int L = static_cast<int>(E.rows());
    const int N = static_cast<int>(E.cols());
    if (g.size() != L) throw std::invalid_argument("solve_qmax: dimension mismatch");
    EnergyMaxSolution s;
    s.w0 = CVec::Zero(L);
    s.P.assign(N, 0.0);
    RVec tot = E.rowwise().sum();
    const double all = tot.sum();
    if (!(all > 0)) return s;

    double amp = 0;
    for (int l = 0; l < L; ++l) {
        if (tot(l) <= 0) continue;
        double a = std::abs(g(l));
        cplx ph = a > 0 ? g(l) / a : cplx(1, 0);
        s.w0(l) = ph * std::sqrt(tot(l) / all);
        amp += a * std::sqrt(tot(l));
    }
    s.q_max = eta * amp * amp;

    RVec cum = RVec::Zero(L);
    double spent = 0;
    for (int n = 0; n < N; ++n) {
        cum += E.col(n);
        double cap = std::numeric_limits<double>::infinity();
        for (int l = 0; l < L; ++l)
            if (tot(l) > 0) cap = std::min(cap, cum(l) / std::norm(s.w0(l)));
        if (n == N - 1) cap = all; // exact exhaustion; differs from the min only by rounding
        s.P[n] = std::max(0.0, cap - spent);
        spent += s.P[n];
    }
    return s;
}

/// (Σ_l |g_l| √p_l)², the largest |gᴴw|² with |w_l|² ≤ p_l.
inline double fE(const RVec& p, const CVec& g) {
    if (p.size() != g.size()) throw std::invalid_argument("fE: dimension mismatch");
    double a = 0;
    for (int l = 0; l < p.size(); ++l) {
        if (p(l) < 0) throw std::invalid_argument("fE: negative power");
        a += std::abs(g(l)) * std::sqrt(p(l));
    }
    return a * a;
}

/// Phase-aligned full-power beam that attains fE(p).
inline CVec energy_beam(const RVec& p, const CVec& g) {
    CVec w(p.size());
    for (int l = 0; l < p.size(); ++l) {
        double a = std::abs(g(l));
        w(l) = (a > 0 ? g(l) / a : cplx(1, 0)) * std::sqrt(std::max(p(l), 0.0));
    }
    return w;
}

} // namespace swipt
