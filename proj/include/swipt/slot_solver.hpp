#pragma once

#include "swipt/energymax.hpp"
#include "swipt/errors.hpp"
#include "swipt/interval_solver.hpp"
#include "swipt/model.hpp"

#include <cmath>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>

namespace swipt {

/// One slot: per-BS power caps p (J per slot), RF floor q (pre-eta).
struct SlotProblem {
    RVec p;
    double q = 0;
    CVec h, g;
    double sigma2 = 1;

    void validate() const {
        if (p.size() != h.size() || h.size() != g.size() || p.size() == 0)
            throw std::invalid_argument("SlotProblem: dimension mismatch");
        for (int l = 0; l < p.size(); ++l)
            if (!(p(l) >= 0) || !std::isfinite(p(l))) throw std::invalid_argument("SlotProblem: p must be finite and >= 0");
        if (!(q >= 0)) throw std::invalid_argument("SlotProblem: q must be >= 0");
        if (!(sigma2 > 0)) throw std::invalid_argument("SlotProblem: sigma2 must be > 0");
    }
};

struct SlotSolution {
    CVec w;
    double rate = 0; // nats
    RVec lambda;     // per-BS power multipliers
    double mu = 0;   // RF multiplier
    double gap = 0;  // relative, against the dual bound
    double relaxed = 0; // value of the covariance relaxation, >= rate
};

namespace detail {

struct PhaseResult {
    CVec w;
    double amp = 0;   // |hᴴw|
    double bound = 0; // certified upper bound on |hᴴw|
    RVec lambda;      // multipliers of |w_l|² ≤ p_l, per unit of |hᴴw|
    double nu = 0;
};

// With the phase θ of gᴴw fixed (hᴴw real), the slot problem is
//   max Re(hᴴw)  s.t. |w_l| ≤ √p_l,  Re(e^{-jθ}gᴴw) ≥ √q,
// whose dual in the single multiplier ν has the maximiser w_l = √p_l·v_l/|v_l|
// with v = h + ν e^{jθ} g.
struct PhaseCell {
    double theta, half, bound, nu;
    bool operator<(const PhaseCell& o) const { return bound < o.bound; }
};

inline CVec phase_beam(const SlotProblem& sp, double theta, double nu) {
    const cplx e = std::polar(1.0, theta);
    CVec w(sp.p.size());
    for (int l = 0; l < sp.p.size(); ++l) {
        cplx v = sp.h(l) + nu * e * sp.g(l);
        double a = std::abs(v);
        w(l) = a > 0 ? std::sqrt(sp.p(l)) * v / a : cplx(0, 0);
    }
    return w;
}

// Upper bound on phase_dual(·, nu) over [theta - half, theta + half]:
// the smaller of a Lipschitz and a second-order Taylor bound. Each term is
// √p_l·sqrt(A + B cos(θ + φ)), whose curvature is bounded on the cell by its
// smallest value there.
inline double phase_cell_bound(const SlotProblem& sp, double theta, double nu, double half, double sfe) {
    double d0 = -nu * std::sqrt(sp.q), d1 = 0, k = 0;
    for (int l = 0; l < sp.p.size(); ++l) {
        const double rp = std::sqrt(sp.p(l));
        if (rp == 0) continue;
        const double a = std::norm(sp.h(l)) + nu * nu * std::norm(sp.g(l));
        const double b = 2 * nu * std::abs(sp.h(l)) * std::abs(sp.g(l));
        const double phi = std::arg(std::conj(sp.h(l)) * sp.g(l));
        const double x = theta + phi;
        const double f = std::sqrt(std::max(a + b * std::cos(x), 0.0));
        d0 += rp * f;
        if (b == 0) continue;
        const double dist = std::abs(std::remainder(x - M_PI, 2 * M_PI));
        const double fmin = std::sqrt(std::max(a - b * std::cos(std::max(dist - half, 0.0)), 0.0));
        if (!(fmin > 0)) return d0 + nu * sfe * half + std::numeric_limits<double>::infinity();
        d1 += rp * (f > 0 ? -b * std::sin(x) / (2 * f) : 0.0);
        k += rp * (b / (2 * fmin) + b * b / (4 * fmin * fmin * fmin));
    }
    return d0 + std::abs(d1) * half + 0.5 * k * half * half;
}

inline double phase_dual(const SlotProblem& sp, double theta, double nu) {
    const cplx e = std::polar(1.0, theta);
    double d = -nu * std::sqrt(sp.q);
    for (int l = 0; l < sp.p.size(); ++l) d += std::sqrt(sp.p(l)) * std::abs(sp.h(l) + nu * e * sp.g(l));
    return d;
}

// Smallest ν whose maximiser meets the RF floor along θ.
inline double phase_nu(const SlotProblem& sp, double theta) {
    const double rq = std::sqrt(sp.q);
    const cplx e = std::polar(1.0, theta);
    auto rf = [&](double nu) { return std::real(std::conj(e) * inner(sp.g, phase_beam(sp, theta, nu))); };
    if (rf(0) >= rq) return 0;
    double hi = 1;
    while (rf(hi) < rq && hi < 1e30) hi *= 4;
    double lo = 0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        double mid = 0.5 * (lo + hi);
        (rf(mid) >= rq ? hi : lo) = mid;
    }
    return hi;
}

/// Global optimum of the single-slot vector problem by branch and bound on θ.
inline PhaseResult phase_search(const SlotProblem& sp, double rel_tol = 1e-10, int max_cells = 20000) {
    const int L = static_cast<int>(sp.p.size());
    const double sfe = std::sqrt(fE(sp.p, sp.g));
    PhaseResult best;
    best.w = CVec::Zero(L);
    std::priority_queue<PhaseCell> open;
    auto visit = [&](double theta, double half) {
        double nu = phase_nu(sp, theta);
        CVec w = phase_beam(sp, theta, nu);
        double amp = std::abs(inner(sp.h, w));
        if (amp > best.amp && abs2(inner(sp.g, w)) >= sp.q) {
            best.amp = amp;
            best.w = w;
            best.nu = nu;
        }
        const double lip = phase_dual(sp, theta, nu) + nu * sfe * half;
        open.push({theta, half, std::min(lip, phase_cell_bound(sp, theta, nu, half, sfe)), nu});
    };
    const int K = 64;
    for (int k = 0; k < K; ++k) visit((2 * k + 1) * M_PI / K, M_PI / K);
    int cells = K;
    while (!open.empty()) {
        PhaseCell c = open.top();
        if (c.bound <= best.amp * (1 + rel_tol) || cells >= max_cells) break;
        open.pop();
        visit(c.theta - c.half / 2, c.half / 2);
        visit(c.theta + c.half / 2, c.half / 2);
        cells += 2;
    }
    best.bound = open.empty() ? best.amp : std::max(open.top().bound, best.amp);
    best.lambda = RVec::Zero(L);
    if (best.amp > 0) {
        // align hᴴw to the real axis; θ is then the phase of gᴴw
        cplx z = inner(sp.h, best.w);
        best.w *= z / std::abs(z);
        double theta = std::arg(inner(sp.g, best.w));
        for (int l = 0; l < L; ++l)
            if (sp.p(l) > 0) best.lambda(l) = std::abs(sp.h(l) + best.nu * std::polar(1.0, theta) * sp.g(l)) / (2 * std::sqrt(sp.p(l)));
    }
    return best;
}

} // namespace detail

/**
 * Largest single-slot rate under per-BS caps and an RF floor.
 * @throws InfeasibleError if q > fE(p); NotConverged<SlotSolution> if the
 *         certified gap stays above 1e-4
 */
inline SlotSolution solve_fR(const SlotProblem& sp) {
    sp.validate();
    const int L = static_cast<int>(sp.p.size());
    const double qe = fE(sp.p, sp.g);
    if (sp.q > qe * (1 + 1e-9) + 1e-300)
        throw InfeasibleError("slot RF floor above fE(p)", sp.q - qe);

    // matched filter: optimal whenever it already meets the floor
    {
        CVec w(L);
        double x = 0;
        for (int l = 0; l < L; ++l) {
            const double a = std::abs(sp.h(l));
            w(l) = a > 0 ? std::sqrt(sp.p(l)) * sp.h(l) / a : cplx(0, 0);
            x += a * std::sqrt(sp.p(l));
        }
        if (abs2(inner(sp.g, w)) >= sp.q) {
            SlotSolution s;
            s.w = w;
            s.rate = std::log1p(x * x / sp.sigma2);
            s.relaxed = s.rate;
            const double k = 2 * x / (sp.sigma2 + x * x);
            s.lambda = RVec::Zero(L);
            for (int l = 0; l < L; ++l)
                if (sp.p(l) > 0) s.lambda(l) = k * std::abs(sp.h(l)) / (2 * std::sqrt(sp.p(l)));
            return s;
        }
    }

    IntervalProblem ip;
    ip.h = sp.h;
    ip.g = sp.g;
    ip.C = sp.p;
    ip.I = {1};
    ip.Q = std::min(sp.q, qe);
    ip.sigma2 = sp.sigma2;
    SolverOptions opt;
    opt.max_rank_rounds = 0; // the phase search below handles a loose relaxation
    IntervalSolution is = solve_intervals(ip, opt);

    SlotSolution s;
    s.w = is.pieces.empty() ? CVec(CVec::Zero(L)) : is.pieces.front().w;
    s.lambda = is.lambda.col(0);
    s.mu = is.mu;
    s.rate = slot_rate(sp.h, s.w, sp.sigma2);
    double upper = is.closed_form ? s.rate : is.upper;
    s.relaxed = std::max(upper, s.rate);
    s.gap = detail::rel_gap(upper, s.rate);
    if (s.gap > 1e-6 && !is.closed_form) {
        // the relaxation may not be tight; search the phase of gᴴw directly
        detail::PhaseResult pr = detail::phase_search(sp);
        double r = std::log1p(pr.amp * pr.amp / sp.sigma2);
        double ub = std::log1p(pr.bound * pr.bound / sp.sigma2);
        if (r >= s.rate) {
            // first-order multipliers of the squared constraints, on the rate scale
            const double x = pr.amp, k = 2 * x / (sp.sigma2 + x * x);
            s.w = pr.w;
            s.rate = r;
            s.lambda = k * pr.lambda;
            s.mu = sp.q > 0 ? k * pr.nu / (2 * std::sqrt(sp.q)) : 0.0;
        }
        s.gap = detail::rel_gap(std::min(upper, ub), s.rate);
    }
    if (s.gap > 1e-4) throw NotConverged<SlotSolution>("slot solver: duality gap above 1e-4", s.gap, s);
    return s;
}

/// Rate only; same errors as solve_fR.
inline double fR_value(const RVec& p, double q, const CVec& h, const CVec& g, double sigma2) {
    return solve_fR({p, q, h, g, sigma2}).rate;
}

} // namespace swipt
