#pragma once

#include "swipt/detail/interval_problem.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <vector>

namespace swipt::detail {

// Variables: λ_{l,t} for t ≥ first[l], then μ when the RF floor is positive.
struct DualLayout {
    std::vector<std::vector<int>> idx; // -1 where the BS is switched off
    int mu = -1;
    int n = 0;
};

inline DualLayout dual_layout(const NormProblem& p) {
    DualLayout d;
    d.idx.assign(p.L, std::vector<int>(p.M, -1));
    for (int l = 0; l < p.L; ++l)
        for (int t = p.first[l]; t < p.M; ++t) d.idx[l][t] = d.n++;
    if (p.Q > 0) d.mu = d.n++;
    return d;
}

struct DualPoint {
    double f = 0;       // dual function
    double f_bar = 0;   // with barrier terms
    RVec grad;
    RMat H;
    std::vector<CVec> w; // Lagrangian maximisers per interval
};

// Cumulative multipliers Λ_{l,m} = Σ_{t≥m} λ_{l,t}.
inline RMat cumulative_lambda(const NormProblem& p, const DualLayout& lay, const RVec& x) {
    RMat Lam = RMat::Zero(p.L, p.M);
    for (int l = 0; l < p.L; ++l) {
        double acc = 0;
        for (int t = p.M - 1; t >= p.first[l]; --t) {
            acc += x(lay.idx[l][t]);
            Lam(l, t) = acc;
        }
    }
    return Lam;
}

/**
 * Dual function with the closed-form inner maximiser.
 * @param tau weight of the log barrier on λ, μ ≥ 0 and on the domain margin
 * @return false when (x) lies outside the domain
 */
inline bool dual_eval(const NormProblem& p, const DualLayout& lay, const RVec& x, double tau, bool deriv,
                      DualPoint& out) {
    const int L = p.L, M = p.M;
    for (int k = 0; k < lay.n; ++k)
        if (!(x(k) > 0) && !(k == lay.mu && tau == 0 && x(k) == 0)) return false;
    const double mu = lay.mu >= 0 ? x(lay.mu) : 0.0;
    RMat Lam = cumulative_lambda(p, lay, x);

    double f = 0, bar = 0;
    std::vector<RVec> gm;
    std::vector<RMat> Hm;
    if (deriv) {
        gm.assign(M, RVec::Zero(L + 1));
        Hm.assign(M, RMat::Zero(L + 1, L + 1));
        out.w.assign(M, CVec::Zero(L));
    }
    RVec d(L);
    CVec dg(L), u(L);
    for (int m = 0; m < M; ++m) {
        double b = 0;
        for (int l = 0; l < L; ++l) {
            d(l) = p.active(l, m) ? 1.0 / Lam(l, m) : 0.0;
            b += d(l) * std::norm(p.g(l));
        }
        const double den = 1 - mu * b;
        if (!(den > 0)) return false;
        dg = d.cast<cplx>().cwiseProduct(p.g);
        const cplx c = dg.dot(p.h); // (D⁻¹g)ᴴh
        u = d.cast<cplx>().cwiseProduct(p.h) + (mu * c / den) * dg;
        const double ht = std::real(p.h.dot(u));
        const double Im = p.I(m);
        double d1 = 0, d2 = 0;
        if (ht > 1) {
            f += Im * (std::log(ht) - 1 + 1 / ht);
            d1 = (ht - 1) / (ht * ht);
            d2 = (2 - ht) / (ht * ht * ht);
        }
        if (tau > 0 && lay.mu >= 0) bar -= std::log(den);
        if (!deriv) continue;

        out.w[m] = std::sqrt(d1) * u;
        const cplx gu = p.g.dot(u);
        RVec dh(L + 1);
        for (int l = 0; l < L; ++l) dh(l) = p.active(l, m) ? -std::norm(u(l)) : 0.0;
        dh(L) = std::norm(gu);
        RMat Hh = RMat::Zero(L + 1, L + 1);
        for (int i = 0; i < L; ++i) {
            if (!p.active(i, m)) continue;
            for (int j = 0; j < L; ++j) {
                if (!p.active(j, m)) continue;
                cplx Bij = mu * dg(i) * std::conj(dg(j)) / den;
                if (i == j) Bij += d(i);
                Hh(i, j) = 2 * std::real(std::conj(u(i)) * Bij * u(j));
            }
            Hh(i, L) = Hh(L, i) = -2 * std::real(std::conj(u(i)) * (dg(i) / den) * gu);
        }
        Hh(L, L) = 2 * std::norm(gu) * b / den;
        gm[m] = Im * d1 * dh;
        Hm[m] = Im * (d2 * dh * dh.transpose() + d1 * Hh);

        if (tau > 0 && lay.mu >= 0) {
            RVec dd = RVec::Zero(L + 1);
            RMat dd2 = RMat::Zero(L + 1, L + 1);
            for (int l = 0; l < L; ++l) {
                if (!p.active(l, m)) continue;
                double gl = std::norm(p.g(l));
                dd(l) = mu * gl * d(l) * d(l);
                dd2(l, l) = -2 * mu * gl * d(l) * d(l) * d(l);
                dd2(l, L) = dd2(L, l) = gl * d(l) * d(l);
            }
            dd(L) = -b;
            gm[m] += -tau * dd / den;
            Hm[m] += tau * (dd * dd.transpose() / (den * den) - dd2 / den);
        }
    }
    for (int l = 0; l < L; ++l)
        for (int t = p.first[l]; t < M; ++t) f += x(lay.idx[l][t]) * p.C(l, t);
    if (lay.mu >= 0) f -= mu * p.Q;
    if (tau > 0)
        for (int k = 0; k < lay.n; ++k) bar -= std::log(x(k));
    out.f = f;
    out.f_bar = f + tau * bar;
    if (!deriv) return true;

    // chain rule Λ → λ via prefix sums over intervals
    for (int m = 1; m < M; ++m) {
        gm[m] += gm[m - 1];
        Hm[m] += Hm[m - 1];
    }
    out.grad.setZero(lay.n);
    out.H.setZero(lay.n, lay.n);
    for (int l = 0; l < L; ++l)
        for (int t = p.first[l]; t < M; ++t) {
            int a = lay.idx[l][t];
            out.grad(a) = p.C(l, t) + gm[t](l);
            for (int l2 = 0; l2 < L; ++l2)
                for (int t2 = p.first[l2]; t2 < M; ++t2) out.H(a, lay.idx[l2][t2]) = Hm[std::min(t, t2)](l, l2);
            if (lay.mu >= 0) out.H(a, lay.mu) = out.H(lay.mu, a) = Hm[t](l, L);
        }
    if (lay.mu >= 0) {
        out.grad(lay.mu) = -p.Q + gm[M - 1](L);
        out.H(lay.mu, lay.mu) = Hm[M - 1](L, L);
    }
    if (tau > 0)
        for (int k = 0; k < lay.n; ++k) {
            out.grad(k) -= tau / x(k);
            out.H(k, k) += tau / (x(k) * x(k));
        }
    return true;
}

// Dual function at given multipliers; +inf outside the domain.
inline double dual_value(const NormProblem& p, const RMat& lambda, double mu) {
    DualLayout lay = dual_layout(p);
    RVec x(lay.n);
    for (int l = 0; l < p.L; ++l)
        for (int t = p.first[l]; t < p.M; ++t) x(lay.idx[l][t]) = std::max(lambda(l, t), 1e-300);
    if (lay.mu >= 0) x(lay.mu) = std::max(mu, 0.0);
    DualPoint pt;
    if (!dual_eval(p, lay, x, 0, false, pt)) return std::numeric_limits<double>::infinity();
    return pt.f;
}

inline std::vector<Piece> pieces_from(const NormProblem& p, const std::vector<CVec>& w) {
    std::vector<Piece> ps;
    for (int m = 0; m < p.M; ++m) ps.push_back({m, static_cast<int>(p.I(m)), w[m]});
    return ps;
}

// Start from inverse per-BS water levels on the partition.
inline RVec dual_start(const NormProblem& p, const DualLayout& lay) {
    RVec x(lay.n);
    std::vector<int> len(p.M);
    for (int m = 0; m < p.M; ++m) len[m] = static_cast<int>(p.I(m));
    RMat Lam = RMat::Zero(p.L, p.M);
    for (int l = 0; l < p.L; ++l) {
        if (p.first[l] >= p.M) continue;
        std::vector<double> inc(p.M);
        for (int m = 0; m < p.M; ++m) inc[m] = p.C(l, m) - (m ? p.C(l, m - 1) : 0.0);
        int m = 0;
        for (const auto& s : staircase(inc, len))
            for (; m < s.end; ++m) Lam(l, m) = 1.0 / std::max(s.level, 1e-3);
        for (int t = p.first[l]; t < p.M; ++t) {
            double next = t + 1 < p.M ? Lam(l, t + 1) : 0.0;
            x(lay.idx[l][t]) = std::max(Lam(l, t) - next, 1e-3 * Lam(l, t));
        }
    }
    if (lay.mu >= 0) {
        RMat L2 = cumulative_lambda(p, lay, x);
        double bmax = 0;
        for (int m = 0; m < p.M; ++m) {
            double b = 0;
            for (int l = 0; l < p.L; ++l)
                if (p.active(l, m)) b += std::norm(p.g(l)) / L2(l, m);
            bmax = std::max(bmax, b);
        }
        x(lay.mu) = 0.5 / std::max(bmax, 1e-12);
    }
    return x;
}

struct DualRun {
    RVec x;
    double upper = std::numeric_limits<double>::infinity();
    double T = -std::numeric_limits<double>::infinity();
    std::vector<Piece> best;
    double gap = std::numeric_limits<double>::infinity();
    int iterations = 0;
};

/**
 * Barrier-continuation Newton on the dual. The barrier keeps iterates off
 * the boundary of the domain, where the dual is finite but not smooth.
 */
inline DualRun dual_newton(const NormProblem& p, const std::vector<Piece>& energy, double tol, int max_iter) {
    DualLayout lay = dual_layout(p);
    DualRun run;
    run.x = dual_start(p, lay);
    DualPoint pt;
    if (!dual_eval(p, lay, run.x, 0, false, pt)) return run;
    const double scale = std::max(std::abs(pt.f), 1.0);
    double tau = 1e-2;

    auto consider = [&](const DualPoint& q) {
        run.upper = std::min(run.upper, q.f);
        std::vector<Piece> cand = repair(p, pieces_from(p, q.w), energy);
        double T = pieces_rate(p, cand);
        if (T > run.T) {
            run.T = T;
            run.best = std::move(cand);
        }
        run.gap = rel_gap(run.upper, run.T);
    };

    while (run.iterations < max_iter && tau > 1e-17) {
        for (int inner = 0; inner < 60 && run.iterations < max_iter; ++inner) {
            if (!dual_eval(p, lay, run.x, tau * scale, true, pt)) return run;
            ++run.iterations;
            consider(pt);
            if (run.gap <= tol) return run;
            Eigen::LDLT<RMat> ldlt(pt.H);
            RVec dx = ldlt.solve(-pt.grad);
            double dec = -pt.grad.dot(dx);
            if (ldlt.info() != Eigen::Success || !dx.allFinite() || dec <= 0) {
                RMat Hr = pt.H;
                Hr.diagonal().array() += 1e-10 * std::max(pt.H.diagonal().cwiseAbs().maxCoeff(), 1.0);
                dx = Hr.ldlt().solve(-pt.grad);
                dec = -pt.grad.dot(dx);
                if (!dx.allFinite() || dec <= 0) {
                    dx = -pt.grad;
                    dec = pt.grad.squaredNorm();
                }
            }
            if (dec < 1e-13 * scale) break;
            double a = 1;
            for (int k = 0; k < lay.n; ++k)
                if (dx(k) < 0) a = std::min(a, -0.99 * run.x(k) / dx(k));
            DualPoint trial;
            bool moved = false;
            for (; a > 1e-16; a *= 0.5) {
                RVec xn = run.x + a * dx;
                if (dual_eval(p, lay, xn, tau * scale, false, trial) &&
                    trial.f_bar <= pt.f_bar - 0.25 * a * dec) {
                    run.x = xn;
                    moved = true;
                    break;
                }
            }
            if (!moved) break;
        }
        tau *= 0.1;
    }
    if (dual_eval(p, lay, run.x, 0, true, pt)) consider(pt);
    return run;
}

} // namespace swipt::detail
