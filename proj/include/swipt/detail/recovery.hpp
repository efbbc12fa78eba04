#pragma once

#include "swipt/detail/interval_problem.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <vector>

namespace swipt::detail {

struct Recovered {
    std::vector<Piece> pieces;
    bool split = false;
    int rank_two = 0;
};

/**
 * Beamformers from per-interval covariances.
 *
 * Rank-one blocks give their principal vector. Rank-two blocks carry, on top
 * of the data beam, an energy component e2 with hᴴe2 = 0. Spreading that
 * component over the slots of the interval with phases summing to zero
 * reproduces the covariance exactly in every linear functional of the
 * interval total. Single-slot intervals hand their e2 share to another
 * rank-two interval as far as the per-BS slack allows; what stays becomes the
 * best-RF vector wb + c e2 within the block's per-BS power.
 */
inline Recovered recover_vectors(const NormProblem& p, const std::vector<CMat>& W, double rank_tol = 1e-5) {
    const int L = p.L, M = p.M;
    Recovered out;
    std::vector<int> two;
    std::vector<CVec> principal(M, CVec::Zero(L));
    for (int m = 0; m < M; ++m) {
        Eigen::SelfAdjointEigenSolver<CMat> es(W[m]);
        const RVec& ev = es.eigenvalues();
        double top = ev(L - 1);
        if (top > 0) principal[m] = std::sqrt(top) * es.eigenvectors().col(L - 1);
        if (L >= 2 && top > 0 && ev(L - 2) > rank_tol * top) two.push_back(m);
    }
    out.rank_two = static_cast<int>(two.size());

    std::vector<std::vector<CVec>> slots(M);
    if (!two.empty()) {
        CMat S = CMat::Zero(L, L);
        for (int m : two) S += p.I(m) * W[m];
        Eigen::SelfAdjointEigenSolver<CMat> es(S);
        CMat U = es.eigenvectors().rightCols(2);
        CVec a = U.adjoint() * p.h;
        if (a.norm() > 1e-12) {
            CVec c(2);
            c << std::conj(a(1)), -std::conj(a(0));
            CVec e1 = U * (a / a.norm());
            CVec e2 = U * (c / c.norm());
            const cplx ge2 = p.g.dot(e2);
            // coherent part and the energy-only excess of every rank-two block
            std::vector<CVec> wb(M);
            std::vector<double> excess(M, 0.0); // interval total along e2 e2ᴴ
            std::vector<char> in(M, 0);
            for (int m : two) {
                double alpha = std::real(e1.dot(W[m] * e1));
                if (!(alpha > 0)) continue;
                cplx z = e1.dot(W[m] * e2);
                double y = std::real(e2.dot(W[m] * e2));
                wb[m] = std::sqrt(alpha) * e1 + (std::conj(z) / std::sqrt(alpha)) * e2;
                excess[m] = p.I(m) * std::max(y - std::norm(z) / alpha, 0.0);
                in[m] = 1;
            }
            // single-slot blocks cannot carry the excess; shift it to a later
            // block (always causal) or, when the slack allows, an earlier one
            RMat slack = p.C;
            {
                RMat use = RMat::Zero(L, M);
                for (int m = 0; m < M; ++m)
                    for (int l = 0; l < L; ++l) use(l, m) = p.I(m) * std::real(W[m](l, l)) + (m ? use(l, m - 1) : 0.0);
                slack -= use;
            }
            // largest share of an excess that fits the slack between t0 and t1
            auto share = [&](double ex, int t0, int t1) {
                double f = 1;
                for (int l = 0; l < L; ++l) {
                    const double need = ex * std::norm(e2(l)) * (1 + 1e-9);
                    for (int t = t0; t < t1; ++t)
                        if (need > 0) f = std::min(f, std::max(slack(l, t), 0.0) / need);
                }
                return f;
            };
            for (int m = 0; m < M; ++m) {
                if (!in[m] || p.I(m) >= 2 || excess[m] <= 0) continue;
                int to = -1;
                for (int k = m + 1; k < M && to < 0; ++k)
                    if (in[k] && p.I(k) >= 2) to = k;
                if (to >= 0) {
                    excess[to] += excess[m];
                    excess[m] = 0;
                    continue;
                }
                for (int k = m - 1; k >= 0 && excess[m] > 0; --k) {
                    if (!in[k] || p.I(k) < 2) continue;
                    const double moved = share(excess[m], k, m) * excess[m];
                    if (!(moved > 0)) continue;
                    for (int l = 0; l < L; ++l)
                        for (int t = k; t < m; ++t) slack(l, t) -= moved * std::norm(e2(l));
                    excess[k] += moved;
                    excess[m] -= moved;
                }
            }
            for (int m = 0; m < M; ++m) {
                if (!in[m]) continue;
                const int I = static_cast<int>(p.I(m));
                if (I >= 2 && excess[m] > 0) {
                    CVec dv = std::sqrt(excess[m] / I) * e2;
                    // first slot takes the sign that lowers the largest cross term
                    double worst = 0;
                    for (int l = 0; l < L; ++l) {
                        double x = 2 * std::real(std::conj(wb[m](l)) * dv(l));
                        if (std::abs(x) > std::abs(worst)) worst = x;
                    }
                    double s0 = worst > 0 ? -1.0 : 1.0;
                    std::vector<cplx> ph;
                    int rest = I;
                    if (I % 2 == 1) {
                        const double tw = 2.0 * M_PI / 3.0;
                        for (int k = 0; k < 3; ++k) ph.push_back(s0 * std::polar(1.0, tw * k));
                        rest -= 3;
                    }
                    for (int k = 0; k < rest; ++k) ph.push_back(k % 2 == 0 ? s0 : -s0);
                    for (int k = 0; k < I; ++k) slots[m].push_back(wb[m] + ph[k] * dv);
                } else if (excess[m] > 0 && std::abs(ge2) > 1e-14) {
                    // one vector wb + c e2 within the per-BS power of the block, best RF
                    const cplx gam = p.g.dot(wb[m]);
                    auto reach = [&](cplx u) {
                        double r = std::numeric_limits<double>::infinity();
                        for (int l = 0; l < L; ++l) {
                            const double a = std::norm(e2(l));
                            if (a <= 0) continue;
                            const double b = std::real(std::conj(wb[m](l)) * u * e2(l));
                            const double c = -excess[m] * a;
                            r = std::min(r, (-b + std::sqrt(b * b - a * c)) / a);
                        }
                        return std::isfinite(r) ? r : 0.0;
                    };
                    auto value = [&](double th) {
                        const cplx u = std::polar(1.0, th);
                        return std::abs(gam + reach(u) * u * ge2);
                    };
                    const int K = 360;
                    double best = 0, bv = value(0);
                    for (int k = 1; k < K; ++k) {
                        double th = 2 * M_PI * k / K, v = value(th);
                        if (v > bv) bv = v, best = th;
                    }
                    for (double step = M_PI / K; step > 1e-10; step *= 0.5)
                        for (double th : {best - step, best + step})
                            if (double v = value(th); v > bv) bv = v, best = th;
                    const cplx u = std::polar(1.0, best);
                    principal[m] = wb[m] + reach(u) * u * e2;
                } else {
                    principal[m] = wb[m];
                }
            }
        }
    }
    for (int m = 0; m < M; ++m) {
        if (!slots[m].empty()) {
            out.split = true;
            for (const auto& w : slots[m]) out.pieces.push_back({m, 1, w});
        } else {
            out.pieces.push_back({m, static_cast<int>(p.I(m)), principal[m]});
        }
    }
    return out;
}

} // namespace swipt::detail
