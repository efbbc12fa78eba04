#pragma once

#include "swipt/detail/interval_problem.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <limits>
#include <vector>

namespace swipt::detail {

// Log-barrier path following on the covariance form of the interval problem,
// one Hermitian block per interval restricted to the BSs that hold energy.
// Used when the dual iteration cannot certify its answer (optimum on the
// boundary of the dual domain).
struct CovarianceRun {
    std::vector<CMat> W;    // L x L per interval
    double T = 0;           // relaxation objective at W
    double upper = 0;       // T + barrier gap bound
    RMat lambda;            // L x M multiplier estimates
    double mu = 0;
    int iterations = 0;
    bool ok = false;
};

namespace ipm_detail {

struct Block {
    std::vector<int> bs; // global BS index of each local coordinate
    int off = 0;
    int k() const { return static_cast<int>(bs.size()); }
    int n() const { return k() * k(); }
};

// Real coordinates of a k x k Hermitian matrix: k diagonal entries, then
// (Re, Im) of each upper entry.
inline CMat assemble(const Block& b, const RVec& x) {
    const int k = b.k();
    CMat W = CMat::Zero(k, k);
    int j = b.off;
    for (int i = 0; i < k; ++i) W(i, i) = x(j++);
    for (int r = 0; r < k; ++r)
        for (int c = r + 1; c < k; ++c) {
            cplx z(x(j), x(j + 1));
            W(r, c) = z;
            W(c, r) = std::conj(z);
            j += 2;
        }
    return W;
}

// Gradient of X ↦ tr(X W) in the coordinates above, for Hermitian X.
inline void trace_coords(const CMat& X, RVec& out) {
    const int k = static_cast<int>(X.rows());
    out.resize(k * k);
    int j = 0;
    for (int i = 0; i < k; ++i) out(j++) = std::real(X(i, i));
    for (int r = 0; r < k; ++r)
        for (int c = r + 1; c < k; ++c) {
            out(j++) = 2 * std::real(X(c, r));
            out(j++) = -2 * std::imag(X(c, r));
        }
}

// Basis matrix of coordinate j.
inline CMat basis(int k, int j) {
    CMat B = CMat::Zero(k, k);
    if (j < k) {
        B(j, j) = 1;
        return B;
    }
    j -= k;
    for (int r = 0; r < k; ++r)
        for (int c = r + 1; c < k; ++c) {
            if (j == 0) {
                B(r, c) = B(c, r) = 1;
                return B;
            }
            if (j == 1) {
                B(r, c) = cplx(0, 1);
                B(c, r) = cplx(0, -1);
                return B;
            }
            j -= 2;
        }
    return B;
}

} // namespace ipm_detail

// `penalty`, when given, subtracts tr(P_m W_m) from the objective (P_m
// Hermitian, L x L); run.T then includes that term.
inline CovarianceRun covariance_ipm(const NormProblem& p, double tol, int max_iter,
                                    const std::vector<CMat>* penalty = nullptr) {
    using namespace ipm_detail;
    CovarianceRun run;
    const int L = p.L, M = p.M;
    std::vector<Block> blk(M);
    int n = 0;
    for (int m = 0; m < M; ++m) {
        for (int l = 0; l < L; ++l)
            if (p.active(l, m)) blk[m].bs.push_back(l);
        blk[m].off = n;
        n += blk[m].n();
    }
    run.W.assign(M, CMat::Zero(L, L));
    run.lambda = RMat::Zero(L, M);
    if (n == 0) {
        run.ok = true;
        return run;
    }

    // linear functionals
    std::vector<RVec> hy(M), gy(M);
    for (int m = 0; m < M; ++m) {
        const int k = blk[m].k();
        CVec hl(k), gl(k);
        for (int i = 0; i < k; ++i) {
            hl(i) = p.h(blk[m].bs[i]);
            gl(i) = p.g(blk[m].bs[i]);
        }
        trace_coords(hl * hl.adjoint(), hy[m]);
        trace_coords(gl * gl.adjoint(), gy[m]);
    }
    RVec pen = RVec::Zero(n);
    if (penalty)
        for (int m = 0; m < M; ++m) {
            const int k = blk[m].k();
            CMat Pm(k, k);
            for (int i = 0; i < k; ++i)
                for (int j = 0; j < k; ++j) Pm(i, j) = (*penalty)[m](blk[m].bs[i], blk[m].bs[j]);
            RVec c;
            trace_coords(Pm, c);
            pen.segment(blk[m].off, blk[m].n()) = c;
        }
    struct Cons {
        int l, m;
        std::vector<std::pair<int, double>> a; // sparse coefficients
    };
    std::vector<Cons> cons;
    for (int l = 0; l < L; ++l)
        for (int m = p.first[l]; m < M; ++m) {
            Cons c{l, m, {}};
            for (int t = 0; t <= m; ++t)
                for (int i = 0; i < blk[t].k(); ++i)
                    if (blk[t].bs[i] == l) c.a.push_back({blk[t].off + i, p.I(t)});
            cons.push_back(std::move(c));
        }
    const bool useQ = p.Q > 0;
    RVec rfa = RVec::Zero(n);
    for (int m = 0; m < M; ++m) rfa.segment(blk[m].off, blk[m].n()) = p.I(m) * gy[m];
    const double mbar = [&] {
        double s = static_cast<double>(cons.size()) + (useQ ? 1 : 0);
        for (const auto& b : blk) s += b.k();
        return s;
    }();

    auto slack = [&](const RVec& x, int i) {
        double s = p.C(cons[i].l, cons[i].m);
        for (auto [j, a] : cons[i].a) s -= a * x(j);
        return s;
    };

    // strictly feasible start along the energy direction
    RVec x = RVec::Zero(n);
    {
        EnergyDirection ed = energy_direction(p);
        std::vector<Piece> ep = energy_pieces(p, ed);
        double qm = qmax_of(p);
        double shrink = useQ ? 0.5 * (1 - p.Q / qm) : 0.5;
        for (int m = 0; m < M; ++m) {
            const int k = blk[m].k();
            CVec v(k);
            for (int i = 0; i < k; ++i) v(i) = ep[m].w(blk[m].bs[i]);
            RVec c;
            trace_coords(v * v.adjoint(), c);
            // trace_coords gives tr(X·B_j); undo the factor on off-diagonal pairs
            for (int j = k; j < k * k; ++j) c(j) *= 0.5;
            x.segment(blk[m].off, k * k) = (1 - shrink) * c;
        }
        double smin = std::numeric_limits<double>::infinity();
        for (size_t i = 0; i < cons.size(); ++i) smin = std::min(smin, slack(x, static_cast<int>(i)));
        double eps = 0.5 * smin / p.I.sum();
        for (int m = 0; m < M; ++m)
            for (int i = 0; i < blk[m].k(); ++i) x(blk[m].off + i) += eps;
    }

    auto objective = [&](const RVec& z) {
        double T = 0;
        for (int m = 0; m < M; ++m) T += p.I(m) * std::log1p(hy[m].dot(z.segment(blk[m].off, blk[m].n())));
        return T - pen.dot(z);
    };
    // barrier value; NaN outside the domain
    auto value = [&](const RVec& z, double t) {
        double v = t * objective(z);
        for (int m = 0; m < M; ++m) {
            Eigen::LLT<CMat> llt(assemble(blk[m], z));
            if (llt.info() != Eigen::Success) return std::numeric_limits<double>::quiet_NaN();
            for (int i = 0; i < blk[m].k(); ++i) {
                double dii = std::real(llt.matrixLLT()(i, i));
                if (!(dii > 0)) return std::numeric_limits<double>::quiet_NaN();
                v += 2 * std::log(dii);
            }
        }
        for (size_t i = 0; i < cons.size(); ++i) {
            double s = slack(z, static_cast<int>(i));
            if (!(s > 0)) return std::numeric_limits<double>::quiet_NaN();
            v += std::log(s);
        }
        if (useQ) {
            double r = rfa.dot(z) - p.Q;
            if (!(r > 0)) return std::numeric_limits<double>::quiet_NaN();
            v += std::log(r);
        }
        return v;
    };

    double t = 1.0;
    RVec grad(n);
    RMat H(n, n);
    bool stuck = false;
    while (run.iterations < max_iter && !stuck) {
        for (int inner = 0; inner < 100 && run.iterations < max_iter; ++inner) {
            ++run.iterations;
            grad = -t * pen;
            H.setZero();
            for (int m = 0; m < M; ++m) {
                const Block& b = blk[m];
                const int k = b.k(), nb = b.n();
                CMat Wi = assemble(b, x).inverse();
                RVec gW;
                trace_coords(Wi, gW);
                double y = hy[m].dot(x.segment(b.off, nb));
                grad.segment(b.off, nb) += t * p.I(m) * hy[m] / (1 + y) + gW;
                std::vector<CMat> Y(nb);
                for (int j = 0; j < nb; ++j) Y[j] = Wi * basis(k, j);
                for (int i = 0; i < nb; ++i)
                    for (int j = i; j < nb; ++j) {
                        double v = -std::real((Y[i] * Y[j]).trace());
                        H(b.off + i, b.off + j) += v;
                        if (i != j) H(b.off + j, b.off + i) += v;
                    }
                H.block(b.off, b.off, nb, nb) -= t * p.I(m) * hy[m] * hy[m].transpose() / ((1 + y) * (1 + y));
            }
            for (size_t i = 0; i < cons.size(); ++i) {
                double s = slack(x, static_cast<int>(i));
                for (auto [j, a] : cons[i].a) {
                    grad(j) -= a / s;
                    for (auto [j2, a2] : cons[i].a) H(j, j2) -= a * a2 / (s * s);
                }
            }
            if (useQ) {
                double r = rfa.dot(x) - p.Q;
                grad += rfa / r;
                H -= rfa * rfa.transpose() / (r * r);
            }
            RMat K = -H;
            Eigen::LLT<RMat> llt(K);
            if (llt.info() != Eigen::Success) {
                K.diagonal().array() += 1e-12 * K.diagonal().cwiseAbs().maxCoeff();
                llt.compute(K);
                if (llt.info() != Eigen::Success) {
                    stuck = true;
                    break;
                }
            }
            RVec dx = llt.solve(grad);
            double dec = grad.dot(dx);
            if (dec / 2 < 1e-9) break;
            double v0 = value(x, t);
            double a = 1;
            bool moved = false;
            for (; a > 1e-14; a *= 0.5) {
                double v = value(x + a * dx, t);
                if (std::isfinite(v) && v >= v0 + 0.25 * a * dec) {
                    x += a * dx;
                    moved = true;
                    break;
                }
            }
            if (!moved) break;
        }
        run.T = objective(x);
        if (stuck) break;
        if (mbar / t <= tol * std::max(run.T, 1.0)) {
            run.ok = true;
            break;
        }
        t *= 15;
    }
    run.upper = run.T + mbar / t;
    for (int m = 0; m < M; ++m) {
        CMat Wm = assemble(blk[m], x);
        for (int i = 0; i < blk[m].k(); ++i)
            for (int j = 0; j < blk[m].k(); ++j) run.W[m](blk[m].bs[i], blk[m].bs[j]) = Wm(i, j);
    }
    for (size_t i = 0; i < cons.size(); ++i)
        run.lambda(cons[i].l, cons[i].m) = 1 / (t * slack(x, static_cast<int>(i)));
    if (useQ) run.mu = 1 / (t * (rfa.dot(x) - p.Q));
    return run;
}

} // namespace swipt::detail
