#pragma once

#include "swipt/detail/dual_newton.hpp"
#include "swipt/detail/interval_problem.hpp"
#include "swipt/detail/primal_ipm.hpp"
#include "swipt/detail/recovery.hpp"
#include "swipt/errors.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace swipt {

struct SolverOptions {
    double tol = 1e-9;         // target relative duality gap
    int max_newton = 800;
    double fallback_gap = 1e-7; // covariance pass when the dual stalls above this
    int max_ipm = 600;
    bool fallback = true;
    int max_rank_rounds = 10; // rank-one penalty rounds after the covariance pass
};

struct IntervalSolution {
    std::vector<Piece> pieces; // physical units, in slot order
    RMat lambda;               // L x M, per joule of the cap
    double mu = 0;             // per joule of the RF floor (pre-eta)
    double T = 0;              // nats, summed over slots
    double upper = 0;          // certified bound on the optimum
    double gap = 0;
    double rf = 0;             // Σ |gᴴw|² over slots, pre-eta
    int iterations = 0;
    bool closed_form = false;  // floor at q_max, fixed energy direction
    bool covariance = false;   // fallback pass was used
    bool split = false;        // some interval carries more than one vector
};

namespace detail {

inline IntervalSolution finish(const IntervalProblem& prob, const NormProblem& n, std::vector<Piece> ps) {
    IntervalSolution s;
    const double r = std::sqrt(n.P0);
    for (auto& p : ps) p.w *= r;
    s.pieces = std::move(ps);
    for (const auto& p : s.pieces) {
        s.T += p.count * std::log1p(abs2(inner(prob.h, p.w)) / prob.sigma2);
        s.rf += p.count * abs2(inner(prob.g, p.w));
    }
    s.lambda = RMat::Zero(n.L, n.M);
    return s;
}

} // namespace detail

/**
 * Solves the interval problem to a certified relative gap.
 * @throws InfeasibleError when the RF floor exceeds what the caps allow
 */
inline IntervalSolution solve_intervals(const IntervalProblem& prob, const SolverOptions& opt = {}) {
    using namespace detail;
    prob.validate();
    NormProblem n = normalise(prob);
    const double total = prob.C.col(prob.M() - 1).sum();
    if (!(total > 0) || !(n.gs > 0)) {
        if (prob.Q > 0) throw InfeasibleError("RF floor above deliverable energy", prob.Q);
        if (!(total > 0)) {
            std::vector<Piece> ps;
            for (int m = 0; m < n.M; ++m) ps.push_back({m, prob.I[m], CVec::Zero(n.L)});
            IntervalSolution s = finish(prob, n, ps);
            s.closed_form = true;
            return s;
        }
    }
    const double qm = qmax_of(n);
    if (n.Q > qm * (1 + 1e-9))
        throw InfeasibleError("RF floor above deliverable energy", (n.Q - qm) * n.P0 * n.gs * n.gs);

    EnergyDirection ed = energy_direction(n);
    if (n.Q > 0 && n.Q >= qm * (1 - 1e-9)) {
        // the feasible set is the fixed energy direction with causal power
        std::vector<double> inc(n.M);
        double prev = 0;
        for (int m = 0; m < n.M; ++m) {
            double c = std::max(ed.cap(m), prev);
            inc[m] = c - prev;
            prev = c;
        }
        std::vector<Piece> ps;
        int m = 0;
        for (const auto& seg : staircase(inc, prob.I))
            for (; m < seg.end; ++m) ps.push_back({m, prob.I[m], ed.w0 * std::sqrt(seg.level)});
        IntervalSolution s = finish(prob, n, ps);
        s.upper = s.T;
        s.closed_form = true;
        return s;
    }

    std::vector<Piece> energy = energy_pieces(n, ed);
    DualRun run = dual_newton(n, energy, opt.tol, opt.max_newton);
    std::vector<Piece> best = run.best;
    double T = run.T, upper = run.upper;
    RMat lam = RMat::Zero(n.L, n.M);
    double mu = 0;
    {
        DualLayout lay = dual_layout(n);
        for (int l = 0; l < n.L; ++l)
            for (int t = n.first[l]; t < n.M; ++t) lam(l, t) = run.x(lay.idx[l][t]);
        if (lay.mu >= 0) mu = run.x(lay.mu);
    }
    bool cov = false, split = false;
    if (opt.fallback && rel_gap(upper, T) > opt.fallback_gap) {
        CovarianceRun cr = covariance_ipm(n, std::min(opt.tol, 1e-10), opt.max_ipm);
        if (cr.iterations > 0) {
            Recovered rec = recover_vectors(n, cr.W);
            std::vector<Piece> ps = repair(n, rec.pieces, energy);
            double Tc = pieces_rate(n, ps);
            double bound = dual_value(n, cr.lambda, cr.mu);
            if (cr.ok) bound = std::min(bound, cr.upper);
            if (bound < upper) {
                upper = bound;
                lam = cr.lambda;
                mu = cr.mu;
            }
            if (Tc > T) {
                T = Tc;
                best = std::move(ps);
                split = rec.split;
            }
            cov = true;
            run.iterations += cr.iterations;
            if (rel_gap(upper, T) > opt.fallback_gap) {
                // single-slot blocks left at rank two cannot be shared out in
                // time; push them to rank one with a penalty on tr W - vᴴWv,
                // v the current top eigenvector
                std::vector<CMat> W = cr.W;
                double rho = 1e-2;
                for (int round = 0; round < opt.max_rank_rounds; ++round, rho *= 4) {
                    std::vector<CMat> pen(n.M, CMat::Zero(n.L, n.L));
                    bool any = false;
                    for (int m = 0; m < n.M; ++m) {
                        if (n.I(m) != 1) continue;
                        Eigen::SelfAdjointEigenSolver<CMat> es(W[m]);
                        const RVec& ev = es.eigenvalues();
                        if (!(ev(n.L - 1) > 0) || ev(n.L - 2) <= 1e-7 * ev(n.L - 1)) continue;
                        CVec v = es.eigenvectors().col(n.L - 1);
                        pen[m] = rho * (CMat::Identity(n.L, n.L) - v * v.adjoint());
                        any = true;
                    }
                    if (!any) break;
                    CovarianceRun pr = covariance_ipm(n, 1e-9, opt.max_ipm, &pen);
                    run.iterations += pr.iterations;
                    if (pr.iterations == 0) break;
                    W = pr.W;
                    Recovered rr = recover_vectors(n, W);
                    std::vector<Piece> qs = repair(n, rr.pieces, energy);
                    double Tq = pieces_rate(n, qs);
                    if (Tq > T) {
                        T = Tq;
                        best = std::move(qs);
                        split = rr.split;
                    }
                    if (rel_gap(upper, T) <= opt.fallback_gap) break;
                }
            }
        }
    }
    if (best.empty()) best = repair(n, energy, energy);
    IntervalSolution s = finish(prob, n, best);
    s.upper = upper;
    s.gap = rel_gap(upper, T);
    s.lambda = lam / n.P0;
    s.mu = n.gs > 0 ? mu / (n.P0 * n.gs * n.gs) : 0.0;
    s.iterations = run.iterations;
    s.covariance = cov;
    s.split = split;
    return s;
}

} // namespace swipt
