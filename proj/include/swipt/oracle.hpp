#pragma once

// Brute-force reference values for the tests. Nothing in here is used by the
// solvers themselves.

#include "swipt/energymax.hpp"
#include "swipt/model.hpp"
#include "swipt/slot_solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

namespace swipt::oracle {

/// Best η·Σ|gᴴw_n|² over random directions, each filled greedily with as much
/// causal energy as it can carry, then refined by a random walk from the best
/// one. Phases are set to those of g before evaluation. `inject` adds one
/// direction to the pool.
inline double random_search_qmax(const Scenario& sc, long samples, std::uint64_t seed, const CVec* inject = nullptr) {
    if (samples < 1) throw std::invalid_argument("random_search_qmax: samples must be >= 1");
    const int L = sc.params.L, N = sc.params.N;
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd;
    // causality only sees |u_l|, so each candidate is first phase-aligned with g
    auto align = [&](CVec& u) {
        for (int l = 0; l < L; ++l) {
            const double a = std::abs(sc.ch.g(l));
            u(l) = std::abs(u(l)) * (a > 0 ? sc.ch.g(l) / a : cplx(1, 0));
        }
    };
    auto value = [&](CVec u) {
        align(u);
        double spent = 0;
        RVec cum = RVec::Zero(L);
        for (int n = 0; n < N; ++n) {
            cum += sc.E.col(n);
            double cap = std::numeric_limits<double>::infinity();
            for (int l = 0; l < L; ++l)
                if (std::norm(u(l)) > 0) cap = std::min(cap, cum(l) / std::norm(u(l)));
            if (std::isfinite(cap) && cap > spent) spent = cap;
        }
        return sc.params.eta * abs2(inner(sc.ch.g, u)) * spent;
    };
    double best = 0;
    CVec arg = CVec::Zero(L);
    if (inject && inject->norm() > 0) {
        arg = *inject / inject->norm();
        best = value(arg);
    }
    CVec u(L);
    for (long s = 0; s < samples; ++s) {
        for (int l = 0; l < L; ++l) u(l) = cplx(nd(rng), nd(rng));
        u /= u.norm();
        if (double v = value(u); v > best) best = v, arg = u;
    }
    // as many again on a shrinking random walk from the best sample
    double step = 0.3;
    for (long s = 0; s < samples && best > 0; ++s) {
        for (int l = 0; l < L; ++l) u(l) = arg(l) + step * cplx(nd(rng), nd(rng));
        u /= u.norm();
        if (double v = value(u); v > best) {
            best = v;
            arg = u;
            step *= 1.5;
        } else {
            step = std::max(step * 0.98, 1e-9);
        }
    }
    return best;
}

/**
 * Exhaustive search over per-BS amplitudes and phases of one slot, followed by
 * zoomed grids around the best few points. Phases are measured from those of
 * g so that the energy beam lies on the grid.
 * @return best rate among q-feasible grid points (-inf if none)
 */
inline double grid_search_fR(const SlotProblem& sp, int density, int zoom_rounds = 8, int seeds = 4) {
    sp.validate();
    if (density < 2) throw std::invalid_argument("grid_search_fR: density must be >= 2");
    const int L = static_cast<int>(sp.p.size());
    const RVec amax = sp.p.cwiseSqrt();
    RVec gph(L);
    for (int l = 0; l < L; ++l) gph(l) = std::arg(sp.g(l));
    constexpr double none = -std::numeric_limits<double>::infinity();

    struct Hit {
        double rate;
        RVec a, f;
    };
    // scans the box centre ± half-width with n points per axis; keeps the top k
    auto scan = [&](const RVec& ca, const RVec& ra, const RVec& cf, const RVec& rf, int na, int nf, bool full_circle,
                    size_t k) {
        std::vector<Hit> top;
        std::vector<int> idx(2 * L - 1, 0);
        RVec a(L), f = RVec::Zero(L);
        CVec w(L);
        while (true) {
            for (int l = 0; l < L; ++l)
                a(l) = std::clamp(ca(l) - ra(l) + 2 * ra(l) * idx[l] / (na - 1), 0.0, amax(l));
            for (int l = 1; l < L; ++l) {
                int i = idx[L + l - 1];
                f(l) = full_circle ? 2 * M_PI * i / nf : cf(l) - rf(l) + 2 * rf(l) * i / (nf - 1);
            }
            for (int l = 0; l < L; ++l) w(l) = std::polar(a(l), gph(l) + f(l));
            if (abs2(inner(sp.g, w)) >= sp.q) {
                double r = std::log1p(abs2(inner(sp.h, w)) / sp.sigma2);
                if (top.size() < k || r > top.back().rate) {
                    top.push_back({r, a, f});
                    std::sort(top.begin(), top.end(), [](const Hit& x, const Hit& y) { return x.rate > y.rate; });
                    if (top.size() > k) top.pop_back();
                }
            }
            int d = 0;
            for (; d < 2 * L - 1; ++d) {
                if (++idx[d] < (d < L ? na : nf)) break;
                idx[d] = 0;
            }
            if (d == 2 * L - 1) break;
        }
        return top;
    };

    const int nf0 = 2 * density;
    std::vector<Hit> start = scan(amax / 2, amax / 2, RVec::Zero(L), RVec::Zero(L), density, nf0, true,
                                  static_cast<size_t>(seeds));
    double best = none;
    for (const Hit& h0 : start) {
        Hit cur = h0;
        RVec ra = amax / (density - 1), rf = RVec::Constant(L, 2 * M_PI / nf0);
        for (int round = 0; round < zoom_rounds; ++round) {
            std::vector<Hit> t = scan(cur.a, ra, cur.f, rf, density, density, false, 1);
            if (!t.empty() && t.front().rate >= cur.rate) cur = t.front();
            ra *= 2.0 / (density - 1);
            rf *= 2.0 / (density - 1);
        }
        best = std::max(best, cur.rate);
    }
    return best;
}

/// Worst α·f(x̂) + (1-α)·f(x̌) - f(αx̂ + (1-α)x̌) over random feasible pairs.
/// f is the value of the covariance relaxation by default; with rank_one set
/// it is the rate of the returned beamformer, which need not be concave.
inline double concavity_probe(const CVec& h, const CVec& g, double sigma2, int trials, std::uint64_t seed,
                              bool rank_one = false) {
    const int L = static_cast<int>(h.size());
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    auto f = [&](const RVec& p, double q) {
        SlotSolution s;
        try {
            s = solve_fR({p, q, h, g, sigma2});
        } catch (const NotConverged<SlotSolution>& e) {
            s = e.best();
        }
        return rank_one ? s.rate : s.relaxed;
    };
    double worst = -std::numeric_limits<double>::infinity();
    for (int t = 0; t < trials; ++t) {
        RVec p1(L), p2(L);
        for (int l = 0; l < L; ++l) {
            p1(l) = U(rng);
            p2(l) = U(rng);
        }
        // strictly inside [0, fE) where strict concavity is claimed
        double q1 = 0.999 * U(rng) * fE(p1, g), q2 = 0.999 * U(rng) * fE(p2, g);
        double a = U(rng);
        double v = a * f(p1, q1) + (1 - a) * f(p2, q2) - f(a * p1 + (1 - a) * p2, a * q1 + (1 - a) * q2);
        worst = std::max(worst, v);
    }
    return worst;
}

/**
 * Stochastic search over causal per-slot beamformers for tiny horizons.
 * Each slot spends a fraction s_{l,n} ∈ [0,1] of what BS l holds, with
 * free per-BS phases; only points meeting the RF target are accepted.
 * @param q RF target (J, post-eta)
 * @return best throughput found (nats), -inf if no feasible point was seen
 */
inline double offline_bruteforce(const Scenario& sc, double q, std::uint64_t seed, int restarts = 40,
                                 int iters = 60000) {
    const int L = sc.params.L, N = sc.params.N;
    // the target is met up to rounding in the accumulated RF energy
    const double Q = q / sc.params.eta * (1 - 1e-12), s2 = sc.params.noise_energy();
    const int D = 2 * L * N; // fractions then phases
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.0, 1.0);
    std::normal_distribution<double> nd;

    auto eval = [&](const RVec& x, double& rf) {
        RVec b = RVec::Zero(L);
        double T = 0;
        rf = 0;
        CVec w(L);
        for (int n = 0; n < N; ++n) {
            b += sc.E.col(n);
            for (int l = 0; l < L; ++l) {
                double use = std::clamp(x(n * L + l), 0.0, 1.0) * b(l);
                b(l) -= use;
                w(l) = std::polar(std::sqrt(use), x(L * N + n * L + l));
            }
            T += std::log1p(abs2(inner(sc.ch.h, w)) / s2);
            rf += abs2(inner(sc.ch.g, w));
        }
        return T;
    };

    // the fixed-direction energy schedule is feasible for every q ≤ q_max
    RVec start(D);
    {
        EnergyMaxSolution em = solve_qmax(sc.E, sc.ch.g, sc.params.eta);
        RVec b = RVec::Zero(L);
        for (int n = 0; n < N; ++n) {
            b += sc.E.col(n);
            for (int l = 0; l < L; ++l) {
                double use = em.P[n] * std::norm(em.w0(l));
                start(n * L + l) = b(l) > 0 ? std::min(use / b(l), 1.0) : 0.0;
                b(l) -= std::min(use, b(l));
                start(L * N + n * L + l) = std::arg(em.w0(l));
            }
        }
    }
    double best = -std::numeric_limits<double>::infinity();
    RVec xbest = start;
    for (int r = 0; r < restarts; ++r) {
        RVec x(D);
        if (r == 0) {
            x = start;
        } else if (r % 3 == 0) {
            x = xbest;
        } else {
            for (int k = 0; k < L * N; ++k) x(k) = U(rng);
            for (int k = L * N; k < D; ++k) x(k) = 2 * M_PI * U(rng);
            double rf;
            eval(x, rf);
            if (rf < Q) x = start;
        }
        double rf;
        double fx = eval(x, rf);
        if (rf < Q) continue;
        double step = r % 3 == 0 ? 0.02 : 0.3;
        for (int it = 0; it < iters && step > 1e-12; ++it) {
            RVec y = x;
            if (it % 2 == 0) {
                int k = static_cast<int>(U(rng) * D) % D;
                y(k) += step * nd(rng) * (k < L * N ? 1.0 : M_PI);
            } else {
                for (int k = 0; k < D; ++k) y(k) += step * nd(rng) * (k < L * N ? 1.0 : M_PI) / std::sqrt(D);
            }
            for (int k = 0; k < L * N; ++k) y(k) = std::clamp(y(k), 0.0, 1.0);
            double fy = eval(y, rf);
            if (rf < Q && fy >= fx) {
                // pull the phases toward g until the target is met again
                RVec aligned = y;
                for (int n = 0; n < N; ++n) {
                    double ref = y(L * N + n * L) - std::arg(sc.ch.g(0));
                    for (int l = 0; l < L; ++l) {
                        double tgt = std::arg(sc.ch.g(l)) + ref;
                        double& ph = aligned(L * N + n * L + l);
                        ph += std::remainder(tgt - ph, 2 * M_PI);
                    }
                }
                double lo = 0, hi = 1, r2;
                eval(aligned, r2);
                if (r2 >= Q) {
                    for (int b = 0; b < 40; ++b) {
                        double mid = 0.5 * (lo + hi);
                        eval(y + mid * (aligned - y), r2);
                        (r2 >= Q ? hi : lo) = mid;
                    }
                    y += hi * (aligned - y);
                    fy = eval(y, rf);
                }
            }
            if (rf >= Q && fy >= fx) {
                x = y;
                fx = fy;
                step *= 1.5;
            } else {
                step *= 0.97;
            }
        }
        if (fx > best) {
            best = fx;
            xbest = x;
        }
    }
    return best;
}

} // namespace swipt::oracle
