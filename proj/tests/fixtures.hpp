#pragma once

#include "swipt/model.hpp"

#include <cstdint>
#include <random>

namespace fx {

using swipt::cplx;
using swipt::CVec;
using swipt::RMat;
using swipt::RVec;

inline CVec randn(int L, std::mt19937_64& rng) {
    std::normal_distribution<double> nd;
    CVec v(L);
    for (int l = 0; l < L; ++l) v(l) = cplx(nd(rng), nd(rng)) / std::sqrt(2.0);
    return v;
}

inline RMat rand_profile(int L, int N, std::mt19937_64& rng, double zero_prob = 0.2) {
    std::uniform_real_distribution<double> U(0.0, 1.0);
    RMat E(L, N);
    for (int l = 0; l < L; ++l)
        for (int n = 0; n < N; ++n) E(l, n) = U(rng) < zero_prob ? 0.0 : U(rng);
    return E;
}

/// Unit-scale scenario with σ² around 0.05 so rates are a few nats.
inline swipt::Scenario random_scenario(int L, int N, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    swipt::Scenario sc;
    sc.params.L = L;
    sc.params.N = N;
    sc.params.noise_variance = 0.05;
    sc.params.eta = 0.8;
    sc.ch.h = randn(L, rng);
    sc.ch.g = randn(L, rng);
    sc.E = rand_profile(L, N, rng);
    if (sc.E.sum() == 0) sc.E(0, 0) = 1.0;
    sc.P_H = sc.E.rowwise().mean();
    return sc;
}

// fixed hand-picked instances, oracle values are frozen against these
inline swipt::Scenario tiny_two_bs() {
    swipt::Scenario sc;
    sc.params.L = 2;
    sc.params.N = 3;
    sc.params.noise_variance = 0.05;
    sc.params.eta = 0.8;
    sc.ch.h.resize(2);
    sc.ch.g.resize(2);
    sc.ch.h << cplx(1, 0.2), cplx(0.3, -0.8);
    sc.ch.g << cplx(0.4, 0.5), cplx(-0.9, 0.3);
    sc.E.resize(2, 3);
    sc.E << 0.5, 1.2, 0.3, 0.9, 0.1, 0.7;
    return sc;
}

struct SlotFixture {
    CVec h, g;
    RVec p;
    double sigma2 = 0.1;
};

inline SlotFixture three_bs_slot() {
    SlotFixture f;
    f.h.resize(3);
    f.g.resize(3);
    f.p.resize(3);
    f.h << cplx(0.8, 0.3), cplx(-0.5, 0.9), cplx(0.2, -0.7);
    f.g << cplx(0.6, -0.2), cplx(0.4, 0.8), cplx(-0.9, 0.1);
    f.p << 1.0, 0.5, 2.0;
    return f;
}

} // namespace fx
