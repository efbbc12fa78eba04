#include "fixtures.hpp"

#include "swipt/offline_solver.hpp"
#include "swipt/online_scheduler.hpp"

#include <gtest/gtest.h>

using namespace swipt;

namespace {

Scenario constant_arrivals(int L, int N, std::uint64_t seed) {
    Scenario sc = fx::random_scenario(L, N, seed);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> U(0.2, 1.0);
    sc.P_H.resize(L);
    for (int l = 0; l < L; ++l) sc.P_H(l) = U(rng);
    for (int n = 0; n < N; ++n) sc.E.col(n) = sc.P_H;
    return sc;
}

} // namespace

TEST(Online, ConstantArrivalsGiveUnitFactor) {
    Scenario sc = constant_arrivals(3, 5, 1);
    OnlineState st = online_start(sc.P_H, 3);
    for (int n = 0; n < 5; ++n) {
        OnlineStep s = online_step(st, sc.E.col(n), 0.0, sc.ch, sc.params);
        EXPECT_TRUE(s.p.isApprox(sc.P_H, 1e-12));
        double mf = fR_value(sc.P_H, 0.0, sc.ch.h, sc.ch.g, sc.params.noise_energy());
        EXPECT_NEAR(s.rate, mf, 1e-9 * mf);
        EXPECT_EQ(s.q, 0.0);
    }
}

TEST(Online, FirstSlotFactorIsSmallestRatio) {
    Scenario sc = fx::random_scenario(3, 4, 2);
    sc.E.col(0) << 0.3, 0.9, 0.5;
    sc.P_H << 0.5, 0.6, 0.4;
    OnlineState st = online_start(sc.P_H, 3);
    OnlineStep s = online_step(st, sc.E.col(0), 0.0, sc.ch, sc.params);
    const double k = std::min({0.3 / 0.5, 0.9 / 0.6, 0.5 / 0.4});
    EXPECT_TRUE(s.p.isApprox(k * sc.P_H, 1e-12));
}

TEST(Online, BsWithoutHarvestRateIsExcluded) {
    Scenario sc = fx::random_scenario(2, 3, 3);
    sc.P_H << 0.5, 0.0;
    sc.E.col(0) << 1.0, 0.0;
    OnlineState st = online_start(sc.P_H, 2);
    OnlineStep s = online_step(st, sc.E.col(0), 0.0, sc.ch, sc.params);
    EXPECT_NEAR(s.p(0), 1.0, 1e-12);
    EXPECT_EQ(s.p(1), 0.0);
}

TEST(Online, StagedFloorsTelescopeToTarget) {
    Scenario sc = fx::random_scenario(3, 6, 4);
    const double qm = solve_qmax(sc.E, sc.ch.g, sc.params.eta).q_max;
    OnlineResult r = run_online(sc, 0.05 * qm);
    if (r.shortfall == 0) {
        double sum = 0;
        for (double q : r.q_slots) sum += q;
        EXPECT_NEAR(sum, 0.05 * qm / sc.params.eta, 1e-12 * qm);
        EXPECT_GE(r.Q, 0.05 * qm * (1 - 1e-9));
    }
}

TEST(Online, ProportionalCapacityTargetSaturatesEverySlot) {
    // the target equals η Σ fE(p_n) of the zero-target run, so each floor clamps at fE
    Scenario sc = constant_arrivals(3, 4, 5);
    OnlineResult base = run_online(sc, 0.0);
    double cap = 0;
    for (int n = 0; n < 4; ++n) cap += fE(sc.P_H, sc.ch.g);
    OnlineResult r = run_online(sc, sc.params.eta * cap);
    EXPECT_NEAR(r.Q, sc.params.eta * cap, 1e-9 * cap);
    EXPECT_LE(r.shortfall, 1e-9 * cap);
    for (double q : r.q_slots) EXPECT_NEAR(q, fE(sc.P_H, sc.ch.g), 1e-9 * cap);
    EXPECT_LT(r.T, base.T);
}

TEST(Online, LastSlotShortfallIsReported) {
    Scenario sc = fx::random_scenario(2, 4, 6);
    // power shares that disagree with the arrivals strand energy at one BS
    sc.P_H(0) *= 4;
    const double qm = solve_qmax(sc.E, sc.ch.g, sc.params.eta).q_max;
    OnlineResult r = run_online(sc, qm);
    EXPECT_GT(r.shortfall, 0.0);
    EXPECT_LT(r.Q, qm);
    EXPECT_TRUE(check_causality(r.schedule, sc.E).ok);
}

TEST(Online, ZeroTargetHasPositiveRate) {
    Scenario sc = fx::random_scenario(3, 6, 7);
    OnlineResult r = run_online(sc, 0.0);
    EXPECT_EQ(r.shortfall, 0.0);
    EXPECT_GT(r.T, 0.0);
}

TEST(Online, DeterministicReplay) {
    Scenario sc = fx::random_scenario(3, 10, 8);
    const double q = 0.3 * solve_qmax(sc.E, sc.ch.g, sc.params.eta).q_max;
    OnlineResult a = run_online(sc, q), b = run_online(sc, q);
    ASSERT_EQ(a.schedule.w.size(), b.schedule.w.size());
    for (size_t n = 0; n < a.schedule.w.size(); ++n) EXPECT_TRUE(a.schedule.w[n] == b.schedule.w[n]);
    EXPECT_EQ(a.T, b.T);
}

TEST(Online, CausalAndDominatedByOffline) {
    std::mt19937_64 rng(9);
    std::uniform_real_distribution<double> U(0, 1);
    for (int k = 0; k < 30; ++k) {
        Scenario sc = fx::random_scenario(1 + k % 3, 3 + k % 8, 700 + k);
        const double q = 0.6 * U(rng) * solve_qmax(sc.E, sc.ch.g, sc.params.eta).q_max;
        OnlineResult on = run_online(sc, q);
        EXPECT_TRUE(check_causality(on.schedule, sc.E).ok);
        EXPECT_LE(on.T, solve_offline(sc, q).T + 1e-6);
    }
}

TEST(Online, EmpiricalRatesNeedNoGroundTruth) {
    Scenario sc = fx::random_scenario(3, 8, 10);
    sc.P_H.resize(0);
    EXPECT_THROW(run_online(sc, 0.0), std::invalid_argument);
    OnlineOptions opt;
    opt.empirical_rates = true;
    OnlineResult r = run_online(sc, 0.0, opt);
    EXPECT_TRUE(check_causality(r.schedule, sc.E).ok);
    EXPECT_GT(r.T, 0.0);
}

TEST(Online, StepRejectsMisuse) {
    Scenario sc = fx::random_scenario(2, 1, 11);
    OnlineState st = online_start(sc.P_H, 2);
    EXPECT_THROW(online_step(st, RVec::Ones(3), 0.0, sc.ch, sc.params), std::invalid_argument);
    online_step(st, sc.E.col(0), 0.0, sc.ch, sc.params);
    EXPECT_THROW(online_step(st, sc.E.col(0), 0.0, sc.ch, sc.params), std::invalid_argument);
    EXPECT_THROW(run_online(sc, -1.0), std::invalid_argument);
}
