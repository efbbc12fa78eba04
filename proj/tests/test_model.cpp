#include "fixtures.hpp"

#include "swipt/model.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace swipt;

namespace {

Scenario scalar_scenario() {
    Scenario sc;
    sc.params.L = 1;
    sc.params.N = 1;
    sc.params.noise_variance = 1.0;
    sc.ch.h = CVec::Constant(1, cplx(1, 0));
    sc.ch.g = CVec::Constant(1, cplx(1, 0));
    sc.E = RMat::Constant(1, 1, 3.0);
    return sc;
}

} // namespace

TEST(Throughput, ZeroScheduleIsZero) {
    Scenario sc = fx::random_scenario(2, 4, 3);
    BeamformingSchedule s = zero_schedule(sc.params, sc.ch);
    EXPECT_EQ(throughput(s, sc.params, sc.ch.h), 0.0);
    EXPECT_EQ(rf_charged_energy(s, sc.params, sc.ch.g), 0.0);
}

TEST(Throughput, ScalarChannel) {
    Scenario sc = scalar_scenario();
    BeamformingSchedule s = make_schedule({CVec::Constant(1, std::sqrt(3.0))}, sc.params, sc.ch);
    EXPECT_NEAR(throughput(s, sc.params, sc.ch.h), std::log(4.0), 1e-15);
}

TEST(Throughput, MatchesDirectSum) {
    Scenario sc = fx::random_scenario(2, 2, 11);
    std::mt19937_64 rng(5);
    std::vector<CVec> w{fx::randn(2, rng), fx::randn(2, rng)};
    BeamformingSchedule s = make_schedule(w, sc.params, sc.ch);
    double T = 0;
    for (const auto& v : w) {
        cplx a = std::conj(sc.ch.h(0)) * v(0) + std::conj(sc.ch.h(1)) * v(1);
        T += std::log(1 + std::norm(a) / sc.params.noise_variance);
    }
    EXPECT_NEAR(throughput(s, sc.params, sc.ch.h), T, 1e-12 * T);
    double sum = 0;
    for (double r : s.per_slot_rate) sum += r;
    EXPECT_NEAR(sum, T, 1e-12 * T);
}

TEST(Throughput, NoiseScalesWithSlotLength) {
    Scenario sc = scalar_scenario();
    sc.params.slot_length = 2.0;
    BeamformingSchedule s = make_schedule({CVec::Constant(1, std::sqrt(6.0))}, sc.params, sc.ch);
    EXPECT_NEAR(throughput(s, sc.params, sc.ch.h), std::log(4.0), 1e-15);
}

TEST(RfEnergy, ScalarEvaluation) {
    Scenario sc = scalar_scenario();
    BeamformingSchedule s = make_schedule({CVec::Constant(1, std::sqrt(2.0))}, sc.params, sc.ch);
    EXPECT_NEAR(rf_charged_energy(s, sc.params, sc.ch.g), 1.6, 1e-15);
}

TEST(RfEnergy, AlignedBeamMeetsCauchySchwarz) {
    Scenario sc = fx::random_scenario(2, 3, 17);
    std::vector<CVec> w{0.5 * sc.ch.g, 1.3 * sc.ch.g, CVec::Zero(2)};
    BeamformingSchedule s = make_schedule(w, sc.params, sc.ch);
    double expect = 0;
    for (const auto& v : w) expect += sc.params.eta * v.squaredNorm() * sc.ch.g.squaredNorm();
    EXPECT_NEAR(rf_charged_energy(s, sc.params, sc.ch.g), expect, 1e-12 * expect);
}

TEST(Accessors, DimensionMismatchThrows) {
    Scenario sc = fx::random_scenario(2, 2, 1);
    EXPECT_THROW(make_schedule({CVec::Zero(3), CVec::Zero(3)}, sc.params, sc.ch), std::invalid_argument);
    BeamformingSchedule s;
    s.w = {CVec::Zero(3)};
    EXPECT_THROW(throughput(s, sc.params, sc.ch.h), std::invalid_argument);
    EXPECT_THROW(rf_charged_energy(s, sc.params, sc.ch.g), std::invalid_argument);
    EXPECT_THROW(check_causality(s, sc.E), std::invalid_argument);
}

TEST(Accessors, GlobalPhaseInvariance) {
    Scenario sc = fx::random_scenario(3, 5, 23);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> U(0, 2 * M_PI);
    std::vector<CVec> w, wr;
    for (int n = 0; n < 5; ++n) {
        w.push_back(fx::randn(3, rng));
        wr.push_back(w.back() * std::polar(1.0, U(rng)));
    }
    BeamformingSchedule a = make_schedule(w, sc.params, sc.ch), b = make_schedule(wr, sc.params, sc.ch);
    EXPECT_NEAR(throughput(a, sc.params, sc.ch.h), throughput(b, sc.params, sc.ch.h), 1e-12);
    EXPECT_NEAR(rf_charged_energy(a, sc.params, sc.ch.g), rf_charged_energy(b, sc.params, sc.ch.g), 1e-12);
}

TEST(Causality, FeasibleScheduleHolds) {
    RMat E(2, 2);
    E << 1, 1, 2, 0;
    std::vector<CVec> w{CVec::Constant(2, cplx(1, 0)), CVec::Constant(2, cplx(1, 0))};
    Scenario sc = fx::random_scenario(2, 2, 1);
    EXPECT_TRUE(check_causality(make_schedule(w, sc.params, sc.ch), E).ok);
}

TEST(Causality, OverspendInFirstSlotIsReported) {
    RMat E(2, 2);
    E << 1, 1, 2, 0;
    Scenario sc = fx::random_scenario(2, 2, 1);
    std::vector<CVec> w{CVec::Zero(2), CVec::Zero(2)};
    w[0](1) = std::sqrt(2.0 + 1e-6);
    CausalityReport r = check_causality(make_schedule(w, sc.params, sc.ch), E);
    EXPECT_FALSE(r.ok);
    EXPECT_EQ(r.bs, 1);
    EXPECT_EQ(r.slot, 0);
    EXPECT_NEAR(r.excess, 1e-6, 1e-12);
}

TEST(Causality, DeferringEverythingToTheEndIsCausal) {
    Scenario sc = fx::random_scenario(3, 6, 9);
    std::vector<CVec> w(6, CVec::Zero(3));
    for (int l = 0; l < 3; ++l) w[5](l) = std::sqrt(sc.E.row(l).sum());
    EXPECT_TRUE(check_causality(make_schedule(w, sc.params, sc.ch), sc.E).ok);
}

TEST(Causality, SlackIsAbsolute) {
    RMat E = RMat::Constant(1, 1, 1.0);
    Scenario sc = scalar_scenario();
    auto at = [&](double used) {
        return check_causality(make_schedule({CVec::Constant(1, std::sqrt(used))}, sc.params, sc.ch), E).ok;
    };
    EXPECT_TRUE(at(1.0 + 5e-10));
    EXPECT_FALSE(at(1.0 + 2e-9));
}

TEST(Validation, RejectsBadInputs) {
    Scenario sc = fx::random_scenario(2, 2, 1);
    sc.validate();
    Scenario bad = sc;
    bad.params.eta = 1.0;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad = sc;
    bad.E(0, 1) = -1;
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad = sc;
    bad.ch.g.setZero();
    EXPECT_THROW(bad.validate(), std::invalid_argument);
    bad = sc;
    bad.P_H = RVec::Ones(3);
    EXPECT_THROW(bad.validate(), std::invalid_argument);
}

TEST(Correlation, BoundsAndExtremes) {
    ChannelState ch;
    ch.h = CVec::Zero(2);
    ch.g = CVec::Zero(2);
    ch.h << cplx(1, 0), cplx(0, 0);
    ch.g << cplx(0, 0), cplx(0, 2);
    EXPECT_EQ(correlation(ch), 0.0);
    ch.g = ch.h * cplx(0, -3);
    EXPECT_NEAR(correlation(ch), 1.0, 1e-15);
    std::mt19937_64 rng(4);
    for (int k = 0; k < 50; ++k) {
        ch.h = fx::randn(3, rng);
        ch.g = fx::randn(3, rng);
        double r = correlation(ch);
        EXPECT_GE(r, 0.0);
        EXPECT_LE(r, 1.0 + 1e-15);
    }
}
