#include "fixtures.hpp"

#include "swipt/experiment.hpp"
#include "swipt/io.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace swipt;

namespace {

ScenarioConfig small_config(int trials = 4, int N = 8) {
    ScenarioConfig c;
    c.N = N;
    c.trials = trials;
    c.rng_seed = 17;
    return c;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

} // namespace

TEST(Config, DefaultsMatchPublishedSetup) {
    ScenarioConfig c;
    EXPECT_EQ(c.L(), 3);
    EXPECT_EQ(c.N, 60);
    EXPECT_EQ(c.pathloss_exponent, 2.5);
    EXPECT_EQ(c.N0, 1e-15);
    EXPECT_EQ(c.eta, 0.8);
    EXPECT_EQ(c.poisson_means, (std::vector<double>{0.1, 0.1, 0.1}));
    EXPECT_EQ(c.distances(c.dr_position, c.dr_distances), (std::vector<double>{29, 29, 29}));
    EXPECT_EQ(c.distances(c.er_position, c.er_distances), (std::vector<double>{10, 40, 45.8}));
    EXPECT_DOUBLE_EQ(c.sigma2(), 1e-9);
}

TEST(Config, GeometryIsAnEquilateralTriangle) {
    ScenarioConfig c;
    for (int i = 0; i < 3; ++i) {
        const Point& a = c.bs_positions[i];
        const Point& b = c.bs_positions[(i + 1) % 3];
        EXPECT_NEAR(std::hypot(a[0] - b[0], a[1] - b[1]), 50.0, 1e-6);
    }
    c.dr_distances.clear();
    for (double d : c.distances(c.dr_position, c.dr_distances)) EXPECT_NEAR(d, 50 / std::sqrt(3.0), 1e-6);
}

TEST(Config, ValidationRejectsBadValues) {
    ScenarioConfig c;
    c.trials = 0;
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = ScenarioConfig{};
    c.er_distances = {10, 0, 45.8};
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c = ScenarioConfig{};
    c.er_distances.clear();
    c.er_position = c.bs_positions[1];
    EXPECT_THROW(generate_scenario(c, 1), std::invalid_argument);
    c = ScenarioConfig{};
    c.poisson_means = {0.1, 0.1};
    EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(Config, JsonRoundTripAndUnknownField) {
    ScenarioConfig c = small_config();
    c.poisson_means = {0.2, 0.05, 0.1};
    ScenarioConfig back = config_from_json(config_to_json(c));
    EXPECT_EQ(back.poisson_means, c.poisson_means);
    EXPECT_EQ(back.N, c.N);
    json j = config_to_json(c);
    j["typo"] = 1;
    EXPECT_THROW(config_from_json(j), std::invalid_argument);
}

TEST(Scenario, ChannelStatisticsAndNoise) {
    ScenarioConfig c;
    c.N = 1;
    const double d = 29.0;
    double mean = 0;
    const int K = 20000;
    for (int t = 0; t < K; ++t) {
        Scenario sc = generate_scenario(c, 3, t);
        mean += std::norm(sc.ch.h(0));
        EXPECT_EQ(sc.params.noise_variance, 1e-9);
    }
    mean /= K;
    // exp(1) fading: mean gain 1e-3 / d^2.5, standard error ~0.7%
    EXPECT_NEAR(mean / (1e-3 / std::pow(d, 2.5)), 1.0, 0.03);
}

TEST(Scenario, ArrivalsAreQuantisedPoisson) {
    ScenarioConfig c;
    c.N = 2000;
    Scenario sc = generate_scenario(c, 4);
    for (int l = 0; l < 3; ++l) {
        EXPECT_NEAR(sc.E.row(l).mean(), 0.1, 0.005);
        for (int n = 0; n < 50; ++n) {
            double k = sc.E(l, n) / 0.01;
            EXPECT_NEAR(k, std::round(k), 1e-9);
        }
    }
    c.poisson_means = {0.1, 0.0, 0.1};
    EXPECT_EQ(generate_scenario(c, 4).E.row(1).sum(), 0.0);
}

TEST(Scenario, SeedDeterminism) {
    ScenarioConfig c = small_config();
    Scenario a = generate_scenario(c, 5, 2), b = generate_scenario(c, 5, 2), d = generate_scenario(c, 5, 3);
    EXPECT_EQ(scenario_to_json(a).dump(), scenario_to_json(b).dump());
    EXPECT_NE(scenario_to_json(a).dump(), scenario_to_json(d).dump());
}

TEST(Scenario, JsonFieldsRoundTrip) {
    Scenario sc = generate_scenario(small_config(), 6);
    json j = scenario_to_json(sc);
    for (const char* k : {"L", "N", "slot_length", "noise_variance", "eta", "h_re", "h_im", "g_re", "g_im", "E"})
        EXPECT_TRUE(j.contains(k)) << k;
    Scenario back = scenario_from_json(j);
    EXPECT_TRUE(back.ch.h == sc.ch.h);
    EXPECT_TRUE(back.E == sc.E);
    j["N"] = 3;
    EXPECT_THROW(scenario_from_json(j), std::invalid_argument);
}

TEST(Units, Conversions) {
    Scenario sc = generate_scenario(small_config(1, 10), 1);
    EXPECT_NEAR(to_uW(3e-5, sc), 3.0, 1e-12);
    EXPECT_NEAR(from_uW(3.0, sc), 3e-5, 1e-18);
    EXPECT_NEAR(to_mbps(10 * std::log(2.0), sc), 1.0, 1e-12);
}

TEST(Experiment, ZeroTargetOfflineMeanIsPerTrialMean) {
    ScenarioConfig c = small_config(3);
    ExperimentResult r = run_experiment(c, {Scheme::offline}, {{0.0}, false});
    double mean = 0;
    for (int t = 0; t < 3; ++t) {
        Scenario sc = generate_scenario(c, c.rng_seed, t);
        mean += to_mbps(solve_offline(sc, 0.0).T, sc) / 3;
    }
    ASSERT_EQ(r.means.size(), 1u);
    EXPECT_NEAR(r.means[0].r_avg_mbps, mean, 1e-12 * mean);
}

TEST(Experiment, RecordsAreSortedAndBounded) {
    ExperimentOptions opt;
    opt.threads = 3;
    ExperimentResult r =
        run_experiment(small_config(5), {Scheme::baseline, Scheme::offline}, {{0.0, 0.5, 1.0}, true}, opt);
    ASSERT_EQ(r.records.size(), 30u);
    EXPECT_EQ(r.records.front().scheme, Scheme::baseline);
    for (size_t i = 1; i < r.records.size(); ++i) {
        const auto& a = r.records[i - 1];
        const auto& b = r.records[i];
        if (a.scheme == b.scheme && a.q_index == b.q_index) {
            EXPECT_LT(a.trial, b.trial);
        }
    }
    for (const auto& t : r.records) {
        EXPECT_GE(t.r_avg_mbps, 0.0);
        EXPECT_GE(t.q_got_uW, 0.0);
        EXPECT_GE(t.rho, 0.0);
        EXPECT_LE(t.rho, 1.0);
        EXPECT_EQ(t.status, Status::ok);
    }
}

TEST(Experiment, OfflineDominatesOnAverage) {
    ExperimentResult r = run_experiment(small_config(4), {Scheme::offline, Scheme::online, Scheme::baseline},
                                        {{0.0, 0.2, 0.5}, true});
    for (int i = 0; i < 3; ++i) {
        const double off = r.means[i].r_avg_mbps;
        EXPECT_GE(off, r.means[3 + i].r_avg_mbps - 1e-9);
        EXPECT_GE(off, r.means[6 + i].r_avg_mbps - 1e-9);
    }
}

TEST(Experiment, MissedTargetEarnsNothing) {
    ScenarioConfig c = small_config(2);
    ExperimentResult r = run_experiment(c, {Scheme::offline}, {{1e6}, false});
    for (const auto& t : r.records) {
        EXPECT_EQ(t.status, Status::infeasible);
        EXPECT_EQ(t.r_avg_mbps, 0.0);
        EXPECT_FALSE(t.message.empty());
    }
}

TEST(Experiment, RejectsBadGrids) {
    ScenarioConfig c = small_config(1);
    EXPECT_THROW(run_experiment(c, {}, {{0.0}, false}), std::invalid_argument);
    EXPECT_THROW(run_experiment(c, {Scheme::offline}, {{}, false}), std::invalid_argument);
    EXPECT_THROW(run_experiment(c, {Scheme::offline}, {{1.5}, true}), std::invalid_argument);
    EXPECT_THROW(scheme_from("joint"), std::invalid_argument);
}

TEST(Emit, EmptyResultIsHeaderOnly) {
    EXPECT_EQ(to_csv(ExperimentResult{}), "scheme,q_avg_uW,r_avg_mbps,rho,trial\n");
}

TEST(Emit, CsvIsDeterministicAcrossThreadCounts) {
    ExperimentOptions one, many;
    one.threads = 1;
    many.threads = 4;
    QGrid g{{0.0, 0.3}, true};
    ScenarioConfig c = small_config(4);
    EXPECT_EQ(to_csv(run_experiment(c, {Scheme::online, Scheme::offline}, g, one)),
              to_csv(run_experiment(c, {Scheme::online, Scheme::offline}, g, many)));
}

TEST(Emit, JsonRowParsesBack) {
    ExperimentOptions opt;
    opt.keep_schedules = true;
    ExperimentResult r = run_experiment(small_config(1), {Scheme::offline}, {{0.5}, true}, opt);
    json j = json::parse(to_json(r).dump());
    ASSERT_EQ(j["records"].size(), 1u);
    const auto& row = j["records"][0];
    EXPECT_EQ(row["scheme"], "offline");
    EXPECT_DOUBLE_EQ(row["r_avg_mbps"].get<double>(), r.records[0].r_avg_mbps);
    EXPECT_EQ(row["schedule"]["w"].size(), 8u);
}

TEST(Emit, WritesFilesAndReportsErrors) {
    ExperimentResult r = run_experiment(small_config(1), {Scheme::offline}, {{0.0}, false});
    const auto path = std::filesystem::temp_directory_path() / "swipt_emit_test.csv";
    emit(r, "csv", path.string());
    EXPECT_EQ(slurp(path.string()), to_csv(r));
    std::filesystem::remove(path);
    EXPECT_THROW(emit(r, "xml", path.string()), std::invalid_argument);
    EXPECT_THROW(emit(r, "csv", "/nonexistent-dir/x.csv"), std::runtime_error);
}
