#pragma once

#include "swipt/model.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

namespace swipt {

using Point = std::array<double, 2>;

struct ScenarioConfig {
    // equilateral triangle with 50 m sides; DR at the centroid, ER 10 m from BS 1
    std::vector<Point> bs_positions{{0.0, 0.0}, {50.0, 0.0}, {25.0, 43.30127018922193}};
    Point dr_position{25.0, 14.433756729740644};
    Point er_position{10.0, 0.0};
    // explicit link distances override the positions when non-empty
    std::vector<double> dr_distances{29.0, 29.0, 29.0};
    std::vector<double> er_distances{10.0, 40.0, 45.8};
    double pathloss_exponent = 2.5;
    double pathloss_constant = 1e-3;
    double bandwidth = 1e6;    // Hz
    double N0 = 1e-15;         // W/Hz
    int N = 60;
    double slot_length = 1.0;  // s
    double eta = 0.8;
    std::vector<double> poisson_means{0.1, 0.1, 0.1}; // P_H per BS, W
    double energy_quantum = 0.01; // J
    std::uint64_t rng_seed = 1;
    int trials = 100;

    int L() const { return static_cast<int>(bs_positions.size()); }
    double sigma2() const { return N0 * bandwidth; }

    std::vector<double> distances(const Point& rx, const std::vector<double>& given) const {
        if (!given.empty()) return given;
        std::vector<double> d;
        for (const auto& b : bs_positions) d.push_back(std::hypot(b[0] - rx[0], b[1] - rx[1]));
        return d;
    }

    void validate() const {
        const int L = this->L();
        if (L < 1) throw std::invalid_argument("ScenarioConfig: no base stations");
        if (static_cast<int>(poisson_means.size()) != L)
            throw std::invalid_argument("ScenarioConfig: poisson_means length differs from BS count");
        for (const auto* d : {&dr_distances, &er_distances})
            if (!d->empty() && static_cast<int>(d->size()) != L)
                throw std::invalid_argument("ScenarioConfig: distance list length differs from BS count");
        for (double d : distances(dr_position, dr_distances))
            if (!(d > 0)) throw std::invalid_argument("ScenarioConfig: zero distance to the data receiver");
        for (double d : distances(er_position, er_distances))
            if (!(d > 0)) throw std::invalid_argument("ScenarioConfig: zero distance to the energy receiver");
        for (double p : poisson_means)
            if (!(p >= 0)) throw std::invalid_argument("ScenarioConfig: negative harvest rate");
        if (!(pathloss_exponent > 0) || !(pathloss_constant > 0))
            throw std::invalid_argument("ScenarioConfig: pathloss parameters must be > 0");
        if (!(bandwidth > 0) || !(N0 > 0)) throw std::invalid_argument("ScenarioConfig: noise parameters must be > 0");
        if (N < 1) throw std::invalid_argument("ScenarioConfig: N must be >= 1");
        if (!(slot_length > 0)) throw std::invalid_argument("ScenarioConfig: slot_length must be > 0");
        if (!(eta > 0 && eta < 1)) throw std::invalid_argument("ScenarioConfig: eta must lie in (0,1)");
        if (!(energy_quantum > 0)) throw std::invalid_argument("ScenarioConfig: energy_quantum must be > 0");
        if (trials < 1) throw std::invalid_argument("ScenarioConfig: trials must be >= 1");
    }
};

/// Rayleigh-faded channels and Poisson arrivals for one realisation.
inline Scenario generate_scenario(const ScenarioConfig& cfg, std::uint64_t seed, std::uint64_t trial = 0) {
    cfg.validate();
    const int L = cfg.L();
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32)};
    std::mt19937_64 rng(seq);
    std::exponential_distribution<double> fade(1.0);
    std::uniform_real_distribution<double> phase(0.0, 2 * M_PI);

    auto channel = [&](const std::vector<double>& d) {
        CVec c(L);
        for (int l = 0; l < L; ++l) {
            double a = fade(rng);
            double gain = cfg.pathloss_constant * a / std::pow(d[l], cfg.pathloss_exponent);
            c(l) = std::polar(std::sqrt(gain), phase(rng));
        }
        return c;
    };
    Scenario sc;
    sc.params.L = L;
    sc.params.N = cfg.N;
    sc.params.slot_length = cfg.slot_length;
    sc.params.noise_variance = cfg.sigma2();
    sc.params.eta = cfg.eta;
    sc.params.bandwidth = cfg.bandwidth;
    sc.ch.h = channel(cfg.distances(cfg.dr_position, cfg.dr_distances));
    sc.ch.g = channel(cfg.distances(cfg.er_position, cfg.er_distances));
    sc.P_H.resize(L);
    sc.E.resize(L, cfg.N);
    for (int l = 0; l < L; ++l) {
        sc.P_H(l) = cfg.poisson_means[l];
        const double mean = cfg.poisson_means[l] * cfg.slot_length / cfg.energy_quantum;
        if (!(mean > 0)) {
            sc.E.row(l).setZero();
            continue;
        }
        std::poisson_distribution<long> arrivals(mean);
        for (int n = 0; n < cfg.N; ++n) sc.E(l, n) = static_cast<double>(arrivals(rng)) * cfg.energy_quantum;
    }
    return sc;
}

} // namespace swipt
