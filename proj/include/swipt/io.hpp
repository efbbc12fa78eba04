#pragma once

#include "swipt/experiment.hpp"
#include "swipt/model.hpp"
#include "swipt/scenario.hpp"

#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace swipt {

using json = nlohmann::json;

namespace io_detail {

// complex vectors are stored as [[re...], [im...]] in schedules
inline json cvec_json(const CVec& v) {
    json re = json::array(), im = json::array();
    for (int i = 0; i < v.size(); ++i) {
        re.push_back(v(i).real());
        im.push_back(v(i).imag());
    }
    return {re, im};
}

inline CVec cvec_from(const json& re, const json& im) {
    if (re.size() != im.size()) throw std::invalid_argument("real and imaginary parts differ in length");
    CVec v(static_cast<long>(re.size()));
    for (size_t i = 0; i < re.size(); ++i) v(static_cast<long>(i)) = cplx(re[i].get<double>(), im[i].get<double>());
    return v;
}

// shortest text that reads back to the same double
inline std::string num(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

} // namespace io_detail

inline ScenarioConfig config_from_json(const json& j) {
    ScenarioConfig c;
    auto get = [&](const char* k, auto& dst) {
        if (j.contains(k)) j.at(k).get_to(dst);
    };
    get("bs_positions", c.bs_positions);
    get("dr_position", c.dr_position);
    get("er_position", c.er_position);
    get("dr_distances", c.dr_distances);
    get("er_distances", c.er_distances);
    get("pathloss_exponent", c.pathloss_exponent);
    get("pathloss_constant", c.pathloss_constant);
    get("bandwidth", c.bandwidth);
    get("N0", c.N0);
    get("N", c.N);
    get("slot_length", c.slot_length);
    get("eta", c.eta);
    get("poisson_means", c.poisson_means);
    get("energy_quantum", c.energy_quantum);
    get("rng_seed", c.rng_seed);
    get("trials", c.trials);
    for (auto it = j.begin(); it != j.end(); ++it) {
        static const char* known[] = {"bs_positions", "dr_position", "er_position", "dr_distances", "er_distances",
                                      "pathloss_exponent", "pathloss_constant", "bandwidth", "N0", "N",
                                      "slot_length", "eta", "poisson_means", "energy_quantum", "rng_seed", "trials"};
        bool ok = false;
        for (const char* k : known) ok |= it.key() == k;
        if (!ok) throw std::invalid_argument("config: unknown field '" + it.key() + "'");
    }
    c.validate();
    return c;
}

inline json config_to_json(const ScenarioConfig& c) {
    return {{"bs_positions", c.bs_positions}, {"dr_position", c.dr_position}, {"er_position", c.er_position},
            {"dr_distances", c.dr_distances}, {"er_distances", c.er_distances},
            {"pathloss_exponent", c.pathloss_exponent}, {"pathloss_constant", c.pathloss_constant},
            {"bandwidth", c.bandwidth}, {"N0", c.N0}, {"N", c.N}, {"slot_length", c.slot_length}, {"eta", c.eta},
            {"poisson_means", c.poisson_means}, {"energy_quantum", c.energy_quantum}, {"rng_seed", c.rng_seed},
            {"trials", c.trials}};
}

inline json read_json_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw std::runtime_error("cannot open " + path);
    return json::parse(f);
}

/// Scenario file: L, N, slot_length, noise_variance, eta, h_re, h_im, g_re,
/// g_im, E (L rows of N Joules); optionally bandwidth and P_H (W).
inline Scenario scenario_from_json(const json& j) {
    Scenario s;
    s.ch.h = io_detail::cvec_from(j.at("h_re"), j.at("h_im"));
    s.ch.g = io_detail::cvec_from(j.at("g_re"), j.at("g_im"));
    const auto& E = j.at("E");
    s.params.L = static_cast<int>(E.size());
    s.params.N = s.params.L ? static_cast<int>(E[0].size()) : 0;
    if (j.contains("L") && j["L"].get<int>() != s.params.L) throw std::invalid_argument("scenario: L differs from E");
    if (j.contains("N") && j["N"].get<int>() != s.params.N) throw std::invalid_argument("scenario: N differs from E");
    s.E.resize(s.params.L, s.params.N);
    for (int l = 0; l < s.params.L; ++l) {
        if (static_cast<int>(E[l].size()) != s.params.N) throw std::invalid_argument("scenario: ragged E");
        for (int n = 0; n < s.params.N; ++n) s.E(l, n) = E[l][n].get<double>();
    }
    if (j.contains("slot_length")) s.params.slot_length = j["slot_length"];
    if (j.contains("noise_variance")) s.params.noise_variance = j["noise_variance"];
    if (j.contains("eta")) s.params.eta = j["eta"];
    if (j.contains("bandwidth")) s.params.bandwidth = j["bandwidth"];
    if (j.contains("P_H")) {
        auto v = j["P_H"].get<std::vector<double>>();
        s.P_H = Eigen::Map<const RVec>(v.data(), static_cast<long>(v.size()));
    }
    s.validate();
    return s;
}

inline json scenario_to_json(const Scenario& s) {
    json E = json::array();
    for (int l = 0; l < s.E.rows(); ++l) {
        json row = json::array();
        for (int n = 0; n < s.E.cols(); ++n) row.push_back(s.E(l, n));
        E.push_back(row);
    }
    json j = {{"L", s.params.L}, {"N", s.params.N}, {"slot_length", s.params.slot_length},
              {"noise_variance", s.params.noise_variance}, {"eta", s.params.eta},
              {"bandwidth", s.params.bandwidth}, {"E", E}};
    json h = io_detail::cvec_json(s.ch.h), g = io_detail::cvec_json(s.ch.g);
    j["h_re"] = h[0];
    j["h_im"] = h[1];
    j["g_re"] = g[0];
    j["g_im"] = g[1];
    if (s.P_H.size()) j["P_H"] = std::vector<double>(s.P_H.data(), s.P_H.data() + s.P_H.size());
    return j;
}

inline json schedule_to_json(const BeamformingSchedule& s) {
    json w = json::array();
    for (const auto& v : s.w) w.push_back(io_detail::cvec_json(v));
    return {{"w", w}, {"per_slot_rate", s.per_slot_rate}, {"rf_energy", s.rf_energy}};
}

inline const char* csv_header() { return "scheme,q_avg_uW,r_avg_mbps,rho,trial"; }

inline std::string to_csv(const ExperimentResult& r) {
    std::ostringstream o;
    o << csv_header() << '\n';
    for (const auto& t : r.records)
        o << to_string(t.scheme) << ',' << io_detail::num(t.q_avg_uW) << ',' << io_detail::num(t.r_avg_mbps) << ','
          << io_detail::num(t.rho) << ',' << t.trial << '\n';
    return o.str();
}

inline json to_json(const ExperimentResult& r) {
    json recs = json::array();
    for (const auto& t : r.records) {
        json j = {{"scheme", to_string(t.scheme)}, {"q_avg_uW", t.q_avg_uW}, {"r_avg_mbps", t.r_avg_mbps},
                  {"rho", t.rho}, {"trial", t.trial}, {"q_index", t.q_index}, {"q_got_uW", t.q_got_uW},
                  {"q_max_uW", t.q_max_uW}, {"gap", t.gap}, {"status", to_string(t.status)}};
        if (!t.message.empty()) j["message"] = t.message;
        if (t.schedule) j["schedule"] = schedule_to_json(*t.schedule);
        recs.push_back(j);
    }
    json means = json::array();
    for (const auto& m : r.means)
        means.push_back({{"scheme", to_string(m.scheme)}, {"q_index", m.q_index}, {"q_avg_uW", m.q_avg_uW},
                         {"r_avg_mbps", m.r_avg_mbps}, {"q_got_uW", m.q_got_uW}, {"failures", m.failures}});
    return {{"records", recs}, {"means", means}};
}

/// Writes CSV or JSON ("csv" | "json").
inline void emit(const ExperimentResult& r, const std::string& format, const std::string& path) {
    std::string text;
    if (format == "csv")
        text = to_csv(r);
    else if (format == "json")
        text = to_json(r).dump(2) + "\n";
    else
        throw std::invalid_argument("emit: unknown format " + format);
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("emit: cannot write " + path);
    f << text;
    if (!f) throw std::runtime_error("emit: write failed for " + path);
}

} // namespace swipt
