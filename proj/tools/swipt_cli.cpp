// Command-line front end: region sweeps, scheme comparisons, q_max tables and
// single-scenario solves.

#include "swipt/experiment.hpp"
#include "swipt/io.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

using namespace swipt;

namespace {

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::string out = "-";
    std::string format = "csv";
    int threads = 0;
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("--config", c.config, "scenario configuration (JSON)")->check(CLI::ExistingFile);
    app->add_option("--seed", c.seed, "RNG seed, overrides the config");
    app->add_option("--trials", c.trials, "channel realisations, overrides the config")->check(CLI::PositiveNumber);
    app->add_option("--out", c.out, "output path, - for stdout");
    app->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    app->add_option("--threads", c.threads, "worker threads, 0 for all cores")->check(CLI::NonNegativeNumber);
}

ScenarioConfig load_config(const Common& c) {
    ScenarioConfig cfg = c.config.empty() ? ScenarioConfig{} : config_from_json(read_json_file(c.config));
    if (c.seed) cfg.rng_seed = *c.seed;
    if (c.trials) cfg.trials = *c.trials;
    cfg.validate();
    return cfg;
}

void write(const std::string& text, const std::string& path) {
    if (path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path);
    f << text;
}

std::string render(const ExperimentResult& r, const std::string& format) {
    return format == "csv" ? to_csv(r) : to_json(r).dump(2) + "\n";
}

int exit_code(const ExperimentResult& r) {
    for (const auto& t : r.records)
        if (t.status == Status::error || t.status == Status::not_converged) return 1;
    return 0;
}

std::string suffixed(const std::string& path, double ph) {
    if (path == "-") return path;
    std::ostringstream tag;
    tag << "_ph" << ph;
    auto dot = path.find_last_of('.');
    auto slash = path.find_last_of('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) return path + tag.str();
    return path.substr(0, dot) + tag.str() + path.substr(dot);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Energy-throughput tradeoff experiments for harvesting base stations"};
    app.require_subcommand(1);

    Common sweep_c, cmp_c, qmax_c;
    int q_points = 10;
    std::vector<std::string> schemes;
    std::vector<double> q_grid, ph_grid;
    bool relative = false, keep = false, empirical = false;

    auto* sweep = app.add_subcommand("sweep", "offline tradeoff region at evenly spaced fractions of q_max");
    add_common(sweep, sweep_c);
    sweep->add_option("--q-points", q_points, "points per realisation")->check(CLI::Range(2, 10000));
    sweep->add_flag("--schedules", keep, "include schedules in JSON output");

    auto* cmp = app.add_subcommand("compare", "offline, online and baseline schemes over a q grid");
    add_common(cmp, cmp_c);
    cmp->add_option("--scheme", schemes, "offline, online or baseline (repeatable)")
        ->check(CLI::IsMember({"offline", "online", "baseline"}))
        ->take_all();
    cmp->add_option("--q-grid", q_grid, "RF targets as average power in uW")->delimiter(',');
    cmp->add_flag("--relative", relative, "read --q-grid as fractions of each realisation's q_max");
    cmp->add_option("--q-points", q_points, "evenly spaced fractions of q_max when no --q-grid is given")
        ->check(CLI::Range(2, 10000));
    cmp->add_option("--ph-grid", ph_grid, "mean harvest powers in W; one output per value")->delimiter(',');
    cmp->add_flag("--schedules", keep, "include schedules in JSON output");
    cmp->add_flag("--empirical-rates", empirical, "online scheme estimates P_H from past arrivals");

    auto* qmax = app.add_subcommand("qmax", "maximum RF energy per realisation");
    add_common(qmax, qmax_c);

    std::string scen_path, scheme_name = "offline";
    double q_uW = 0;
    std::string solve_out = "-";
    auto* solve = app.add_subcommand("solve", "one scheme on one scenario file, JSON out");
    solve->add_option("scenario", scen_path, "scenario JSON")->required()->check(CLI::ExistingFile);
    solve->add_option("--q", q_uW, "RF target as average power in uW")->check(CLI::NonNegativeNumber);
    solve->add_option("--scheme", scheme_name, "offline, online or baseline")
        ->check(CLI::IsMember({"offline", "online", "baseline"}));
    solve->add_option("--out", solve_out, "output path, - for stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*sweep) {
            ScenarioConfig cfg = load_config(sweep_c);
            QGrid g{{}, true};
            for (int i = 0; i < q_points; ++i) g.values.push_back(static_cast<double>(i) / (q_points - 1));
            ExperimentOptions opt;
            opt.threads = sweep_c.threads;
            opt.keep_schedules = keep;
            ExperimentResult r = run_experiment(cfg, {Scheme::offline}, g, opt);
            write(render(r, sweep_c.format), sweep_c.out);
            return exit_code(r);
        }
        if (*cmp) {
            ScenarioConfig cfg = load_config(cmp_c);
            std::vector<Scheme> sel;
            for (const auto& s : schemes) sel.push_back(scheme_from(s));
            if (sel.empty()) sel = {Scheme::offline, Scheme::online, Scheme::baseline};
            QGrid g{q_grid, relative};
            if (g.values.empty()) {
                g.relative = true;
                for (int i = 0; i < q_points; ++i) g.values.push_back(static_cast<double>(i) / (q_points - 1));
            }
            ExperimentOptions opt;
            opt.threads = cmp_c.threads;
            opt.keep_schedules = keep;
            opt.online.empirical_rates = empirical;
            if (ph_grid.empty()) ph_grid.push_back(-1);
            int rc = 0;
            for (double ph : ph_grid) {
                ScenarioConfig c = cfg;
                if (ph >= 0) c.poisson_means.assign(c.poisson_means.size(), ph);
                ExperimentResult r = run_experiment(c, sel, g, opt);
                write(render(r, cmp_c.format), ph >= 0 && ph_grid.size() > 1 ? suffixed(cmp_c.out, ph) : cmp_c.out);
                rc = std::max(rc, exit_code(r));
            }
            return rc;
        }
        if (*qmax) {
            ScenarioConfig cfg = load_config(qmax_c);
            std::ostringstream o;
            json rows = json::array();
            o << "trial,q_max_uW,rho\n";
            for (int t = 0; t < cfg.trials; ++t) {
                Scenario sc = generate_scenario(cfg, cfg.rng_seed, t);
                double q = to_uW(solve_qmax(sc.E, sc.ch.g, sc.params.eta).q_max, sc);
                char line[96];
                std::snprintf(line, sizeof line, "%d,%.17g,%.17g\n", t, q, correlation(sc.ch));
                o << line;
                rows.push_back({{"trial", t}, {"q_max_uW", q}, {"rho", correlation(sc.ch)}});
            }
            write(qmax_c.format == "csv" ? o.str() : rows.dump(2) + "\n", qmax_c.out);
            return 0;
        }
        if (*solve) {
            Scenario sc = scenario_from_json(read_json_file(scen_path));
            const double q = from_uW(q_uW, sc);
            const double qm = solve_qmax(sc.E, sc.ch.g, sc.params.eta).q_max;
            ExperimentOptions opt;
            opt.keep_schedules = true;
            TrialRecord r = run_one(sc, scheme_from(scheme_name), q, opt);
            json j = {{"scheme", scheme_name},       {"status", to_string(r.status)},
                      {"q_avg_uW", r.q_avg_uW},      {"q_got_uW", r.q_got_uW},
                      {"q_max_uW", to_uW(qm, sc)},   {"r_avg_mbps", r.r_avg_mbps},
                      {"rho", r.rho}};
            if (!r.message.empty()) j["message"] = r.message;
            if (r.schedule) j["schedule"] = schedule_to_json(*r.schedule);
            if (r.scheme == Scheme::offline) j["gap"] = r.gap;
            write(j.dump(2) + "\n", solve_out);
            switch (r.status) {
            case Status::ok: return 0;
            case Status::infeasible:
            case Status::shortfall: return 2;
            default: return 1;
            }
        }
    } catch (const InfeasibleError& e) {
        std::cerr << "infeasible: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
