// SPDX-License-Identifier: Apache-2.0
//
// Command-line driver: simulate, sweep and radar-map subcommands writing a
// run directory of CSVs and a config snapshot.
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "isac/config.hpp"
#include "isac/errors.hpp"
#include "isac/report.hpp"
#include "isac/simulation.hpp"

namespace {

struct CommonOptions {
    std::string config_path;
    std::string profile = "desk";
    std::optional<std::uint64_t> seed;
    std::optional<int> trials;
    std::string out = "run";
};

void add_common(CLI::App* app, CommonOptions& o) {
    app->add_option("--config", o.config_path, "JSON config overlay");
    app->add_option("--profile", o.profile, "Base profile")->check(CLI::IsMember({"desk", "paper"}));
    app->add_option("--seed", o.seed, "Master seed");
    app->add_option("--trials", o.trials, "Number of trials")->check(CLI::PositiveNumber);
    app->add_option("--out", o.out, "Output directory");
}

isac::SimConfig resolve(const CommonOptions& o) {
    const isac::SimConfig base = isac::profile_by_name(o.profile);
    isac::SimConfig c = o.config_path.empty() ? base : isac::load_config(o.config_path, base);
    if (o.seed) c.seed = *o.seed;
    if (o.trials) c.trials = *o.trials;
    c.validate();
    return c;
}

void print_error(const std::string& kind, const std::string& message) {
    nlohmann::json j;
    j["error"] = {{"kind", kind}, {"message", message}};
    std::cerr << j.dump() << '\n';
}

std::vector<std::string> split_values(const std::vector<std::string>& raw) {
    std::vector<std::string> out;
    for (const auto& r : raw) {
        std::size_t start = 0;
        while (start <= r.size()) {
            const std::size_t comma = r.find(',', start);
            const std::string tok = r.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
            if (!tok.empty()) out.push_back(tok);
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
    }
    return out;
}

void print_summary(const std::vector<isac::TrialResult>& results) {
    const isac::Aggregate a = isac::aggregate(results);
    nlohmann::json j = {{"trials", a.trials},
                        {"dl_sum_se", a.dl_sum_se},
                        {"ul_sum_se", a.ul_sum_se},
                        {"fd_su_bound", a.fd_su_bound},
                        {"si_initial_db", a.si_initial_db},
                        {"si_final_db", a.si_final_db},
                        {"angle_ok_fraction", a.angle_ok_fraction},
                        {"range_ok_fraction", a.range_ok_fraction},
                        {"velocity_ok_fraction", a.velocity_ok_fraction}};
    std::cout << j.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ISAC full-duplex mmWave link-level simulator"};
    app.require_subcommand(1);

    CommonOptions sim_opts, sweep_opts, map_opts;
    auto* sim = app.add_subcommand("simulate", "Run config.trials Monte Carlo trials");
    add_common(sim, sim_opts);

    auto* sw = app.add_subcommand("sweep", "Run one batch per value of a config field");
    add_common(sw, sweep_opts);
    std::string axis;
    std::vector<std::string> raw_values;
    sw->add_option("--axis", axis, "Config field name")->required();
    sw->add_option("--values", raw_values, "Values, comma or space separated")->required();

    auto* rm = app.add_subcommand("radar-map", "Range-Doppler and pseudospectrum CSVs for one trial");
    add_common(rm, map_opts);
    int map_trial = 0;
    rm->add_option("--trial", map_trial, "Trial index")->check(CLI::NonNegativeNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        print_error("usage", e.what());
        return 2;
    }

    try {
        if (sim->parsed()) {
            const isac::SimConfig c = resolve(sim_opts);
            const std::filesystem::path out = sim_opts.out;
            const auto results = isac::run_trials(c, c.trials);
            isac::write_config_snapshot(out / "config.json", c);
            isac::write_trials_csv(out / "trials.csv", results);
            isac::write_aggregate_csv(out / "aggregate.csv", results);
            isac::write_trace_csv(out / "si_trace.csv", results);
            print_summary(results);
        } else if (sw->parsed()) {
            const isac::SimConfig c = resolve(sweep_opts);
            const std::filesystem::path out = sweep_opts.out;
            const auto values = split_values(raw_values);
            if (values.empty()) throw isac::ConfigError("sweep: no values given");
            const auto points = isac::sweep(c, axis, values);
            isac::write_config_snapshot(out / "config.json", c);
            isac::write_sweep_csv(out / "sweep.csv", axis, points);
            for (const auto& p : points) print_summary(p.trials);
        } else if (rm->parsed()) {
            isac::SimConfig c = resolve(map_opts);
            c.simulate_radar = true;
            const std::filesystem::path out = map_opts.out;
            const isac::TrialResult r = isac::run_trial(c, map_trial, {true});
            isac::write_config_snapshot(out / "config.json", c);
            isac::write_trials_csv(out / "trials.csv", {r});
            isac::write_range_doppler_csv(out / "range_doppler.csv", r.range_doppler);
            isac::write_pseudospectrum_csv(out / "pseudospectrum.csv", r.angle_estimate);
            print_summary({r});
        }
    } catch (const isac::Error& e) {
        print_error(e.kind(), e.what());
        return 1;
    } catch (const std::exception& e) {
        print_error("internal", e.what());
        return 1;
    }
    return 0;
}
