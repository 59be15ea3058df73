/**
 * \file tools/d2dsim.cpp
 *
 * \brief Command-line front end: Monte Carlo runs, power-control sweeps and
 *        debug dumps of a single drop.
 *
 * Copyright 2026 the d2dsim authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <d2dsim/io.hpp>
#include <d2dsim/sim.hpp>

namespace {

struct CliOverrides {
    std::string config_path;
    std::string scenario;
    std::string mode_selection;
    std::string power_control;
    std::optional<double> omega;
    std::optional<int> drops;
    std::optional<std::uint64_t> seed;
    std::string out_dir;
};

void add_common_flags(CLI::App* app, CliOverrides& o, bool with_omega = true) {
    app->add_option("--config", o.config_path, "JSON configuration file")
        ->check(CLI::ExistingFile);
    app->add_option("--scenario", o.scenario, "proximity | range_extension");
    app->add_option("--mode-selection", o.mode_selection, "cmode | dms | hms");
    app->add_option("--power-control", o.power_control, "fix | fixsnr | ol | cl | um");
    if (with_omega) app->add_option("--omega", o.omega, "power weight of the utility scheme");
    app->add_option("--drops", o.drops, "Monte Carlo iterations");
    app->add_option("--seed", o.seed, "master seed");
    app->add_option("--out", o.out_dir, "output directory");
}

d2dsim::SimConfig resolve_config(const CliOverrides& o) {
    d2dsim::SimConfig cfg;
    if (!o.config_path.empty()) {
        cfg = d2dsim::load_config_file(o.config_path);
        // flags override file keys; scenario-dependent deployment defaults
        // only apply where the file (or its scenario) selected them
        if (!o.scenario.empty()) cfg.scenario = d2dsim::scenario_from_string(o.scenario);
    } else {
        const auto scen = o.scenario.empty()
                              ? d2dsim::ScenarioKind::ProximityCommunication
                              : d2dsim::scenario_from_string(o.scenario);
        cfg = d2dsim::default_config(scen);
    }
    if (!o.mode_selection.empty()) cfg.ms_policy = d2dsim::ms_policy_from_string(o.mode_selection);
    if (!o.power_control.empty()) cfg.pc_scheme = d2dsim::pc_scheme_from_string(o.power_control);
    if (o.omega) cfg.omega = *o.omega;
    if (o.drops) cfg.drops = *o.drops;
    if (o.seed) cfg.seed = *o.seed;
    if (!o.out_dir.empty()) cfg.out_dir = o.out_dir;
    d2dsim::validate(cfg);
    return cfg;
}

int worker_count_from_env() {
    if (const char* env = std::getenv("D2DSIM_WORKERS")) {
        const int w = std::atoi(env);
        if (w > 0) return w;
    }
    return 0; // auto
}

double failure_rate(const d2dsim::AggregateStats& agg) {
    return agg.total_drops > 0
               ? static_cast<double>(agg.failed_drops) / static_cast<double>(agg.total_drops)
               : 0.0;
}

int cmd_run(const CliOverrides& o) {
    const d2dsim::SimConfig cfg = resolve_config(o);
    const auto drops = d2dsim::run_all_drops(cfg, worker_count_from_env());
    const auto agg = d2dsim::aggregate(drops);
    d2dsim::emit_outputs(agg, cfg, cfg.out_dir);
    std::cout << "wrote " << cfg.out_dir << ": drops=" << agg.total_drops
              << " failed=" << agg.failed_drops;
    if (agg.median_sinr_d2d_db)
        std::cout << " median_d2d_sinr_db=" << *agg.median_sinr_d2d_db;
    if (agg.median_sinr_cellular_db)
        std::cout << " median_cell_sinr_db=" << *agg.median_sinr_cellular_db;
    if (agg.mean_throughput_mbps)
        std::cout << " mean_throughput_mbps=" << *agg.mean_throughput_mbps;
    std::cout << "\n";
    return failure_rate(agg) < 0.01 ? 0 : 2;
}

int cmd_sweep(const CliOverrides& o, const std::vector<double>& omegas) {
    d2dsim::SimConfig base = resolve_config(o);
    const std::string out_root = base.out_dir;
    std::filesystem::create_directories(out_root);

    struct Point {
        d2dsim::PcScheme scheme;
        std::optional<double> omega;
    };
    std::vector<Point> points = {{d2dsim::PcScheme::Fix, {}},
                                 {d2dsim::PcScheme::FixSnr, {}},
                                 {d2dsim::PcScheme::OpenLoop, {}},
                                 {d2dsim::PcScheme::ClosedLoop, {}}};
    for (double w : omegas) points.push_back({d2dsim::PcScheme::UtilityMax, w});

    std::vector<d2dsim::ScatterRow> rows;
    bool failed = false;
    for (const Point& pt : points) {
        d2dsim::SimConfig cfg = base;
        cfg.pc_scheme = pt.scheme;
        if (pt.omega) cfg.omega = *pt.omega;
        std::string tag = d2dsim::to_string(pt.scheme);
        if (pt.omega) tag += "_" + d2dsim::detail::fmt_num(*pt.omega);
        cfg.out_dir = (std::filesystem::path(out_root) / tag).string();

        const auto agg = d2dsim::aggregate(d2dsim::run_all_drops(cfg, worker_count_from_env()));
        d2dsim::emit_outputs(agg, cfg, cfg.out_dir);
        if (failure_rate(agg) >= 0.01) failed = true;
        if (agg.mean_throughput_mbps && agg.mean_total_ue_power_w) {
            d2dsim::ScatterRow row;
            row.scheme = d2dsim::to_string(pt.scheme);
            row.omega = pt.omega;
            row.total_power_w = *agg.mean_total_ue_power_w;
            row.mean_throughput_mbps = *agg.mean_throughput_mbps;
            rows.push_back(row);
        }
        std::cout << "swept " << tag << "\n";
    }
    std::ofstream os(std::filesystem::path(out_root) / "scatter_power_rate.csv",
                     std::ios::binary);
    d2dsim::write_scatter_csv(os, rows);
    std::cout << "wrote " << out_root << "/scatter_power_rate.csv (" << rows.size() << " rows)\n";
    return failed ? 2 : 0;
}

int cmd_dump(const CliOverrides& o, int drop_index) {
    const d2dsim::SimConfig cfg = resolve_config(o);
    std::mt19937_64 rng = d2dsim::drop_rng(cfg.seed, static_cast<std::uint64_t>(drop_index));
    d2dsim::Deployment dep = d2dsim::generate_deployment(cfg.deployment, cfg.scenario, rng);
    dep.gains = d2dsim::build_gain_table(dep.nodes, cfg.channel, rng);
    const auto modes = d2dsim::select_modes(cfg.ms_policy, dep);
    const auto prob = d2dsim::build_allocation_problem(dep, modes, cfg.channel.num_rbs);
    const auto rm = d2dsim::allocate_random(prob, rng);

    std::filesystem::create_directories(cfg.out_dir);
    {
        std::ofstream os(std::filesystem::path(cfg.out_dir) / "deployment.csv", std::ios::binary);
        d2dsim::write_deployment_csv(os, dep);
    }
    {
        std::ofstream os(std::filesystem::path(cfg.out_dir) / "routes.csv", std::ios::binary);
        d2dsim::write_routes_csv(os, rm);
    }
    std::cout << "wrote " << cfg.out_dir << "/deployment.csv and routes.csv (drop " << drop_index
              << ")\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Monte Carlo simulator of multi-cell uplink networks with single- and "
                 "two-hop D2D communication"};
    app.require_subcommand(1);

    CliOverrides run_opts, sweep_opts, dump_opts;
    std::vector<double> omegas = {0.1, 1.0, 10.0, 100.0};
    int drop_index = 0;

    CLI::App* run = app.add_subcommand("run", "run one configuration and write statistics");
    add_common_flags(run, run_opts);

    CLI::App* sweep =
        app.add_subcommand("sweep", "run all power-control schemes plus an omega sweep");
    add_common_flags(sweep, sweep_opts, /*with_omega=*/false);
    sweep->add_option("--omega", omegas, "omega values for the utility scheme")
        ->delimiter(',')
        ->expected(-1);

    CLI::App* dump = app.add_subcommand("dump", "dump one drop's deployment and routes as CSV");
    add_common_flags(dump, dump_opts);
    dump->add_option("--drop", drop_index, "drop index to dump");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(run_opts);
        if (sweep->parsed()) return cmd_sweep(sweep_opts, omegas);
        if (dump->parsed()) return cmd_dump(dump_opts, drop_index);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
