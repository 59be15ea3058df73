/**
 * \file d2dsim/io.hpp
 *
 * \brief JSON configuration, CSV/JSON result files and debug dumps.
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

#ifndef D2DSIM_IO_HPP
#define D2DSIM_IO_HPP

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include <d2dsim/sim.hpp>

namespace d2dsim {

inline constexpr const char* kVersion = "d2dsim-0.1.0";

namespace detail {

inline std::string fmt_num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

inline void check_keys(const nlohmann::json& j, std::initializer_list<const char*> allowed,
                       const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        bool ok = false;
        for (const char* a : allowed) {
            if (key == a) { ok = true; break; }
        }
        if (!ok) throw std::invalid_argument("config: unknown key '" + key + "' in " + where);
    }
}

template <typename T>
void maybe(const nlohmann::json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

} // namespace detail

inline const char* to_string(ScenarioKind s) {
    return s == ScenarioKind::ProximityCommunication ? "proximity" : "range_extension";
}
inline const char* to_string(MsPolicy m) {
    switch (m) {
        case MsPolicy::Cmode: return "cmode";
        case MsPolicy::Dms: return "dms";
        default: return "hms";
    }
}
inline const char* to_string(PcScheme p) {
    switch (p) {
        case PcScheme::Fix: return "fix";
        case PcScheme::FixSnr: return "fixsnr";
        case PcScheme::OpenLoop: return "ol";
        case PcScheme::ClosedLoop: return "cl";
        default: return "um";
    }
}
inline const char* to_string(RelayPlacement r) {
    return r == RelayPlacement::MidpointDisk ? "midpoint_disk" : "uniform_cell";
}
inline const char* to_string(NodeKind k) {
    switch (k) {
        case NodeKind::BaseStation: return "bs";
        case NodeKind::CellularUe: return "cellular_ue";
        case NodeKind::D2dTx: return "d2d_tx";
        case NodeKind::D2dRelay: return "d2d_relay";
        default: return "d2d_rx";
    }
}

inline ScenarioKind scenario_from_string(const std::string& s) {
    if (s == "proximity") return ScenarioKind::ProximityCommunication;
    if (s == "range_extension" || s == "range") return ScenarioKind::RangeExtension;
    throw std::invalid_argument("config: unknown scenario '" + s + "'");
}
inline MsPolicy ms_policy_from_string(const std::string& s) {
    if (s == "cmode") return MsPolicy::Cmode;
    if (s == "dms") return MsPolicy::Dms;
    if (s == "hms") return MsPolicy::Hms;
    throw std::invalid_argument("config: unknown mode_selection '" + s + "'");
}
inline PcScheme pc_scheme_from_string(const std::string& s) {
    if (s == "fix") return PcScheme::Fix;
    if (s == "fixsnr") return PcScheme::FixSnr;
    if (s == "ol") return PcScheme::OpenLoop;
    if (s == "cl") return PcScheme::ClosedLoop;
    if (s == "um") return PcScheme::UtilityMax;
    throw std::invalid_argument("config: unknown power_control '" + s + "'");
}
inline RelayPlacement relay_placement_from_string(const std::string& s) {
    if (s == "midpoint_disk") return RelayPlacement::MidpointDisk;
    if (s == "uniform_cell") return RelayPlacement::UniformCell;
    throw std::invalid_argument("config: unknown relay_placement '" + s + "'");
}

inline nlohmann::json config_to_json(const SimConfig& c) {
    nlohmann::json j;
    j["scenario"] = to_string(c.scenario);
    j["mode_selection"] = to_string(c.ms_policy);
    j["power_control"] = to_string(c.pc_scheme);
    j["omega"] = c.omega;
    j["drops"] = c.drops;
    j["seed"] = c.seed;
    j["out_dir"] = c.out_dir;
    j["deployment"] = {{"num_cells", c.deployment.num_cells},
                       {"cell_radius_m", c.deployment.cell_radius_m},
                       {"min_bs_ue_m", c.deployment.min_bs_ue_m},
                       {"min_ue_ue_m", c.deployment.min_ue_ue_m},
                       {"mean_d2d_pair_m", c.deployment.mean_d2d_pair_m},
                       {"cellular_ues_per_cell", c.deployment.cellular_ues_per_cell},
                       {"d2d_triplets_per_cell", c.deployment.d2d_triplets_per_cell},
                       {"relay_placement", to_string(c.deployment.relay_placement)},
                       {"max_place_attempts", c.deployment.max_place_attempts}};
    j["channel"] = {{"gain_1m_db", c.channel.gain_1m_db},
                    {"pathloss_exponent", c.channel.pathloss_exponent},
                    {"shadowing_sigma_db", c.channel.shadowing_sigma_db},
                    {"noise_per_rb_dbm", c.channel.noise_per_rb_dbm},
                    {"rb_bandwidth_hz", c.channel.rb_bandwidth_hz},
                    {"carrier_hz", c.channel.carrier_hz},
                    {"num_rbs", c.channel.num_rbs},
                    {"fast_fading", c.channel.fast_fading}};
    j["power"] = {{"fixed_power_dbm", c.power.fixed_power_dbm},
                  {"p0_dbm", c.power.p0_dbm},
                  {"alpha", c.power.alpha},
                  {"sinr_target_db", c.power.sinr_target_db},
                  {"cl_step_db", c.power.cl_step_db},
                  {"cl_deadzone_db", c.power.cl_deadzone_db},
                  {"ue_pmin_dbm", c.power.ue_pmin_dbm},
                  {"ue_pmax_dbm", c.power.ue_pmax_dbm},
                  {"bs_power_dbm", c.power.bs_power_dbm}};
    j["um"] = {{"outer_iters", c.um.outer_iters},
               {"inner_iters", c.um.inner_iters},
               {"epsilon", c.um.epsilon},
               {"p_init_dbm", c.um.p_init_dbm},
               {"gamma_tgt_init_db", c.um.gamma_tgt_init_db},
               {"step_size", c.um.step_size},
               {"max_step_halvings", c.um.max_step_halvings}};
    return j;
}

/**
 * \brief Parses a configuration object. Scenario-dependent defaults are
 *        applied first, then overridden by the present keys; unknown keys
 *        are rejected.
 */
inline SimConfig config_from_json(const nlohmann::json& j) {
    detail::check_keys(j, {"scenario", "mode_selection", "power_control", "omega", "drops",
                           "seed", "out_dir", "deployment", "channel", "power", "um"},
                       "top level");
    ScenarioKind scenario = ScenarioKind::ProximityCommunication;
    if (j.contains("scenario")) scenario = scenario_from_string(j.at("scenario").get<std::string>());
    SimConfig c = default_config(scenario);

    if (j.contains("mode_selection"))
        c.ms_policy = ms_policy_from_string(j.at("mode_selection").get<std::string>());
    if (j.contains("power_control"))
        c.pc_scheme = pc_scheme_from_string(j.at("power_control").get<std::string>());
    detail::maybe(j, "omega", c.omega);
    detail::maybe(j, "drops", c.drops);
    detail::maybe(j, "seed", c.seed);
    detail::maybe(j, "out_dir", c.out_dir);

    if (j.contains("deployment")) {
        const auto& d = j.at("deployment");
        detail::check_keys(d, {"num_cells", "cell_radius_m", "min_bs_ue_m", "min_ue_ue_m",
                               "mean_d2d_pair_m", "cellular_ues_per_cell",
                               "d2d_triplets_per_cell", "relay_placement", "max_place_attempts"},
                           "deployment");
        detail::maybe(d, "num_cells", c.deployment.num_cells);
        detail::maybe(d, "cell_radius_m", c.deployment.cell_radius_m);
        detail::maybe(d, "min_bs_ue_m", c.deployment.min_bs_ue_m);
        detail::maybe(d, "min_ue_ue_m", c.deployment.min_ue_ue_m);
        detail::maybe(d, "mean_d2d_pair_m", c.deployment.mean_d2d_pair_m);
        detail::maybe(d, "cellular_ues_per_cell", c.deployment.cellular_ues_per_cell);
        detail::maybe(d, "d2d_triplets_per_cell", c.deployment.d2d_triplets_per_cell);
        if (d.contains("relay_placement"))
            c.deployment.relay_placement =
                relay_placement_from_string(d.at("relay_placement").get<std::string>());
        detail::maybe(d, "max_place_attempts", c.deployment.max_place_attempts);
    }
    if (j.contains("channel")) {
        const auto& ch = j.at("channel");
        detail::check_keys(ch, {"gain_1m_db", "pathloss_exponent", "shadowing_sigma_db",
                                "noise_per_rb_dbm", "rb_bandwidth_hz", "carrier_hz", "num_rbs",
                                "fast_fading"},
                           "channel");
        detail::maybe(ch, "gain_1m_db", c.channel.gain_1m_db);
        detail::maybe(ch, "pathloss_exponent", c.channel.pathloss_exponent);
        detail::maybe(ch, "shadowing_sigma_db", c.channel.shadowing_sigma_db);
        detail::maybe(ch, "noise_per_rb_dbm", c.channel.noise_per_rb_dbm);
        detail::maybe(ch, "rb_bandwidth_hz", c.channel.rb_bandwidth_hz);
        detail::maybe(ch, "carrier_hz", c.channel.carrier_hz);
        detail::maybe(ch, "num_rbs", c.channel.num_rbs);
        detail::maybe(ch, "fast_fading", c.channel.fast_fading);
    }
    if (j.contains("power")) {
        const auto& p = j.at("power");
        detail::check_keys(p, {"fixed_power_dbm", "p0_dbm", "alpha", "sinr_target_db",
                               "cl_step_db", "cl_deadzone_db", "ue_pmin_dbm", "ue_pmax_dbm",
                               "bs_power_dbm"},
                           "power");
        detail::maybe(p, "fixed_power_dbm", c.power.fixed_power_dbm);
        detail::maybe(p, "p0_dbm", c.power.p0_dbm);
        detail::maybe(p, "alpha", c.power.alpha);
        detail::maybe(p, "sinr_target_db", c.power.sinr_target_db);
        detail::maybe(p, "cl_step_db", c.power.cl_step_db);
        detail::maybe(p, "cl_deadzone_db", c.power.cl_deadzone_db);
        detail::maybe(p, "ue_pmin_dbm", c.power.ue_pmin_dbm);
        detail::maybe(p, "ue_pmax_dbm", c.power.ue_pmax_dbm);
        detail::maybe(p, "bs_power_dbm", c.power.bs_power_dbm);
    }
    if (j.contains("um")) {
        const auto& u = j.at("um");
        detail::check_keys(u, {"outer_iters", "inner_iters", "epsilon", "p_init_dbm",
                               "gamma_tgt_init_db", "step_size", "max_step_halvings"},
                           "um");
        detail::maybe(u, "outer_iters", c.um.outer_iters);
        detail::maybe(u, "inner_iters", c.um.inner_iters);
        detail::maybe(u, "epsilon", c.um.epsilon);
        detail::maybe(u, "p_init_dbm", c.um.p_init_dbm);
        detail::maybe(u, "gamma_tgt_init_db", c.um.gamma_tgt_init_db);
        detail::maybe(u, "step_size", c.um.step_size);
        detail::maybe(u, "max_step_halvings", c.um.max_step_halvings);
    }
    return c;
}

inline SimConfig load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::invalid_argument("config: cannot open '" + path + "'");
    nlohmann::json j;
    in >> j;
    return config_from_json(j);
}

/// Empirical CDF file: `sinr_db,cdf`, one row per pooled sample.
inline void write_sinr_cdf_csv(std::ostream& os, const std::vector<double>& sorted) {
    os << "sinr_db,cdf\n";
    const std::size_t n = sorted.size();
    for (std::size_t i = 0; i < n; ++i) {
        os << detail::fmt_num(sorted[i]) << ","
           << detail::fmt_num(static_cast<double>(i + 1) / static_cast<double>(n)) << "\n";
    }
}

struct ScatterRow {
    std::string scheme;
    std::optional<double> omega; ///< meaningful for the utility scheme only
    double total_power_w = 0.0;
    double mean_throughput_mbps = 0.0;
};

inline void write_scatter_csv(std::ostream& os, const std::vector<ScatterRow>& rows) {
    os << "scheme,omega,total_power_w,mean_throughput_mbps\n";
    for (const auto& r : rows) {
        os << r.scheme << "," << (r.omega ? detail::fmt_num(*r.omega) : std::string{}) << ","
           << detail::fmt_num(r.total_power_w) << "," << detail::fmt_num(r.mean_throughput_mbps)
           << "\n";
    }
}

inline nlohmann::json summary_to_json(const AggregateStats& agg, const SimConfig& cfg) {
    auto opt = [](const std::optional<double>& v) {
        return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
    };
    nlohmann::json j;
    j["version"] = kVersion;
    j["seed"] = cfg.seed;
    j["config"] = config_to_json(cfg);
    j["summary"] = {{"drops", agg.total_drops},
                    {"failed_drops", agg.failed_drops},
                    {"records_cellular", agg.sinr_cellular_db.size()},
                    {"records_d2d", agg.sinr_d2d_db.size()},
                    {"median_sinr_cellular_db", opt(agg.median_sinr_cellular_db)},
                    {"median_sinr_d2d_db", opt(agg.median_sinr_d2d_db)},
                    {"p_d2d_sinr_below_0db", opt(agg.p_d2d_sinr_below_0db)},
                    {"mean_throughput_mbps", opt(agg.mean_throughput_mbps)},
                    {"mean_total_ue_power_w", opt(agg.mean_total_ue_power_w)}};
    return j;
}

/**
 * \brief Writes `sinr_cdf_cellular.csv`, `sinr_cdf_d2d.csv`,
 *        `scatter_power_rate.csv` and `summary.json` into \p out_dir.
 *
 * Output bytes are a pure function of the aggregate and the configuration.
 */
inline std::vector<std::string> emit_outputs(const AggregateStats& agg, const SimConfig& cfg,
                                             const std::string& out_dir) {
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    std::vector<std::string> written;

    auto open = [&](const std::string& name) {
        const std::string path = (fs::path(out_dir) / name).string();
        written.push_back(path);
        return std::ofstream(path, std::ios::binary);
    };

    {
        auto os = open("sinr_cdf_cellular.csv");
        write_sinr_cdf_csv(os, agg.sinr_cellular_db);
    }
    {
        auto os = open("sinr_cdf_d2d.csv");
        write_sinr_cdf_csv(os, agg.sinr_d2d_db);
    }
    {
        auto os = open("scatter_power_rate.csv");
        std::vector<ScatterRow> rows;
        if (agg.mean_throughput_mbps && agg.mean_total_ue_power_w) {
            ScatterRow row;
            row.scheme = to_string(cfg.pc_scheme);
            if (cfg.pc_scheme == PcScheme::UtilityMax) row.omega = cfg.omega;
            row.total_power_w = *agg.mean_total_ue_power_w;
            row.mean_throughput_mbps = *agg.mean_throughput_mbps;
            rows.push_back(row);
        }
        write_scatter_csv(os, rows);
    }
    {
        auto os = open("summary.json");
        os << summary_to_json(agg, cfg).dump(2) << "\n";
    }
    return written;
}

/// Debug dump: `node_id,kind,cell,x_m,y_m`.
inline void write_deployment_csv(std::ostream& os, const Deployment& dep) {
    os << "node_id,kind,cell,x_m,y_m\n";
    for (std::size_t i = 0; i < dep.nodes.size(); ++i) {
        const Node& n = dep.nodes[i];
        os << i << "," << to_string(n.kind) << "," << n.cell << "," << detail::fmt_num(n.pos.x)
           << "," << detail::fmt_num(n.pos.y) << "\n";
    }
}

/// Debug dump: `route_id,hop,link_id,resource,tx_node,rx_node`.
inline void write_routes_csv(std::ostream& os, const RoutingMatrix& rm) {
    os << "route_id,hop,link_id,resource,tx_node,rx_node\n";
    for (std::size_t i = 0; i < rm.routes.size(); ++i) {
        const Route& r = rm.routes[i];
        for (int h = 0; h < hops(r); ++h) {
            const auto [l, q] = hop_link_resource(r, h);
            os << i << "," << h << "," << l << "," << q << "," << rm.links[l].tx_node << ","
               << rm.links[l].rx_node << "\n";
        }
    }
}

} // namespace d2dsim

#endif // D2DSIM_IO_HPP
