/**
 * \file d2dsim/sim.hpp
 *
 * \brief Monte Carlo driver: per-drop pipeline, drop-parallel execution and
 *        statistics aggregation.
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

#ifndef D2DSIM_SIM_HPP
#define D2DSIM_SIM_HPP

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include <d2dsim/geometry.hpp>
#include <d2dsim/modeselect.hpp>
#include <d2dsim/powerctl.hpp>
#include <d2dsim/resalloc.hpp>
#include <d2dsim/rng.hpp>
#include <d2dsim/routing.hpp>

namespace d2dsim {

struct SimConfig {
    ScenarioKind scenario = ScenarioKind::ProximityCommunication;
    MsPolicy ms_policy = MsPolicy::Hms;
    PcScheme pc_scheme = PcScheme::UtilityMax;
    double omega = 1.0;
    int drops = 100;
    std::uint64_t seed = 1;
    DeploymentConfig deployment;
    ChannelParams channel;
    PcParams power;
    UmConfig um;
    std::string out_dir = "out";
};

/// Defaults of the two studied setups; they differ in the BS-UE minimum
/// distance (50 m vs 400 m) and the triplet density (6 vs 18 per cell).
inline SimConfig default_config(ScenarioKind scenario) {
    SimConfig cfg;
    cfg.scenario = scenario;
    if (scenario == ScenarioKind::RangeExtension) {
        cfg.deployment.min_bs_ue_m = 400.0;
        cfg.deployment.d2d_triplets_per_cell = 18;
    }
    return cfg;
}

inline void validate(const SimConfig& cfg) {
    if (cfg.drops < 1) throw std::invalid_argument("config: drops must be >= 1");
    if (cfg.omega <= 0) throw std::invalid_argument("config: omega must be positive");
    validate(cfg.deployment);
    validate(cfg.channel);
    validate(cfg.um);
}

enum class EntityClass { CellularUe, D2dCandidate };

struct EntityRecord {
    EntityClass cls = EntityClass::CellularUe;
    ModeDecision mode = ModeDecision::Cellular;
    int cell = -1;
    int hops = 1;
    double sinr_db = 0.0;            ///< end-to-end: min hop SINR for two-hop routes
    double rate_bps = 0.0;           ///< min hop capacity
    double hop_power_dbm[2] = {0, 0}; ///< per hop; second entry unused for one hop
};

struct DropStats {
    int drop_index = -1;
    bool failed = false;
    std::vector<EntityRecord> records;
    double total_ue_power_w = 0.0; ///< fixed BS hops excluded
};

/// Allocation problem plus the route -> entity record wiring of one drop.
inline AllocationProblem build_allocation_problem(const Deployment& dep,
                                                  const std::vector<ModeDecision>& modes,
                                                  int num_resources) {
    AllocationProblem prob;
    prob.num_resources = num_resources;
    RoutingMatrix& rm = prob.skeleton;
    rm.num_resources = num_resources;

    auto add_link = [&](int tx, int rx, LinkRole role, int cell) {
        rm.links.push_back({tx, rx});
        prob.link_roles.push_back(role);
        prob.link_cell.push_back(cell);
        return rm.num_links++;
    };
    auto add_route = [&](RouteKind kind, std::vector<int> links, int owner) {
        Route r;
        r.kind = kind;
        r.hop_links = std::move(links);
        r.hop_resources.assign(r.hop_links.size(), -1);
        r.owner = owner;
        rm.routes.push_back(std::move(r));
        ++rm.num_routes;
    };

    int owner = 0;
    for (const auto& ue : dep.cellular_ues) {
        const int l = add_link(ue.node, dep.bs_of_cell[ue.cell], LinkRole::CellularUplink, ue.cell);
        add_route(RouteKind::CellularDirect, {l}, owner++);
    }
    for (std::size_t j = 0; j < dep.triplets.size(); ++j) {
        const auto& t = dep.triplets[j];
        const int bs = dep.bs_of_cell[t.cell];
        switch (modes[j]) {
            case ModeDecision::Cellular:
                if (dep.scenario == ScenarioKind::ProximityCommunication) {
                    const int l1 = add_link(t.tx, bs, LinkRole::D2dHop, t.cell);
                    const int l2 = add_link(bs, t.rx, LinkRole::BsDownlink, t.cell);
                    add_route(RouteKind::CellularTwoHopViaBs, {l1, l2}, owner++);
                } else {
                    const int l = add_link(t.tx, bs, LinkRole::D2dHop, t.cell);
                    add_route(RouteKind::CellularDirect, {l}, owner++);
                }
                break;
            case ModeDecision::D2dSingleHop: {
                const int l = add_link(t.tx, t.rx, LinkRole::D2dHop, t.cell);
                add_route(RouteKind::D2dSingleHop, {l}, owner++);
                break;
            }
            case ModeDecision::D2dTwoHop: {
                const int l1 = add_link(t.tx, t.relay, LinkRole::D2dHop, t.cell);
                const int endpoint = (dep.scenario == ScenarioKind::RangeExtension) ? bs : t.rx;
                const int l2 = add_link(t.relay, endpoint, LinkRole::D2dHop, t.cell);
                add_route(RouteKind::D2dTwoHop, {l1, l2}, owner++);
                break;
            }
        }
    }
    return prob;
}

/**
 * \brief One Monte Carlo iteration: deployment, gains, mode selection,
 *        random allocation, power control, measurement.
 *
 * The drop stream is derived from (seed, drop_index), so drops may run in
 * any order, on any number of workers, with identical results. Solver and
 * placement failures surface as a flagged drop rather than an exception.
 */
inline DropStats run_drop(const SimConfig& cfg, int drop_index) {
    DropStats stats;
    stats.drop_index = drop_index;
    std::mt19937_64 rng = drop_rng(cfg.seed, static_cast<std::uint64_t>(drop_index));
    try {
        Deployment dep = generate_deployment(cfg.deployment, cfg.scenario, rng);
        dep.gains = build_gain_table(dep.nodes, cfg.channel, rng);
        const std::vector<ModeDecision> modes = select_modes(cfg.ms_policy, dep);
        const AllocationProblem prob = build_allocation_problem(dep, modes, cfg.channel.num_rbs);
        const RoutingMatrix rm = allocate_random(prob, rng);
        const DropEnv env = build_drop_env(dep, rm, prob.link_roles, cfg.channel, cfg.power);

        std::vector<double> p_w;
        if (cfg.pc_scheme == PcScheme::UtilityMax) {
            UmConfig um = cfg.um;
            um.omega = cfg.omega;
            UmResult um_res = um_solve(env, um);
            if (um_res.failed) {
                stats.failed = true;
                return stats;
            }
            p_w = std::move(um_res.powers_w);
        } else {
            p_w = lte_powers(env, cfg.pc_scheme, cfg.power, cfg.um.inner_iters);
        }

        const std::vector<double> sinr = all_sinrs(env, p_w);
        const std::vector<double> caps = link_capacities(env, sinr);
        const std::vector<double> rates = route_rates(env.rm, caps);

        const std::size_t n_ues = dep.cellular_ues.size();
        stats.records.resize(n_ues + dep.triplets.size());
        for (std::size_t i = 0; i < env.rm.routes.size(); ++i) {
            const Route& r = env.rm.routes[i];
            EntityRecord rec;
            rec.cls = (static_cast<std::size_t>(r.owner) < n_ues) ? EntityClass::CellularUe
                                                                  : EntityClass::D2dCandidate;
            rec.mode = (rec.cls == EntityClass::CellularUe)
                           ? ModeDecision::Cellular
                           : modes[static_cast<std::size_t>(r.owner) - n_ues];
            rec.hops = hops(r);
            double min_sinr = std::numeric_limits<double>::infinity();
            for (int h = 0; h < hops(r); ++h) {
                const int l = r.hop_links[h];
                min_sinr = std::min(min_sinr, sinr[l]);
                rec.hop_power_dbm[h] = watt_to_dbm(p_w[l]);
                rec.cell = dep.nodes[env.rm.links[l].tx_node].cell;
            }
            rec.sinr_db = linear_to_db(min_sinr);
            rec.rate_bps = rates[i];
            stats.records[r.owner] = rec;
        }
        for (int l = 0; l < env.num_links(); ++l) {
            if (env.radio[l].controllable) stats.total_ue_power_w += p_w[l];
        }
    } catch (const std::runtime_error&) {
        stats.failed = true;
        stats.records.clear();
        stats.total_ue_power_w = 0.0;
    }
    return stats;
}

/// Runs every drop on \p workers threads; output is worker-count invariant.
inline std::vector<DropStats> run_all_drops(const SimConfig& cfg, int workers = 0) {
    validate(cfg);
    if (workers <= 0) {
        const unsigned hw = std::thread::hardware_concurrency();
        workers = static_cast<int>(hw > 0 ? hw : 1);
    }
    workers = std::min(workers, cfg.drops);
    std::vector<DropStats> out(cfg.drops);
    std::atomic<int> next{0};
    auto worker = [&]() {
        for (;;) {
            const int i = next.fetch_add(1);
            if (i >= cfg.drops) return;
            out[i] = run_drop(cfg, i);
        }
    };
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    return out;
}

struct AggregateStats {
    std::vector<double> sinr_cellular_db; ///< sorted, pooled over drops
    std::vector<double> sinr_d2d_db;      ///< sorted, pooled over drops
    long total_drops = 0;
    long failed_drops = 0;
    std::optional<double> median_sinr_cellular_db;
    std::optional<double> median_sinr_d2d_db;
    std::optional<double> p_d2d_sinr_below_0db;
    std::optional<double> mean_throughput_mbps; ///< over all entity records
    std::optional<double> mean_total_ue_power_w; ///< per drop, averaged
};

/// q-quantile (0..1) of a sorted sample, linear interpolation.
inline double quantile(const std::vector<double>& sorted, double q) {
    if (sorted.empty()) throw std::invalid_argument("quantile: empty sample");
    if (sorted.size() == 1) return sorted[0];
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const std::size_t k = static_cast<std::size_t>(pos);
    if (k + 1 >= sorted.size()) return sorted.back();
    const double frac = pos - static_cast<double>(k);
    return sorted[k] * (1.0 - frac) + sorted[k + 1] * frac;
}

inline AggregateStats aggregate(const std::vector<DropStats>& drops) {
    AggregateStats agg;
    agg.total_drops = static_cast<long>(drops.size());
    double rate_sum = 0.0, power_sum = 0.0;
    long n_records = 0, n_ok_drops = 0;
    for (const DropStats& d : drops) {
        if (d.failed) {
            ++agg.failed_drops;
            continue;
        }
        ++n_ok_drops;
        power_sum += d.total_ue_power_w;
        for (const EntityRecord& r : d.records) {
            (r.cls == EntityClass::CellularUe ? agg.sinr_cellular_db : agg.sinr_d2d_db)
                .push_back(r.sinr_db);
            rate_sum += r.rate_bps;
            ++n_records;
        }
    }
    std::sort(agg.sinr_cellular_db.begin(), agg.sinr_cellular_db.end());
    std::sort(agg.sinr_d2d_db.begin(), agg.sinr_d2d_db.end());
    if (!agg.sinr_cellular_db.empty())
        agg.median_sinr_cellular_db = quantile(agg.sinr_cellular_db, 0.5);
    if (!agg.sinr_d2d_db.empty()) {
        agg.median_sinr_d2d_db = quantile(agg.sinr_d2d_db, 0.5);
        const auto below = std::lower_bound(agg.sinr_d2d_db.begin(), agg.sinr_d2d_db.end(), 0.0);
        agg.p_d2d_sinr_below_0db =
            static_cast<double>(below - agg.sinr_d2d_db.begin()) / agg.sinr_d2d_db.size();
    }
    if (n_records > 0) agg.mean_throughput_mbps = rate_sum / n_records / 1e6;
    if (n_ok_drops > 0) agg.mean_total_ue_power_w = power_sum / n_ok_drops;
    return agg;
}

} // namespace d2dsim

#endif // D2DSIM_SIM_HPP
