/**
 * \file d2dsim/geometry.hpp
 *
 * \brief Random multi-cell deployments and large-scale channel gains.
 *
 * A deployment drops base stations on a hexagonal cluster, scatters
 * cellular UEs and device triplets (transmitter, relay, receiver) into
 * the cells under minimum-distance constraints, and tabulates the
 * distance-based channel gain with log-normal shadowing for every node
 * pair of the drop.
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

#ifndef D2DSIM_GEOMETRY_HPP
#define D2DSIM_GEOMETRY_HPP

#include <cmath>
#include <cstddef>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <d2dsim/units.hpp>

namespace d2dsim {

enum class ScenarioKind {
    ProximityCommunication,
    RangeExtension,
};

enum class RelayPlacement {
    MidpointDisk, ///< uniform in the disk whose diameter is the Tx-endpoint segment
    UniformCell,  ///< uniform anywhere in the serving cell
};

enum class NodeKind {
    BaseStation,
    CellularUe,
    D2dTx,
    D2dRelay,
    D2dRx,
};

struct Vec2 {
    double x = 0.0;
    double y = 0.0;
};

inline double distance(const Vec2& a, const Vec2& b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

struct DeploymentConfig {
    int num_cells = 7;
    double cell_radius_m = 500.0;
    double min_bs_ue_m = 50.0; ///< 400 m in the range-extension setup
    double min_ue_ue_m = 10.0;
    double mean_d2d_pair_m = 100.0;
    int cellular_ues_per_cell = 6;
    int d2d_triplets_per_cell = 6; ///< 18 in the range-extension setup
    RelayPlacement relay_placement = RelayPlacement::MidpointDisk;
    int max_place_attempts = 20000;
};

struct ChannelParams {
    double gain_1m_db = -37.0;
    double pathloss_exponent = 3.5;
    double shadowing_sigma_db = 8.0;
    double noise_per_rb_dbm = -116.4;
    double rb_bandwidth_hz = 180e3;
    double carrier_hz = 2e9;
    int num_rbs = 18;
    bool fast_fading = false; ///< unit-mean Rayleigh (exponential power) per node pair per drop
};

inline void validate(const DeploymentConfig& c) {
    if (c.num_cells < 1) throw std::invalid_argument("deployment: num_cells must be >= 1");
    if (c.cell_radius_m <= 0 || c.min_bs_ue_m <= 0 || c.min_ue_ue_m <= 0 || c.mean_d2d_pair_m <= 0)
        throw std::invalid_argument("deployment: all distances must be strictly positive");
    if (c.min_bs_ue_m >= c.cell_radius_m)
        throw std::invalid_argument("deployment: min_bs_ue_m must be below cell_radius_m");
    if (c.cellular_ues_per_cell < 0 || c.d2d_triplets_per_cell < 0)
        throw std::invalid_argument("deployment: counts must be >= 0");
    if (c.max_place_attempts < 1)
        throw std::invalid_argument("deployment: max_place_attempts must be >= 1");
}

inline void validate(const ChannelParams& c) {
    if (c.pathloss_exponent <= 2.0)
        throw std::invalid_argument("channel: pathloss_exponent must exceed 2");
    if (c.shadowing_sigma_db < 0.0)
        throw std::invalid_argument("channel: shadowing_sigma_db must be >= 0");
    if (c.rb_bandwidth_hz <= 0.0)
        throw std::invalid_argument("channel: rb_bandwidth_hz must be positive");
    if (c.num_rbs < 1)
        throw std::invalid_argument("channel: num_rbs must be >= 1");
}

/**
 * \brief Distance-based gain in dB: reference gain at 1 m, power-law decay,
 *        plus a shadowing term supplied by the caller.
 *
 * Distances below 1 m are clamped to 1 m, which makes this a total function.
 */
inline double path_gain_db(double d_m, double shadow_db, const ChannelParams& p) {
    const double d = std::max(d_m, 1.0);
    return p.gain_1m_db - 10.0 * p.pathloss_exponent * std::log10(d) + shadow_db;
}

/**
 * \brief Symmetric table of linear power gains for every node pair of a drop.
 *
 * One shadowing draw (and, when enabled, one fast-fading draw) per unordered
 * pair; direction is an indexing convention only. Self pairs carry the
 * clamped 1 m gain without shadowing.
 */
class GainTable {
public:
    GainTable() = default;
    explicit GainTable(int n) : n_(n), large_scale_(std::size_t(n) * n, 0.0) {}

    int size() const { return n_; }
    bool empty() const { return n_ == 0; }
    bool has_fading() const { return !fading_.empty(); }

    double large_scale(int a, int b) const { return large_scale_[idx(a, b)]; }
    double large_scale_db(int a, int b) const { return linear_to_db(large_scale(a, b)); }

    /// Effective gain: large-scale times the optional fast-fading factor.
    double effective(int a, int b) const {
        const double g = large_scale_[idx(a, b)];
        return fading_.empty() ? g : g * fading_[idx(a, b)];
    }
    double effective_db(int a, int b) const { return linear_to_db(effective(a, b)); }

    void set_large_scale(int a, int b, double g) {
        large_scale_[idx(a, b)] = g;
        large_scale_[idx(b, a)] = g;
    }
    void set_fading(int a, int b, double f) {
        if (fading_.empty()) fading_.assign(std::size_t(n_) * n_, 1.0);
        fading_[idx(a, b)] = f;
        fading_[idx(b, a)] = f;
    }

    bool operator==(const GainTable& o) const {
        return n_ == o.n_ && large_scale_ == o.large_scale_ && fading_ == o.fading_;
    }

private:
    std::size_t idx(int a, int b) const { return std::size_t(a) * n_ + b; }

    int n_ = 0;
    std::vector<double> large_scale_;
    std::vector<double> fading_; ///< empty unless fast fading is enabled
};

struct Node {
    NodeKind kind = NodeKind::BaseStation;
    int cell = -1;
    Vec2 pos;
};

struct Deployment {
    ScenarioKind scenario = ScenarioKind::ProximityCommunication;
    std::vector<Node> nodes; ///< base stations first, then UEs in drop order

    struct CellularUe {
        int node = -1;
        int cell = -1;
    };
    struct Triplet {
        int tx = -1;
        int relay = -1;
        int rx = -1; ///< generated but unused in the range-extension scenario
        int cell = -1;
    };

    std::vector<int> bs_of_cell;
    std::vector<CellularUe> cellular_ues;
    std::vector<Triplet> triplets;
    GainTable gains;

    int num_nodes() const { return static_cast<int>(nodes.size()); }
    double gain(int a, int b) const { return gains.effective(a, b); }
    double gain_db(int a, int b) const { return gains.effective_db(a, b); }
    double gain_large_scale(int a, int b) const { return gains.large_scale(a, b); }
    double gain_large_scale_db(int a, int b) const { return gains.large_scale_db(a, b); }
};

/// Centers of \p n hexagonal cells (circumradius \p r) in a spiral cluster.
inline std::vector<Vec2> hex_cell_centers(int n, double r) {
    // Lattice basis chosen so that adjacent centers sit across shared edges
    // of flat-topped hexagons with circumradius r.
    const double d = std::sqrt(3.0) * r;
    const Vec2 e1{d * std::cos(M_PI / 6.0), d * std::sin(M_PI / 6.0)};
    const Vec2 e2{0.0, d};
    const int dirs[6][2] = {{1, 0}, {0, 1}, {-1, 1}, {-1, 0}, {0, -1}, {1, -1}};

    std::vector<Vec2> centers;
    centers.push_back({0.0, 0.0});
    int ring = 1;
    while (static_cast<int>(centers.size()) < n) {
        int q = 0, s = -ring; // start one ring step along direction 4
        for (int side = 0; side < 6 && static_cast<int>(centers.size()) < n; ++side) {
            for (int step = 0; step < ring && static_cast<int>(centers.size()) < n; ++step) {
                centers.push_back({q * e1.x + s * e2.x, q * e1.y + s * e2.y});
                q += dirs[side][0];
                s += dirs[side][1];
            }
        }
        ++ring;
    }
    return centers;
}

/// Point-in-hexagon test for a flat-topped hexagon with circumradius r.
inline bool point_in_hex(const Vec2& p, const Vec2& center, double r) {
    const double in_r = std::sqrt(3.0) / 2.0 * r;
    const double vx = p.x - center.x;
    const double vy = p.y - center.y;
    for (int k = 0; k < 3; ++k) {
        const double ang = M_PI / 6.0 + k * M_PI / 3.0;
        if (std::abs(vx * std::cos(ang) + vy * std::sin(ang)) > in_r + 1e-9) return false;
    }
    return true;
}

namespace detail {

inline Vec2 sample_in_hex(const Vec2& center, double r, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-r, r);
    for (;;) {
        Vec2 p{center.x + u(rng), center.y + u(rng)};
        if (point_in_hex(p, center, r)) return p;
    }
}

inline Vec2 sample_in_disk(const Vec2& center, double radius, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u01(0.0, 1.0);
    const double rr = radius * std::sqrt(u01(rng));
    const double ang = 2.0 * M_PI * u01(rng);
    return {center.x + rr * std::cos(ang), center.y + rr * std::sin(ang)};
}

} // namespace detail

/**
 * \brief Drops base stations, cellular UEs and D2D triplets for one Monte
 *        Carlo iteration. Gains are added separately by build_gain_table().
 *
 * Cellular UEs and D2D transmitters are drawn uniformly in their cell's
 * hexagon, rejected until they respect the minimum BS distance (to every
 * base station) and the minimum UE distance (to every previously accepted
 * uniformly-dropped UE). The D2D receiver sits at an exponentially
 * distributed distance (uniform angle) from its transmitter; the relay is
 * uniform in the disk spanned by the transmitter and the route endpoint
 * (receiver, or serving BS in the range-extension scenario). Derived
 * placements carry no minimum-distance constraints of their own.
 *
 * Throws std::runtime_error when rejection sampling exceeds the attempt cap.
 */
inline Deployment generate_deployment(const DeploymentConfig& cfg, ScenarioKind scenario,
                                      std::mt19937_64& rng) {
    validate(cfg);

    Deployment dep;
    dep.scenario = scenario;

    const std::vector<Vec2> centers = hex_cell_centers(cfg.num_cells, cfg.cell_radius_m);
    dep.bs_of_cell.resize(cfg.num_cells);
    for (int c = 0; c < cfg.num_cells; ++c) {
        dep.bs_of_cell[c] = static_cast<int>(dep.nodes.size());
        dep.nodes.push_back({NodeKind::BaseStation, c, centers[c]});
    }

    std::vector<Vec2> dropped_ues; // uniformly dropped UEs, for the UE-UE constraint
    auto place_constrained = [&](int cell) -> Vec2 {
        for (int attempt = 0; attempt < cfg.max_place_attempts; ++attempt) {
            const Vec2 p = detail::sample_in_hex(centers[cell], cfg.cell_radius_m, rng);
            bool ok = true;
            for (const Vec2& bs : centers) {
                if (distance(p, bs) < cfg.min_bs_ue_m) { ok = false; break; }
            }
            if (ok) {
                for (const Vec2& q : dropped_ues) {
                    if (distance(p, q) < cfg.min_ue_ue_m) { ok = false; break; }
                }
            }
            if (ok) return p;
        }
        throw std::runtime_error("generate_deployment: placement attempts exhausted in cell " +
                                 std::to_string(cell) + " (infeasible config?)");
    };

    std::uniform_real_distribution<double> angle(0.0, 2.0 * M_PI);
    std::exponential_distribution<double> pair_dist(1.0 / cfg.mean_d2d_pair_m);

    for (int c = 0; c < cfg.num_cells; ++c) {
        for (int k = 0; k < cfg.cellular_ues_per_cell; ++k) {
            const Vec2 p = place_constrained(c);
            dropped_ues.push_back(p);
            const int id = static_cast<int>(dep.nodes.size());
            dep.nodes.push_back({NodeKind::CellularUe, c, p});
            dep.cellular_ues.push_back({id, c});
        }
    }
    for (int c = 0; c < cfg.num_cells; ++c) {
        for (int k = 0; k < cfg.d2d_triplets_per_cell; ++k) {
            const Vec2 tx = place_constrained(c);
            dropped_ues.push_back(tx);

            const double d = pair_dist(rng);
            const double a = angle(rng);
            const Vec2 rx{tx.x + d * std::cos(a), tx.y + d * std::sin(a)};

            const Vec2 anchor =
                (scenario == ScenarioKind::RangeExtension) ? centers[c] : rx;
            Vec2 relay;
            if (cfg.relay_placement == RelayPlacement::UniformCell) {
                relay = detail::sample_in_hex(centers[c], cfg.cell_radius_m, rng);
            } else {
                const Vec2 mid{(tx.x + anchor.x) / 2.0, (tx.y + anchor.y) / 2.0};
                relay = detail::sample_in_disk(mid, distance(tx, anchor) / 2.0, rng);
            }

            Deployment::Triplet t;
            t.cell = c;
            t.tx = static_cast<int>(dep.nodes.size());
            dep.nodes.push_back({NodeKind::D2dTx, c, tx});
            t.relay = static_cast<int>(dep.nodes.size());
            dep.nodes.push_back({NodeKind::D2dRelay, c, relay});
            t.rx = static_cast<int>(dep.nodes.size());
            dep.nodes.push_back({NodeKind::D2dRx, c, rx});
            dep.triplets.push_back(t);
        }
    }
    return dep;
}

/**
 * \brief Builds the pairwise gain table of a drop: one shadowing draw per
 *        unordered node pair, flat across all resource blocks.
 */
inline GainTable build_gain_table(const std::vector<Node>& nodes, const ChannelParams& params,
                                  std::mt19937_64& rng) {
    validate(params);
    const int n = static_cast<int>(nodes.size());
    GainTable table(n);
    std::normal_distribution<double> shadow(0.0, params.shadowing_sigma_db);
    std::exponential_distribution<double> rayleigh_power(1.0);
    for (int i = 0; i < n; ++i) {
        table.set_large_scale(i, i, db_to_linear(path_gain_db(0.0, 0.0, params)));
        for (int j = i + 1; j < n; ++j) {
            const double s = (params.shadowing_sigma_db > 0.0) ? shadow(rng) : 0.0;
            const double g_db = path_gain_db(distance(nodes[i].pos, nodes[j].pos), s, params);
            table.set_large_scale(i, j, db_to_linear(g_db));
            if (params.fast_fading) {
                table.set_fading(i, j, std::max(rayleigh_power(rng), 1e-12));
            }
        }
    }
    return table;
}

} // namespace d2dsim

#endif // D2DSIM_GEOMETRY_HPP
