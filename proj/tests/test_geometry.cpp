// Copyright 2026 the d2dsim authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>

#include <d2dsim/geometry.hpp>
#include <d2dsim/rng.hpp>

using namespace d2dsim;
using Catch::Approx;

TEST_CASE("hex cluster geometry") {
    const auto centers = hex_cell_centers(7, 500.0);
    REQUIRE(centers.size() == 7);
    REQUIRE(centers[0].x == 0.0);
    // ring cells sit at the lattice spacing sqrt(3) * r
    for (int c = 1; c < 7; ++c) {
        REQUIRE(distance(centers[0], centers[c]) == Approx(std::sqrt(3.0) * 500.0));
    }
    // spiral extension: distinct centers, adjacent spacing preserved
    const auto big = hex_cell_centers(19, 500.0);
    REQUIRE(big.size() == 19);
    double min_spacing = 1e18;
    for (std::size_t a = 0; a < big.size(); ++a) {
        for (std::size_t b = a + 1; b < big.size(); ++b) {
            min_spacing = std::min(min_spacing, distance(big[a], big[b]));
        }
    }
    REQUIRE(min_spacing == Approx(std::sqrt(3.0) * 500.0));
    // cells do not overlap: a sample inside one hexagon is in no other
    std::mt19937_64 rng(1);
    for (int k = 0; k < 200; ++k) {
        const Vec2 p = detail::sample_in_hex(centers[3], 500.0, rng);
        for (int c = 0; c < 7; ++c) {
            if (c != 3) REQUIRE_FALSE(point_in_hex(p, centers[c], 500.0 * (1 - 1e-9)));
        }
    }
}

TEST_CASE("empty drop keeps only base stations") {
    DeploymentConfig cfg;
    cfg.cellular_ues_per_cell = 0;
    cfg.d2d_triplets_per_cell = 0;
    std::mt19937_64 rng(7);
    const Deployment dep = generate_deployment(cfg, ScenarioKind::ProximityCommunication, rng);
    REQUIRE(dep.nodes.size() == 7);
    for (const Node& n : dep.nodes) REQUIRE(n.kind == NodeKind::BaseStation);
    REQUIRE(dep.cellular_ues.empty());
    REQUIRE(dep.triplets.empty());
}

TEST_CASE("minimum distances hold over many drops") {
    for (ScenarioKind scen :
         {ScenarioKind::ProximityCommunication, ScenarioKind::RangeExtension}) {
        DeploymentConfig cfg;
        if (scen == ScenarioKind::RangeExtension) {
            cfg.min_bs_ue_m = 400.0;
            cfg.d2d_triplets_per_cell = 18;
        }
        for (int d = 0; d < 100; ++d) {
            std::mt19937_64 rng = drop_rng(99, d);
            const Deployment dep = generate_deployment(cfg, scen, rng);
            std::vector<Vec2> dropped;
            for (const auto& ue : dep.cellular_ues) dropped.push_back(dep.nodes[ue.node].pos);
            for (const auto& t : dep.triplets) dropped.push_back(dep.nodes[t.tx].pos);
            for (const Vec2& p : dropped) {
                for (int c = 0; c < cfg.num_cells; ++c) {
                    REQUIRE(distance(p, dep.nodes[dep.bs_of_cell[c]].pos) >=
                            cfg.min_bs_ue_m - 1e-9);
                }
            }
            for (std::size_t a = 0; a < dropped.size(); ++a) {
                for (std::size_t b = a + 1; b < dropped.size(); ++b) {
                    REQUIRE(distance(dropped[a], dropped[b]) >= cfg.min_ue_ue_m - 1e-9);
                }
            }
        }
    }
}

TEST_CASE("pair distance follows the configured mean") {
    DeploymentConfig cfg;
    cfg.cellular_ues_per_cell = 0;
    cfg.d2d_triplets_per_cell = 15;
    double sum = 0.0;
    long n = 0;
    for (int d = 0; d < 100; ++d) {
        std::mt19937_64 rng = drop_rng(123, d);
        const Deployment dep = generate_deployment(cfg, ScenarioKind::ProximityCommunication, rng);
        for (const auto& t : dep.triplets) {
            sum += distance(dep.nodes[t.tx].pos, dep.nodes[t.rx].pos);
            ++n;
        }
    }
    REQUIRE(n >= 10000);
    REQUIRE(std::abs(sum / n - 100.0) / 100.0 < 0.05);
}

TEST_CASE("path gain closed forms") {
    ChannelParams chan;
    REQUIRE(path_gain_db(1.0, 0.0, chan) == Approx(-37.0));
    REQUIRE(path_gain_db(10.0, 0.0, chan) == Approx(-72.0));
    REQUIRE(path_gain_db(0.5, 0.0, chan) == Approx(-37.0)); // clamped below 1 m
}

TEST_CASE("path gain strictly decreasing in distance") {
    ChannelParams chan;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> u(1.0, 2000.0);
    for (int k = 0; k < 1000; ++k) {
        double d1 = u(rng), d2 = u(rng);
        if (d1 > d2) std::swap(d1, d2);
        if (d2 - d1 < 1e-9) continue;
        REQUIRE(path_gain_db(d1, 3.0, chan) > path_gain_db(d2, 3.0, chan));
    }
}

TEST_CASE("gain table values and positivity") {
    std::vector<Node> nodes = {{NodeKind::D2dTx, 0, {0, 0}}, {NodeKind::D2dRx, 0, {1, 0}}};
    ChannelParams chan;
    chan.shadowing_sigma_db = 0.0;
    std::mt19937_64 rng(3);
    const GainTable t = build_gain_table(nodes, chan, rng);
    REQUIRE(t.effective(0, 1) == Approx(1.9952623149688788e-4).epsilon(1e-12));
    REQUIRE(t.effective(1, 0) == t.effective(0, 1));

    // any pair of a random drop is strictly positive and finite
    DeploymentConfig cfg;
    std::mt19937_64 rng2(4);
    Deployment dep = generate_deployment(cfg, ScenarioKind::ProximityCommunication, rng2);
    ChannelParams chan2;
    dep.gains = build_gain_table(dep.nodes, chan2, rng2);
    for (int a = 0; a < dep.num_nodes(); ++a) {
        for (int b = 0; b < dep.num_nodes(); ++b) {
            REQUIRE(dep.gain(a, b) > 0.0);
            REQUIRE(std::isfinite(dep.gain(a, b)));
        }
    }
    // repeated queries of one pair within the drop agree
    REQUIRE(dep.gain(3, 11) == dep.gain(3, 11));
    REQUIRE(dep.gain(3, 11) == dep.gain(11, 3));
}

TEST_CASE("empirical shadowing deviation matches sigma") {
    // residual of the tabulated gain against the pure distance law is the
    // shadowing draw; pool over one large drop
    DeploymentConfig cfg;
    cfg.cellular_ues_per_cell = 20;
    ChannelParams chan;
    std::mt19937_64 rng(11);
    Deployment dep = generate_deployment(cfg, ScenarioKind::ProximityCommunication, rng);
    dep.gains = build_gain_table(dep.nodes, chan, rng);
    std::vector<double> residuals;
    for (int a = 0; a < dep.num_nodes(); ++a) {
        for (int b = a + 1; b < dep.num_nodes(); ++b) {
            const double expected = path_gain_db(distance(dep.nodes[a].pos, dep.nodes[b].pos),
                                                 0.0, chan);
            residuals.push_back(dep.gain_large_scale_db(a, b) - expected);
        }
    }
    REQUIRE(residuals.size() >= 10000);
    const double mean =
        std::accumulate(residuals.begin(), residuals.end(), 0.0) / residuals.size();
    double var = 0.0;
    for (double r : residuals) var += (r - mean) * (r - mean);
    var /= residuals.size();
    REQUIRE(std::abs(std::sqrt(var) - 8.0) / 8.0 < 0.03);
}

TEST_CASE("deployment is a pure function of config, scenario and seed") {
    DeploymentConfig cfg;
    ChannelParams chan;
    std::mt19937_64 rng_a(77), rng_b(77);
    Deployment a = generate_deployment(cfg, ScenarioKind::RangeExtension, rng_a);
    Deployment b = generate_deployment(cfg, ScenarioKind::RangeExtension, rng_b);
    a.gains = build_gain_table(a.nodes, chan, rng_a);
    b.gains = build_gain_table(b.nodes, chan, rng_b);
    REQUIRE(a.nodes.size() == b.nodes.size());
    for (std::size_t i = 0; i < a.nodes.size(); ++i) {
        REQUIRE(a.nodes[i].pos.x == b.nodes[i].pos.x);
        REQUIRE(a.nodes[i].pos.y == b.nodes[i].pos.y);
    }
    REQUIRE(a.gains == b.gains);
}

TEST_CASE("scenario 2 generates the unused receiver and anchors the relay") {
    DeploymentConfig cfg;
    cfg.min_bs_ue_m = 400.0;
    cfg.d2d_triplets_per_cell = 18;
    std::mt19937_64 rng(21);
    const Deployment dep = generate_deployment(cfg, ScenarioKind::RangeExtension, rng);
    REQUIRE(dep.triplets.size() == 7u * 18u);
    for (const auto& t : dep.triplets) {
        REQUIRE(dep.nodes[t.rx].kind == NodeKind::D2dRx);
        // relay lies in the disk over the Tx-BS segment
        const Vec2 tx = dep.nodes[t.tx].pos;
        const Vec2 bs = dep.nodes[dep.bs_of_cell[t.cell]].pos;
        const Vec2 mid{(tx.x + bs.x) / 2, (tx.y + bs.y) / 2};
        REQUIRE(distance(dep.nodes[t.relay].pos, mid) <= distance(tx, bs) / 2 + 1e-9);
    }
}

TEST_CASE("invalid and infeasible configurations are rejected") {
    DeploymentConfig cfg;
    cfg.min_bs_ue_m = 600.0; // above the cell radius
    std::mt19937_64 rng(1);
    REQUIRE_THROWS_AS(generate_deployment(cfg, ScenarioKind::ProximityCommunication, rng),
                      std::invalid_argument);

    DeploymentConfig tight; // valid but unplaceable: feasible slivers too small
    tight.min_bs_ue_m = 499.99;
    tight.max_place_attempts = 200;
    std::mt19937_64 rng2(2);
    REQUIRE_THROWS_AS(generate_deployment(tight, ScenarioKind::ProximityCommunication, rng2),
                      std::runtime_error);

    ChannelParams chan;
    chan.pathloss_exponent = 1.5;
    std::vector<Node> nodes = {{NodeKind::D2dTx, 0, {0, 0}}};
    std::mt19937_64 rng3(3);
    REQUIRE_THROWS_AS(build_gain_table(nodes, chan, rng3), std::invalid_argument);
}

TEST_CASE("fast fading flag injects a unit-mean factor") {
    DeploymentConfig cfg;
    cfg.num_cells = 1;
    cfg.cellular_ues_per_cell = 40;
    ChannelParams chan;
    chan.fast_fading = true;
    std::mt19937_64 rng(31);
    Deployment dep = generate_deployment(cfg, ScenarioKind::ProximityCommunication, rng);
    dep.gains = build_gain_table(dep.nodes, chan, rng);
    REQUIRE(dep.gains.has_fading());
    double sum = 0.0;
    long n = 0;
    for (int a = 0; a < dep.num_nodes(); ++a) {
        for (int b = a + 1; b < dep.num_nodes(); ++b) {
            sum += dep.gain(a, b) / dep.gain_large_scale(a, b);
            ++n;
        }
    }
    REQUIRE(sum / n == Approx(1.0).margin(0.15));
}
