/**
 * \file d2dsim/resalloc.hpp
 *
 * \brief Random assignment of one resource block per link.
 *
 * Cellular uplinks of one cell draw distinct resources (sampling without
 * replacement); device-layer hops and BS downlink hops draw uniformly from
 * the full pool, resampled only until the two hops of a route differ.
 * Device links reusing cellular resources inside the cell is intentional.
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

#ifndef D2DSIM_RESALLOC_HPP
#define D2DSIM_RESALLOC_HPP

#include <algorithm>
#include <map>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

#include <d2dsim/routing.hpp>

namespace d2dsim {

enum class LinkRole {
    CellularUplink, ///< cellular UE to its serving BS; orthogonal inside the cell
    D2dHop,         ///< any device-transmitted hop of a D2D candidate's route
    BsDownlink,     ///< fixed-power BS hop toward a device receiver
};

struct AllocationProblem {
    RoutingMatrix skeleton;           ///< routes with hop_resources = -1
    std::vector<LinkRole> link_roles; ///< one per link
    std::vector<int> link_cell;       ///< transmitter's cell, one per link
    int num_resources = 0;
};

/**
 * \brief Draws one resource per hop, honoring intracell orthogonality for
 *        cellular uplinks and the per-route half-duplex rule.
 *
 * Throws std::runtime_error when a cell holds more cellular uplinks than
 * resources, or when a two-hop route exists with fewer than two resources.
 */
inline RoutingMatrix allocate_random(const AllocationProblem& problem, std::mt19937_64& rng) {
    RoutingMatrix rm = problem.skeleton;
    rm.num_resources = problem.num_resources;
    const int q_count = problem.num_resources;
    if (q_count < 1) throw std::runtime_error("allocate_random: no resources");

    for (const Route& r : rm.routes) {
        if (hops(r) == 2 && q_count < 2)
            throw std::runtime_error("allocate_random: two-hop route needs at least 2 resources");
    }

    // (a) cellular uplinks per cell, without replacement
    std::map<int, std::vector<int>> cellular_by_cell;
    for (int l = 0; l < rm.num_links; ++l) {
        if (problem.link_roles[l] == LinkRole::CellularUplink) {
            cellular_by_cell[problem.link_cell[l]].push_back(l);
        }
    }
    std::vector<int> assigned(rm.num_links, -1);
    for (auto& [cell, links] : cellular_by_cell) {
        if (static_cast<int>(links.size()) > q_count)
            throw std::runtime_error("allocate_random: cell " + std::to_string(cell) + " has " +
                                     std::to_string(links.size()) + " cellular uplinks for " +
                                     std::to_string(q_count) + " resources");
        std::vector<int> pool(q_count);
        std::iota(pool.begin(), pool.end(), 0);
        std::shuffle(pool.begin(), pool.end(), rng);
        for (std::size_t k = 0; k < links.size(); ++k) assigned[links[k]] = pool[k];
    }

    // (b) remaining hops uniformly, second hop resampled until it differs
    std::uniform_int_distribution<int> uq(0, q_count - 1);
    for (Route& r : rm.routes) {
        for (int h = 0; h < hops(r); ++h) {
            const int l = r.hop_links[h];
            if (assigned[l] >= 0) {
                r.hop_resources[h] = assigned[l];
                continue;
            }
            int q = uq(rng);
            if (h == 1) {
                while (q == r.hop_resources[0]) q = uq(rng);
            }
            r.hop_resources[h] = q;
            assigned[l] = q;
        }
    }
    return rm;
}

} // namespace d2dsim

#endif // D2DSIM_RESALLOC_HPP
