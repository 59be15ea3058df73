/**
 * \file d2dsim/routing.hpp
 *
 * \brief Links, one- and two-hop routes, the link/route/resource tensor and
 *        its feasibility checks.
 *
 * The tensor is stored sparsely as per-route hop lists; the dense L x I x Q
 * boolean form is a derived view intended for verification.
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

#ifndef D2DSIM_ROUTING_HPP
#define D2DSIM_ROUTING_HPP

#include <cstdint>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <d2dsim/geometry.hpp>

namespace d2dsim {

/// A single-hop transmission between a Tx-Rx node pair.
struct Link {
    int tx_node = -1;
    int rx_node = -1;
};

enum class RouteKind {
    CellularDirect,      ///< uplink straight to the serving BS
    CellularTwoHopViaBs, ///< device pair connected through the BS (up + down hop)
    D2dSingleHop,
    D2dTwoHop,
};

/// A concatenation of one or two links between a source-destination pair.
struct Route {
    RouteKind kind = RouteKind::CellularDirect;
    std::vector<int> hop_links;     ///< 1 or 2 link ids, in hop order
    std::vector<int> hop_resources; ///< same length; -1 while unassigned
    int owner = -1;                 ///< opaque entity id attached by the driver
};

struct RoutingMatrix {
    int num_links = 0;
    int num_routes = 0;
    int num_resources = 0;
    std::vector<Link> links;
    std::vector<Route> routes;
};

/// Number of hops of a route.
inline int hops(const Route& r) { return static_cast<int>(r.hop_links.size()); }

/// (link, resource) carried by hop \p h (0-based) of a route.
inline std::pair<int, int> hop_link_resource(const Route& r, int h) {
    if (h < 0 || h >= hops(r)) throw std::out_of_range("hop_link_resource: hop index out of range");
    return {r.hop_links[h], r.hop_resources[h]};
}

/**
 * \brief Collapses the tensor over resources into the L x I 0/1 matrix whose
 *        (l, i) entry says whether link l serves route i on some resource.
 *
 * Throws std::runtime_error if any entry would exceed 1 (a route may not
 * spread one link over several resources).
 */
inline std::vector<std::vector<std::uint8_t>> equivalent_routing_matrix(const RoutingMatrix& rm) {
    std::vector<std::vector<std::uint8_t>> eq(rm.num_links,
                                              std::vector<std::uint8_t>(rm.routes.size(), 0));
    for (std::size_t i = 0; i < rm.routes.size(); ++i) {
        for (int l : rm.routes[i].hop_links) {
            if (l < 0 || l >= rm.num_links)
                throw std::runtime_error("equivalent_routing_matrix: link id out of range");
            if (eq[l][i] != 0)
                throw std::runtime_error("equivalent_routing_matrix: entry above 1 at link " +
                                         std::to_string(l) + ", route " + std::to_string(i));
            eq[l][i] = 1;
        }
    }
    return eq;
}

/// Dense L x I x Q view of the tensor, flattened as ((l * I) + i) * Q + q.
inline std::vector<std::uint8_t> dense_routing_tensor(const RoutingMatrix& rm) {
    const std::size_t li = std::size_t(rm.num_links) * rm.routes.size();
    std::vector<std::uint8_t> t(li * rm.num_resources, 0);
    for (std::size_t i = 0; i < rm.routes.size(); ++i) {
        const Route& r = rm.routes[i];
        for (int h = 0; h < hops(r); ++h) {
            const auto [l, q] = hop_link_resource(r, h);
            t[(std::size_t(l) * rm.routes.size() + i) * rm.num_resources + q] = 1;
        }
    }
    return t;
}

enum class ViolationKind {
    Structural,            ///< malformed route/link/resource bookkeeping
    MultipleReceivers,     ///< a UE transmitter serving more than one link
    RelayHalfDuplex,       ///< a two-hop route receiving and sending on one resource
    CellularOrthogonality, ///< two cellular uplinks of one cell on one resource
};

struct Violation {
    ViolationKind kind = ViolationKind::Structural;
    int route = -1;
    int link = -1;
    int node = -1;
    int resource = -1;
    std::string message;
};

/**
 * \brief Checks a fully-allocated tensor against the feasibility rules:
 *        (a) a UE transmitter (device or cellular) feeds at most one link,
 *        (b) the two hops of a route use distinct resources,
 *        (c) cellular uplinks terminating at one BS stay orthogonal.
 *
 * Device-layer links may reuse any resource, including inside the cell;
 * only transmissions of cellular UEs are bound by (c). Returns the list of
 * violations (empty means valid) and never throws.
 */
inline std::vector<Violation> validate(const RoutingMatrix& rm,
                                       std::span<const NodeKind> node_kinds) {
    std::vector<Violation> out;
    std::vector<int> link_use(rm.num_links, 0);
    std::map<int, int> tx_use;                 // UE node -> distinct active links
    std::map<std::pair<int, int>, int> bs_use; // (BS node, resource) -> cellular uplinks

    for (std::size_t i = 0; i < rm.routes.size(); ++i) {
        const Route& r = rm.routes[i];
        const int f = hops(r);
        if (f < 1 || f > 2 || r.hop_resources.size() != r.hop_links.size()) {
            out.push_back({ViolationKind::Structural, static_cast<int>(i), -1, -1, -1,
                           "route must have 1 or 2 hops with matching resource list"});
            continue;
        }
        for (int h = 0; h < f; ++h) {
            const int l = r.hop_links[h];
            const int q = r.hop_resources[h];
            if (l < 0 || l >= rm.num_links || q < 0 || q >= rm.num_resources) {
                out.push_back({ViolationKind::Structural, static_cast<int>(i), l, -1, q,
                               "link or resource index out of range"});
                continue;
            }
            if (++link_use[l] > 1) {
                out.push_back({ViolationKind::Structural, static_cast<int>(i), l, -1, q,
                               "link assigned to more than one (route, hop)"});
            }
            const Link& lk = rm.links[l];
            if (node_kinds[lk.tx_node] != NodeKind::BaseStation) {
                ++tx_use[lk.tx_node];
            }
            if (node_kinds[lk.rx_node] == NodeKind::BaseStation &&
                node_kinds[lk.tx_node] == NodeKind::CellularUe) {
                ++bs_use[{lk.rx_node, q}];
            }
        }
        if (f == 2 && r.hop_resources[0] == r.hop_resources[1] && r.hop_resources[0] >= 0) {
            out.push_back({ViolationKind::RelayHalfDuplex, static_cast<int>(i),
                           r.hop_links[0], -1, r.hop_resources[0],
                           "incoming and outgoing hop share a resource"});
        }
    }
    for (const auto& [node, count] : tx_use) {
        if (count > 1) {
            out.push_back({ViolationKind::MultipleReceivers, -1, -1, node, -1,
                           "UE transmitter feeds " + std::to_string(count) + " links"});
        }
    }
    for (const auto& [key, count] : bs_use) {
        if (count > 1) {
            out.push_back({ViolationKind::CellularOrthogonality, -1, -1, key.first, key.second,
                           "cellular uplinks collide on one resource at a BS"});
        }
    }
    return out;
}

} // namespace d2dsim

#endif // D2DSIM_ROUTING_HPP
