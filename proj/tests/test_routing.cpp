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

#include <d2dsim/routing.hpp>

#include "test_support.hpp"

using namespace d2dsim;

TEST_CASE("equivalent matrix of the three-route example network") {
    const RoutingMatrix rm = testsup::example_network_tensor();
    const auto eq = equivalent_routing_matrix(rm);
    const std::vector<std::vector<std::uint8_t>> expected = {
        {1, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0, 0, 1}};
    REQUIRE(eq == expected);
}

TEST_CASE("equivalent matrix edge cases") {
    RoutingMatrix empty;
    empty.num_links = 5;
    empty.num_resources = 3;
    empty.links.resize(5);
    const auto eq = equivalent_routing_matrix(empty);
    REQUIRE(eq.size() == 5);
    for (const auto& row : eq) REQUIRE(row.empty());

    RoutingMatrix single;
    single.num_links = 4;
    single.num_resources = 5;
    single.links.resize(4);
    Route r;
    r.kind = RouteKind::D2dSingleHop;
    r.hop_links = {2};
    r.hop_resources = {3};
    single.routes.push_back(r);
    single.num_routes = 1;
    const auto eq1 = equivalent_routing_matrix(single);
    for (int l = 0; l < 4; ++l) REQUIRE(eq1[l][0] == (l == 2 ? 1 : 0));

    // a route may not reuse one link on two resources
    RoutingMatrix dup = single;
    dup.routes[0].hop_links = {2, 2};
    dup.routes[0].hop_resources = {3, 4};
    REQUIRE_THROWS_AS(equivalent_routing_matrix(dup), std::runtime_error);
}

TEST_CASE("equivalent matrix is linear in route sets") {
    const RoutingMatrix rm = testsup::example_network_tensor();
    RoutingMatrix first = rm, second = rm;
    first.routes = {rm.routes[0]};
    first.num_routes = 1;
    second.routes = {rm.routes[1], rm.routes[2]};
    second.num_routes = 2;
    const auto eq = equivalent_routing_matrix(rm);
    const auto ea = equivalent_routing_matrix(first);
    const auto eb = equivalent_routing_matrix(second);
    for (int l = 0; l < rm.num_links; ++l) {
        REQUIRE(int(eq[l][0]) == int(ea[l][0]));
        REQUIRE(int(eq[l][1]) == int(eb[l][0]));
        REQUIRE(int(eq[l][2]) == int(eb[l][1]));
    }
}

TEST_CASE("hop bookkeeping of the example network") {
    const RoutingMatrix rm = testsup::example_network_tensor();
    REQUIRE(hops(rm.routes[0]) == 2);
    REQUIRE(hops(rm.routes[2]) == 2);
    REQUIRE(hops(rm.routes[1]) == 1);

    // route 3, hop 2 carries link 5 on resource 1 (0-based: route 2, hop 1 -> (4, 0))
    const auto [l, q] = hop_link_resource(rm.routes[2], 1);
    REQUIRE(l == 4);
    REQUIRE(q == 0);
    REQUIRE(hop_link_resource(rm.routes[2], 1).first == 4);

    Route degenerate;
    degenerate.hop_links = {7};
    degenerate.hop_resources = {4};
    REQUIRE(hops(degenerate) == 1);
    REQUIRE(hop_link_resource(degenerate, 0) == std::pair<int, int>{7, 4});
    REQUIRE_THROWS_AS(hop_link_resource(degenerate, 1), std::out_of_range);
    REQUIRE_THROWS_AS(hop_link_resource(degenerate, -1), std::out_of_range);
}

TEST_CASE("dense tensor round-trips the hop functions") {
    const RoutingMatrix rm = testsup::example_network_tensor();
    const auto t = dense_routing_tensor(rm);
    const auto at = [&](int l, int i, int q) {
        return t[(std::size_t(l) * rm.routes.size() + i) * rm.num_resources + q];
    };
    long ones = 0;
    for (std::size_t i = 0; i < rm.routes.size(); ++i) {
        for (int h = 0; h < hops(rm.routes[i]); ++h) {
            const auto [l, q] = hop_link_resource(rm.routes[i], h);
            REQUIRE(at(l, static_cast<int>(i), q) == 1);
        }
    }
    for (std::uint8_t v : t) ones += v;
    REQUIRE(ones == 5); // exactly the five hops of the example
}

TEST_CASE("validate accepts the example network") {
    const RoutingMatrix rm = testsup::example_network_tensor();
    const auto kinds = testsup::example_network_node_kinds();
    REQUIRE(validate(rm, kinds).empty());
}

TEST_CASE("single-constraint mutations flag exactly the mutated constraint") {
    const RoutingMatrix rm = testsup::example_network_tensor();
    const auto kinds = testsup::example_network_node_kinds();

    SECTION("half duplex") {
        RoutingMatrix m = rm;
        m.routes[0].hop_resources = {1, 1};
        const auto v = validate(m, kinds);
        REQUIRE(v.size() == 1);
        REQUIRE(v[0].kind == ViolationKind::RelayHalfDuplex);
        REQUIRE(v[0].route == 0);
    }
    SECTION("transmitter feeding two receivers") {
        RoutingMatrix m = rm;
        // node 0 gets a second outgoing link used by a second route
        m.links.push_back({0, 4});
        ++m.num_links;
        Route extra;
        extra.kind = RouteKind::D2dSingleHop;
        extra.hop_links = {5};
        extra.hop_resources = {1};
        m.routes.push_back(extra);
        ++m.num_routes;
        const auto v = validate(m, kinds);
        REQUIRE(v.size() == 1);
        REQUIRE(v[0].kind == ViolationKind::MultipleReceivers);
        REQUIRE(v[0].node == 0);
    }
    SECTION("cellular orthogonality") {
        // two cellular uplinks of one cell on one resource
        RoutingMatrix m;
        m.num_links = 2;
        m.num_resources = 3;
        m.links = {{0, 2}, {1, 2}};
        for (int i = 0; i < 2; ++i) {
            Route r;
            r.kind = RouteKind::CellularDirect;
            r.hop_links = {i};
            r.hop_resources = {1};
            m.routes.push_back(r);
            ++m.num_routes;
        }
        const std::vector<NodeKind> cell_kinds = {NodeKind::CellularUe, NodeKind::CellularUe,
                                                  NodeKind::BaseStation};
        auto v = validate(m, cell_kinds);
        REQUIRE(v.size() == 1);
        REQUIRE(v[0].kind == ViolationKind::CellularOrthogonality);
        REQUIRE(v[0].resource == 1);

        m.routes[1].hop_resources = {2};
        REQUIRE(validate(m, cell_kinds).empty());
    }
    SECTION("link assigned twice") {
        RoutingMatrix m = rm;
        Route extra;
        extra.kind = RouteKind::D2dSingleHop;
        extra.hop_links = {2};
        extra.hop_resources = {0};
        m.routes.push_back(extra);
        ++m.num_routes;
        const auto v = validate(m, kinds);
        bool structural = false;
        for (const auto& viol : v) structural |= viol.kind == ViolationKind::Structural;
        REQUIRE(structural);
    }
}

TEST_CASE("device links may reuse cellular resources without violation") {
    // one cellular uplink and one device link of the same cell on one RB
    RoutingMatrix m;
    m.num_links = 2;
    m.num_resources = 2;
    m.links = {{0, 3}, {1, 2}};
    Route cell;
    cell.kind = RouteKind::CellularDirect;
    cell.hop_links = {0};
    cell.hop_resources = {0};
    m.routes.push_back(cell);
    Route d2d;
    d2d.kind = RouteKind::D2dSingleHop;
    d2d.hop_links = {1};
    d2d.hop_resources = {0};
    m.routes.push_back(d2d);
    m.num_routes = 2;
    const std::vector<NodeKind> kinds = {NodeKind::CellularUe, NodeKind::D2dTx, NodeKind::D2dRx,
                                         NodeKind::BaseStation};
    REQUIRE(validate(m, kinds).empty());
}
