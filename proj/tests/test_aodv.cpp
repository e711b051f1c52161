#include <gtest/gtest.h>

#include <random>

#include "bbn/aodv.hpp"
#include "support.hpp"

namespace bbn {
namespace {

using aodv::Aodv;
using aodv::RouteEntry;
using testing::bfs;
using testing::Graph;
using testing::GraphNet;
using testing::make_graph;

Graph grid(std::size_t side) {
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId r = 0; r < side; ++r)
        for (NodeId c = 0; c < side; ++c) {
            const NodeId n = r * side + c;
            if (c + 1 < side) edges.emplace_back(n, n + 1);
            if (r + 1 < side) edges.emplace_back(n, n + side);
        }
    return make_graph(side * side, edges);
}

Graph line(std::size_t n) {
    std::vector<std::pair<NodeId, NodeId>> edges;
    for (NodeId i = 0; i + 1 < n; ++i) edges.emplace_back(i, i + 1);
    return make_graph(n, edges);
}

RouteEntry entry(std::uint32_t seq, int hops, double energy) {
    RouteEntry r;
    r.seq = seq;
    r.hops = hops;
    r.energy = energy;
    r.expires = 100.0;
    return r;
}

TEST(BetterRoute, Preferences) {
    const auto incumbent = entry(5, 3, 0.5);
    EXPECT_TRUE(aodv::better_route(entry(5, 3, 0.5), nullptr, 0.0, true));
    // Fresher sequence wins even when longer.
    EXPECT_TRUE(aodv::better_route(entry(6, 9, 0.1), &incumbent, 0.0, true));
    EXPECT_FALSE(aodv::better_route(entry(4, 1, 1.0), &incumbent, 0.0, true));
    // Equal sequence: hop counts 3 and 2, the 2-hop route wins.
    EXPECT_TRUE(aodv::better_route(entry(5, 2, 0.1), &incumbent, 0.0, true));
    EXPECT_FALSE(aodv::better_route(entry(5, 4, 1.0), &incumbent, 0.0, true));
    // Equal hops: energy indices 0.4 vs 0.9.
    const auto weak = entry(5, 3, 0.4);
    EXPECT_TRUE(aodv::better_route(entry(5, 3, 0.9), &weak, 0.0, true));
    EXPECT_FALSE(aodv::better_route(entry(5, 3, 0.9), &weak, 0.0, false));
    const auto strong = entry(5, 3, 0.9);
    EXPECT_FALSE(aodv::better_route(entry(5, 3, 0.4), &strong, 0.0, true));
    // An expired incumbent always loses.
    EXPECT_TRUE(aodv::better_route(entry(1, 9, 0.0), &incumbent, 100.0, true));
}

TEST(AodvNet, RepeatedTriggerIncrementsRreqId) {
    GraphNet net(line(3));
    net.install(ProtocolKind::aodvv2);
    auto& p = net.protocol<Aodv>(2);
    p.originate_rreq(kSinkId);
    EXPECT_EQ(p.last_rreq_id(), 1u);
    p.originate_rreq(kSinkId);
    EXPECT_EQ(p.last_rreq_id(), 2u);
}

TEST(AodvNet, NeighborReplyInstallsOneHopRoute) {
    GraphNet net(line(2));
    net.install(ProtocolKind::aodvv2);
    net.protocol<Aodv>(1).originate_rreq(kSinkId);
    net.run_until(1.0);
    const auto* r = net.protocol<Aodv>(1).route(kSinkId);
    ASSERT_NE(r, nullptr);
    EXPECT_EQ(r->hops, 1);
    EXPECT_EQ(r->next_hop, kSinkId);
}

TEST(AodvNet, GridFloodForwardsOncePerRelay) {
    const Graph g = grid(4);
    GraphNet net(g);
    net.install(ProtocolKind::aodvv2);
    net.protocol<Aodv>(15).originate_rreq(kSinkId);
    net.run_until(0.5);
    std::uint64_t forwards = 0;
    for (NodeId n = 0; n < g.size(); ++n) forwards += net.protocol<Aodv>(n).rreq_forwards();
    EXPECT_EQ(forwards, g.size() - 2);
    const auto* r = net.protocol<Aodv>(15).route(kSinkId);
    ASSERT_NE(r, nullptr);
    EXPECT_EQ(r->hops, 6);
}

TEST(AodvNet, TtlStopsRequestOnLongLine) {
    GraphNet net(line(41));
    net.install(ProtocolKind::aodvv2);
    auto& origin = net.protocol<Aodv>(40);
    origin.originate_rreq(kSinkId);
    net.run_until(60.0);
    EXPECT_EQ(origin.route(kSinkId), nullptr);
    EXPECT_EQ(net.protocol<Aodv>(kSinkId).route(40), nullptr);
    // Only the nodes within TTL of the origin ever relay.
    std::uint64_t relays = 0;
    for (NodeId n = 1; n < 40; ++n) relays += net.protocol<Aodv>(n).rreq_forwards() > 0;
    EXPECT_EQ(relays, 31u);
}

TEST(AodvNet, ExpiredReverseStateDropsReply) {
    // Hops are slower than the reverse-route lifetime allows for a round trip.
    GraphNet net(line(3), {}, 1, 1.5);
    ProtocolParams params;
    params.aodv.buffer_time = 500.0;
    params.aodv.reverse_lifetime = 0.5;
    params.aodv.rreq_wait = 10.0;
    net.install(ProtocolKind::aodvv2, params);
    net.send_data(2);
    net.run_until(200.0);
    auto& origin = net.protocol<Aodv>(2);
    EXPECT_EQ(origin.route(kSinkId), nullptr);
    EXPECT_EQ(origin.rreq_originated(), 4u);
    EXPECT_EQ(net.ledger().delivered(), 0u);
    EXPECT_EQ(net.ledger().drops(DropReason::no_route), 1u);
}

TEST(AodvNet, BufferedDataFollowsDiscoveredShortestPath) {
    std::mt19937_64 gen(21);
    for (int trial = 0; trial < 20; ++trial) {
        Graph g;
        for (;;) {
            g = Graph(12);
            std::bernoulli_distribution e(0.25);
            for (NodeId a = 0; a < 12; ++a)
                for (NodeId b = a + 1; b < 12; ++b)
                    if (e(gen)) {
                        g[a].push_back(b);
                        g[b].push_back(a);
                    }
            const auto d = bfs(g, 0);
            if (std::find(d.begin(), d.end(), -1) == d.end()) break;
        }
        // Hops slower than the forwarding jitter make the first request to
        // arrive the shortest one.
        GraphNet net(g, {}, trial + 1, 0.05);
        net.install(ProtocolKind::aodvv2);
        const auto dist = bfs(g, kSinkId);
        for (NodeId n = 1; n < g.size(); ++n) {
            net.send_data(n);
            net.run_until(net.now() + 1.0);
            const auto* r = net.protocol<Aodv>(n).route(kSinkId);
            ASSERT_NE(r, nullptr) << trial << " node " << n;
            EXPECT_EQ(r->hops, dist[n]);
        }
        net.run_until(net.now() + 1.0);
        EXPECT_EQ(net.ledger().delivered(), g.size() - 1);
        EXPECT_EQ(net.ledger().in_flight(), 0u);
    }
}

TEST(AodvNet, DedupHoldsOverManyFloods) {
    std::mt19937_64 gen(99);
    int violations = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        const std::size_t n = 3 + trial % 8;
        Graph g(n);
        std::bernoulli_distribution e(0.4);
        for (NodeId a = 0; a < n; ++a)
            for (NodeId b = a + 1; b < n; ++b)
                if (e(gen)) {
                    g[a].push_back(b);
                    g[b].push_back(a);
                }
        GraphNet net(g, {}, trial + 1);
        std::map<std::tuple<NodeId, NodeId, std::uint32_t>, int> forwards;
        net.on_send = [&](const GraphNet::Sent& s) {
            if (const auto* m = std::any_cast<aodv::Rreq>(&s.packet.header)) {
                if (m->origin != s.from) ++forwards[{s.from, m->origin, m->rreq_id}];
            }
        };
        net.install(ProtocolKind::aodvv2);
        const NodeId origin = 1 + static_cast<NodeId>(gen() % (n - 1));
        // Overlapping discoveries from two origins.
        net.protocol<Aodv>(origin).originate_rreq(kSinkId);
        net.protocol<Aodv>(kSinkId).originate_rreq(origin);
        net.run_until(0.5);
        net.protocol<Aodv>(origin).originate_rreq(kSinkId);
        net.run_until(2.0);
        for (const auto& [key, count] : forwards) violations += count > 1;
    }
    EXPECT_EQ(violations, 0);
}

}  // namespace
}  // namespace bbn
