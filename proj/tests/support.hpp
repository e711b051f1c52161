#ifndef BBN_TESTS_SUPPORT_HPP
#define BBN_TESTS_SUPPORT_HPP

#include <algorithm>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <queue>
#include <set>
#include <vector>

#include "bbn/engine.hpp"
#include "bbn/geometry.hpp"
#include "bbn/protocols.hpp"
#include "bbn/routing.hpp"

namespace bbn::testing {

using Graph = std::vector<std::vector<NodeId>>;

/// Undirected graph from an edge list.
inline Graph make_graph(std::size_t n, const std::vector<std::pair<NodeId, NodeId>>& edges) {
    Graph g(n);
    for (auto [a, b] : edges) {
        g[a].push_back(b);
        g[b].push_back(a);
    }
    return g;
}

/// Hop distances from `src`; -1 for unreachable nodes.
inline std::vector<int> bfs(const Graph& g, NodeId src) {
    std::vector<int> dist(g.size(), -1);
    std::queue<NodeId> q;
    dist[src] = 0;
    q.push(src);
    while (!q.empty()) {
        const NodeId u = q.front();
        q.pop();
        for (NodeId v : g[u]) {
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                q.push(v);
            }
        }
    }
    return dist;
}

/// Unit-disk graph over fixed positions.
inline Graph unit_disk(const std::vector<Point>& pts, double range) {
    Graph g(pts.size());
    for (NodeId a = 0; a < pts.size(); ++a) {
        for (NodeId b = a + 1; b < pts.size(); ++b) {
            if (distance(pts[a], pts[b]) <= range) {
                g[a].push_back(b);
                g[b].push_back(a);
            }
        }
    }
    return g;
}

/// A lossless, collision-free network over a fixed graph: every frame
/// reaches exactly the graph neighbors after `hop_delay`, and unicasts to
/// non-neighbors fail. Protocols run unmodified on top of it.
class GraphNet {
public:
    struct Sent {
        NodeId from = 0;
        NodeId to = 0;
        NetPacket packet;
    };

    GraphNet(Graph graph, std::vector<Point> positions = {}, std::uint64_t seed = 1, double hop_delay = 1e-3)
        : graph_(std::move(graph)), positions_(std::move(positions)), hop_delay_(hop_delay), scheduler_(1e9) {
        if (positions_.empty()) positions_.resize(graph_.size());
        for (NodeId n = 0; n < graph_.size(); ++n) nodes_.push_back(std::make_unique<Host>(*this, n, seed));
    }

    void install(ProtocolKind kind, const ProtocolParams& params = {}) {
        for (auto& h : nodes_) h->protocol = make_protocol(kind, *h, params);
        for (auto& h : nodes_) h->protocol->start();
    }

    template <class P>
    P& protocol(NodeId n) {
        return static_cast<P&>(*nodes_.at(n)->protocol);
    }

    /// Originates an application packet at `origin` toward the sink.
    std::uint64_t send_data(NodeId origin, std::uint32_t payload = 16, int ttl = 32) {
        NetPacket p;
        p.origin = origin;
        p.destination = kSinkId;
        p.app_seq = next_seq_++;
        p.created_at = scheduler_.now();
        p.payload_len = payload;
        p.ttl = ttl;
        p.hop_trace.push_back(origin);
        p.uid = ledger_.create(origin, p.app_seq, p.created_at);
        nodes_[origin]->protocol->on_app_send(std::move(p));
        return ledger_.sent();
    }

    void run_until(double t) { scheduler_.run_until(t); }
    double now() const { return scheduler_.now(); }

    /// Cuts the link between a and b (both directions).
    void remove_edge(NodeId a, NodeId b) {
        std::erase(graph_[a], b);
        std::erase(graph_[b], a);
    }

    /// Residual battery fraction reported by node `n` (default 1).
    void set_energy(NodeId n, double e) { nodes_.at(n)->energy = e; }

    Scheduler& scheduler() { return scheduler_; }
    PacketLedger& ledger() { return ledger_; }
    const std::vector<Sent>& sent() const { return sent_; }
    void clear_log() { sent_.clear(); }
    /// Called for every frame handed to the "MAC".
    std::function<void(const Sent&)> on_send;

private:
    struct Host final : RoutingServices {
        Host(GraphNet& net, NodeId id, std::uint64_t seed)
            : net(net), id(id), rng_(seed, StreamId{0, id, StreamPurpose::routing}) {}

        NodeId self() const override { return id; }
        double now() const override { return net.scheduler_.now(); }
        Point position_of_self() const override { return net.positions_[id]; }
        Point sink_position() const override { return net.positions_[kSinkId]; }
        std::size_t node_count() const override { return net.graph_.size(); }

        bool mac_send(NetPacket packet, NodeId next_hop) override {
            net.log(id, next_hop, packet);
            const auto& adj = net.graph_[id];
            if (next_hop == kBroadcast) {
                for (NodeId v : adj) net.deliver_frame(id, v, packet);
                if (packet.is_data()) net.ledger_.release(packet.uid, DropReason::mac_failure);
                return true;
            }
            const bool linked = std::find(adj.begin(), adj.end(), next_hop) != adj.end();
            auto shared = std::make_shared<NetPacket>(std::move(packet));
            if (linked) {
                net.deliver_frame(id, next_hop, *shared);
                net.scheduler_.schedule_in(net.hop_delay_, id, "sent", [this, shared, next_hop] {
                    protocol->on_mac_sent(*shared, next_hop, true);
                    if (shared->is_data()) net.ledger_.release(shared->uid, std::nullopt);
                });
            } else {
                net.scheduler_.schedule_in(net.hop_delay_, id, "fail", [this, shared, next_hop] {
                    protocol->on_mac_send_failed(std::move(*shared), next_hop);
                });
            }
            return true;
        }
        void mac_send_after(double delay, NetPacket packet, NodeId next_hop) override {
            auto shared = std::make_shared<NetPacket>(std::move(packet));
            net.scheduler_.schedule_in(delay, id, "jitter",
                                       [this, shared, next_hop] { mac_send(std::move(*shared), next_hop); });
        }
        EventHandle schedule_timer(double delay, std::uint32_t tag) override {
            return net.scheduler_.schedule_in(delay, id, "timer", [this, tag] { protocol->on_timer(tag); });
        }
        void cancel_timer(EventHandle handle) override {
            if (handle.valid()) net.scheduler_.cancel(handle);
        }
        void deliver(const NetPacket& packet) override {
            net.ledger_.mark_delivered(packet.uid, now());
            net.ledger_.release(packet.uid, std::nullopt);
        }
        void drop(const NetPacket& packet, DropReason reason) override { net.ledger_.release(packet.uid, reason); }
        void discard(const NetPacket& packet) override { net.ledger_.release(packet.uid, std::nullopt); }
        RngStream& rng() override { return rng_; }
        bool link_feedback() const override { return true; }
        double residual_energy() const override { return energy; }
        std::size_t max_frame_payload() const override { return 0; }

        GraphNet& net;
        NodeId id;
        RngStream rng_;
        double energy = 1.0;
        std::unique_ptr<RoutingProtocol> protocol;
    };

    void log(NodeId from, NodeId to, const NetPacket& p) {
        sent_.push_back(Sent{from, to, p});
        if (on_send) on_send(sent_.back());
    }

    void deliver_frame(NodeId from, NodeId to, const NetPacket& packet) {
        auto copy = std::make_shared<NetPacket>(packet);
        if (copy->is_data()) {
            ledger_.acquire(copy->uid);
            copy->hop_trace.push_back(to);
        }
        scheduler_.schedule_in(hop_delay_, to, "rx", [this, copy, from, to] {
            nodes_[to]->protocol->on_mac_receive(std::move(*copy), from);
        });
    }

    Graph graph_;
    std::vector<Point> positions_;
    double hop_delay_;
    Scheduler scheduler_;
    PacketLedger ledger_;
    std::vector<std::unique_ptr<Host>> nodes_;
    std::vector<Sent> sent_;
    std::uint32_t next_seq_ = 0;
};

}  // namespace bbn::testing

#endif
