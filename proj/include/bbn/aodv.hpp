#ifndef BBN_AODV_HPP
#define BBN_AODV_HPP

#include <deque>
#include <map>
#include <vector>

#include "bbn/protocols.hpp"
#include "bbn/routing.hpp"

namespace bbn::aodv {

struct RouteEntry {
    NodeId next_hop = 0;
    int hops = 0;
    std::uint32_t seq = 0;
    double energy = 0.0;  ///< smallest residual-battery fraction on the path
    double expires = 0.0;
};

/// Route preference: fresher sequence, then fewer hops, then (when
/// energy_aware) the larger path-minimum energy. An absent or expired
/// incumbent always loses.
bool better_route(const RouteEntry& candidate, const RouteEntry* incumbent, double now, bool energy_aware);

struct Rreq {
    NodeId origin = 0;
    std::uint32_t rreq_id = 0;
    std::uint32_t origin_seq = 0;
    NodeId target = 0;
    std::vector<NodeId> path;  ///< accumulated, starting with origin
    double min_energy = 1.0;
};

struct Rrep {
    NodeId origin = 0;  ///< node that asked
    NodeId target = 0;  ///< node that answered
    std::uint32_t target_seq = 0;
    std::vector<NodeId> path;  ///< origin ... target
    int hop_count = 0;         ///< hops travelled so far
    double min_energy = 1.0;
};

std::uint32_t rreq_bytes(const Rreq& m);
std::uint32_t rrep_bytes(const Rrep& m);

class Aodv final : public RoutingProtocol {
public:
    Aodv(RoutingServices& node, AodvParams params);

    std::string_view name() const override { return "AODVv2"; }
    void on_app_send(NetPacket packet) override;
    void on_mac_receive(NetPacket packet, NodeId from) override;
    void on_mac_send_failed(NetPacket packet, NodeId to) override;
    void on_timer(std::uint32_t tag) override;
    /// An acknowledged data frame keeps the route it used alive.
    void on_mac_sent(const NetPacket& packet, NodeId to, bool confirmed) override;

    /// Starts route discovery for `destination` (normally triggered by data).
    void originate_rreq(NodeId destination);

    const RouteEntry* route(NodeId destination) const;
    std::uint32_t last_rreq_id() const { return rreq_id_; }
    std::uint64_t rreq_forwards() const { return rreq_forwards_; }
    std::uint64_t rreq_originated() const { return rreq_originated_; }
    std::size_t buffered() const;

private:
    struct Buffered {
        NetPacket packet;
        double since = 0.0;
    };
    struct Discovery {
        int attempts = 0;
        EventHandle timer;
    };

    void process_rreq(NetPacket packet, NodeId from);
    void process_rrep(NetPacket packet, NodeId from);
    void forward_data(NetPacket packet);
    void buffer(NetPacket packet);
    void flush(NodeId destination);
    void expire_buffer();
    void install(NodeId destination, const RouteEntry& candidate);

    AodvParams params_;
    std::map<NodeId, RouteEntry> routes_;
    std::map<std::pair<NodeId, std::uint32_t>, double> seen_;
    std::map<NodeId, std::uint32_t> latest_rreq_seq_;  ///< newest origin sequence handled
    std::map<NodeId, std::deque<Buffered>> buffers_;
    std::map<NodeId, Discovery> discoveries_;
    EventHandle buffer_timer_;
    std::uint32_t own_seq_ = 0;
    std::uint32_t rreq_id_ = 0;
    std::uint64_t rreq_forwards_ = 0;
    std::uint64_t rreq_originated_ = 0;
};

}  // namespace bbn::aodv

#endif
