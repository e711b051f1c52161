#ifndef BBN_NETWORK_HPP
#define BBN_NETWORK_HPP

#include <memory>
#include <vector>

#include "bbn/engine.hpp"
#include "bbn/mac.hpp"
#include "bbn/medium.hpp"
#include "bbn/phy.hpp"
#include "bbn/protocols.hpp"
#include "bbn/routing.hpp"

namespace bbn {

struct NetworkParams {
    MacDiscipline mac;
    std::size_t queue_capacity = 50;
    int ttl = 32;
    double battery_capacity_mj = 2.16e7;  // two AA cells at 3 V
    Point sink;
};

class Network;

/// One node: routing protocol on top of a MAC, with custody bookkeeping of
/// data packets in the shared ledger.
class Node final : public RoutingServices, public MacUser {
public:
    Node(NodeId id, Network& net, std::uint64_t seed);

    void set_protocol(std::unique_ptr<RoutingProtocol> protocol) { protocol_ = std::move(protocol); }
    RoutingProtocol& protocol() { return *protocol_; }
    Mac& mac() { return *mac_; }

    /// Creates an application packet and hands it to the protocol.
    void app_send(std::uint32_t payload_len, std::uint32_t app_seq);

    // RoutingServices
    NodeId self() const override { return id_; }
    double now() const override;
    Point position_of_self() const override;
    Point sink_position() const override;
    std::size_t node_count() const override;
    bool mac_send(NetPacket packet, NodeId next_hop) override;
    void mac_send_after(double delay, NetPacket packet, NodeId next_hop) override;
    EventHandle schedule_timer(double delay, std::uint32_t tag) override;
    void cancel_timer(EventHandle handle) override;
    void deliver(const NetPacket& packet) override;
    void drop(const NetPacket& packet, DropReason reason) override;
    void discard(const NetPacket& packet) override;
    RngStream& rng() override { return rng_; }
    bool link_feedback() const override;
    double residual_energy() const override;
    std::size_t max_frame_payload() const override;

    // MacUser
    void on_mac_receive(const NetPacket& packet, NodeId from) override;
    void on_mac_sent(const NetPacket& packet, NodeId to, bool confirmed) override;
    void on_mac_send_failed(NetPacket packet, NodeId to, TxOutcome outcome) override;

private:
    NodeId id_;
    Network& net_;
    RngStream rng_;
    std::unique_ptr<Mac> mac_;
    std::unique_ptr<RoutingProtocol> protocol_;
};

/// Everything one run shares: clock, channel, energy and packet ledgers.
class Network {
public:
    Network(Scheduler& scheduler, const MobilityTrace& trace, std::vector<Polygon> obstacles,
            PropagationModel propagation, TechProfile profile, MediumParams medium_params, NetworkParams params,
            std::uint64_t seed);

    /// Instantiates the given protocol on every node and starts it.
    void install(ProtocolKind kind, const ProtocolParams& params);

    Scheduler& scheduler() { return scheduler_; }
    Medium& medium() { return medium_; }
    EnergyLedger& energy() { return energy_; }
    PacketLedger& ledger() { return ledger_; }
    const NetworkParams& params() const { return params_; }
    const TechProfile& profile() const { return medium_.profile(); }
    Node& node(NodeId id) { return *nodes_.at(id); }
    std::size_t size() const { return nodes_.size(); }

private:
    Scheduler& scheduler_;
    EnergyLedger energy_;
    Medium medium_;
    NetworkParams params_;
    PacketLedger ledger_;
    std::vector<std::unique_ptr<Node>> nodes_;
};

}  // namespace bbn

#endif
