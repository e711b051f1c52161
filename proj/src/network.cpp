#include "bbn/network.hpp"

#include <algorithm>
#include <stdexcept>

namespace bbn {

Node::Node(NodeId id, Network& net, std::uint64_t seed)
    : id_(id), net_(net), rng_(seed, StreamId{0, id, StreamPurpose::routing}) {
    mac_ = std::make_unique<Mac>(id, net.scheduler(), net.medium(), net.params().mac, net.params().queue_capacity,
                                 RngStream(seed, StreamId{0, id, StreamPurpose::mac}), *this);
}

double Node::now() const { return net_.scheduler().now(); }

Point Node::position_of_self() const { return net_.medium().position(id_, now()); }

Point Node::sink_position() const { return net_.params().sink; }

std::size_t Node::node_count() const { return net_.size(); }

void Node::app_send(std::uint32_t payload_len, std::uint32_t app_seq) {
    NetPacket p;
    p.cls = PacketClass::data;
    p.origin = id_;
    p.destination = kSinkId;
    p.app_seq = app_seq;
    p.created_at = now();
    p.payload_len = payload_len;
    p.ttl = net_.params().ttl;
    p.hop_trace.push_back(id_);
    p.uid = net_.ledger().create(id_, app_seq, p.created_at);
    protocol_->on_app_send(std::move(p));
}

bool Node::mac_send(NetPacket packet, NodeId next_hop) {
    const auto& profile = net_.profile();
    if (profile.max_payload && packet.wire_bytes() > *profile.max_payload) {
        throw std::logic_error("routing layer produced a frame above the technology payload limit");
    }
    const std::uint64_t uid = packet.uid;
    if (!mac_->enqueue(std::move(packet), next_hop)) {
        net_.ledger().release(uid, DropReason::queue_overflow);
        return false;
    }
    return true;
}

void Node::mac_send_after(double delay, NetPacket packet, NodeId next_hop) {
    if (delay <= 0.0) {
        mac_send(std::move(packet), next_hop);
        return;
    }
    auto shared = std::make_shared<NetPacket>(std::move(packet));
    net_.scheduler().schedule_in(delay, id_, "net-jitter-send",
                                 [this, shared, next_hop] { mac_send(std::move(*shared), next_hop); });
}

EventHandle Node::schedule_timer(double delay, std::uint32_t tag) {
    return net_.scheduler().schedule_in(delay, id_, "routing-timer", [this, tag] { protocol_->on_timer(tag); });
}

void Node::cancel_timer(EventHandle handle) {
    if (handle.valid()) net_.scheduler().cancel(handle);
}

void Node::deliver(const NetPacket& packet) {
    net_.ledger().mark_delivered(packet.uid, now());
    net_.ledger().release(packet.uid, std::nullopt);
}

void Node::drop(const NetPacket& packet, DropReason reason) { net_.ledger().release(packet.uid, reason); }

void Node::discard(const NetPacket& packet) { net_.ledger().release(packet.uid, std::nullopt); }

bool Node::link_feedback() const { return mac_->discipline().ack; }

double Node::residual_energy() const {
    const double used = net_.energy().node_energy(id_);
    return std::clamp(1.0 - used / net_.params().battery_capacity_mj, 0.0, 1.0);
}

std::size_t Node::max_frame_payload() const { return net_.profile().max_payload.value_or(0); }

void Node::on_mac_receive(const NetPacket& packet, NodeId from) {
    NetPacket copy = packet;
    if (copy.is_data()) {
        net_.ledger().acquire(copy.uid);
        copy.hop_trace.push_back(id_);
    }
    protocol_->on_mac_receive(std::move(copy), from);
}

void Node::on_mac_sent(const NetPacket& packet, NodeId to, bool confirmed) {
    protocol_->on_mac_sent(packet, to, confirmed);
    if (!packet.is_data()) return;
    // The air copy is gone; whoever received it already holds its own copy.
    net_.ledger().release(packet.uid, confirmed ? std::nullopt : std::optional{DropReason::mac_failure});
}

void Node::on_mac_send_failed(NetPacket packet, NodeId to, TxOutcome /*outcome*/) {
    protocol_->on_mac_send_failed(std::move(packet), to);
}

Network::Network(Scheduler& scheduler, const MobilityTrace& trace, std::vector<Polygon> obstacles,
                 PropagationModel propagation, TechProfile profile, MediumParams medium_params, NetworkParams params,
                 std::uint64_t seed)
    : scheduler_(scheduler),
      energy_(trace.node_count(), profile),
      medium_(scheduler, trace, std::move(obstacles), propagation, profile, medium_params, energy_),
      params_(std::move(params)) {
    nodes_.reserve(trace.node_count());
    for (NodeId n = 0; n < trace.node_count(); ++n) nodes_.push_back(std::make_unique<Node>(n, *this, seed));
}

void Network::install(ProtocolKind kind, const ProtocolParams& params) {
    for (auto& n : nodes_) n->set_protocol(make_protocol(kind, *n, params));
    for (auto& n : nodes_) n->protocol().start();
}

}  // namespace bbn
