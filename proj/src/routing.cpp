#include "bbn/routing.hpp"

#include <stdexcept>

namespace bbn {

std::string_view to_string(DropReason r) {
    switch (r) {
        case DropReason::no_route: return "no-route";
        case DropReason::ttl_expired: return "ttl-expired";
        case DropReason::queue_overflow: return "queue-overflow";
        case DropReason::mac_failure: return "mac-failure";
    }
    return "?";
}

ForwardOutcome deliver_or_forward(RoutingServices& node, NetPacket packet,
                                  const std::function<std::optional<NodeId>(NetPacket&)>& choose_next_hop) {
    if (node.self() == packet.destination) {
        node.deliver(packet);
        return Delivered{};
    }
    if (packet.ttl <= 0) {
        node.drop(packet, DropReason::ttl_expired);
        return Dropped{DropReason::ttl_expired};
    }
    const auto next = choose_next_hop(packet);
    if (!next) {
        node.drop(packet, DropReason::no_route);
        return Dropped{DropReason::no_route};
    }
    packet.ttl -= 1;
    if (!node.mac_send(std::move(packet), *next)) return Dropped{DropReason::queue_overflow};
    return Forwarded{*next};
}

std::uint64_t PacketLedger::create(NodeId origin, std::uint32_t app_seq, double created_at) {
    records_.push_back(Record{origin, app_seq, created_at, 1, false, false, std::nullopt});
    return records_.size();
}

void PacketLedger::acquire(std::uint64_t uid) {
    if (uid == 0) return;
    auto& r = records_.at(uid - 1);
    if (r.dropped) throw std::logic_error("packet resurrected after its last copy was dropped");
    ++r.live;
}

void PacketLedger::release(std::uint64_t uid, std::optional<DropReason> reason) {
    if (uid == 0) return;
    auto& r = records_.at(uid - 1);
    if (r.live <= 0) throw std::logic_error("packet copy released twice");
    if (reason) r.last_reason = reason;
    if (--r.live == 0 && !r.delivered) {
        r.dropped = true;
        ++drops_[static_cast<std::size_t>(r.last_reason.value_or(DropReason::mac_failure))];
    }
}

bool PacketLedger::mark_delivered(std::uint64_t uid, double now) {
    if (uid == 0) return false;
    auto& r = records_.at(uid - 1);
    if (r.delivered) return false;
    r.delivered = true;
    ++delivered_;
    delays_.push_back(now - r.created_at);
    return true;
}

std::uint64_t PacketLedger::total_drops() const {
    std::uint64_t n = 0;
    for (auto d : drops_) n += d;
    return n;
}

std::uint64_t PacketLedger::in_flight() const {
    std::uint64_t n = 0;
    for (const auto& r : records_) {
        if (!r.delivered && !r.dropped) ++n;
    }
    return n;
}

}  // namespace bbn
