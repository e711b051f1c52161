#ifndef BBN_ROUTING_HPP
#define BBN_ROUTING_HPP

#include <any>
#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <variant>
#include <vector>

#include "bbn/engine.hpp"
#include "bbn/geometry.hpp"
#include "bbn/mobility.hpp"

namespace bbn {

inline constexpr NodeId kBroadcast = 0xffffffffu;
inline constexpr NodeId kSinkId = 0;

enum class DropReason { no_route = 0, ttl_expired = 1, queue_overflow = 2, mac_failure = 3 };
inline constexpr std::size_t kDropReasonCount = 4;
std::string_view to_string(DropReason r);

enum class PacketClass { data, control };

/// Network-layer packet. Data packets carry an application payload and a
/// ledger id; control packets carry a protocol message in `header`.
struct NetPacket {
    PacketClass cls = PacketClass::data;
    std::uint64_t uid = 0;  ///< ledger id of data packets, 0 for control
    NodeId origin = 0;
    NodeId destination = kSinkId;
    std::uint32_t app_seq = 0;
    double created_at = 0.0;
    std::uint32_t payload_len = 0;
    std::vector<NodeId> hop_trace;
    int ttl = 32;
    std::uint32_t header_bytes = 0;  ///< routing bytes on the air besides the payload
    std::any header;                 ///< protocol-specific header or message body
    int priority = 0;                ///< MAC queue priority (higher first)

    std::size_t wire_bytes() const { return static_cast<std::size_t>(payload_len) + header_bytes; }
    bool is_data() const { return cls == PacketClass::data; }
};

/// What a routing protocol may ask of the node it runs on.
class RoutingServices {
public:
    virtual ~RoutingServices() = default;

    virtual NodeId self() const = 0;
    virtual double now() const = 0;
    virtual Point position_of_self() const = 0;
    virtual Point sink_position() const = 0;
    virtual std::size_t node_count() const = 0;

    /// Hands the packet to the MAC (next_hop may be kBroadcast). Returns false
    /// and records a queue-overflow drop when the interface queue is full.
    virtual bool mac_send(NetPacket packet, NodeId next_hop) = 0;
    /// mac_send after a delay (forwarding jitter).
    virtual void mac_send_after(double delay, NetPacket packet, NodeId next_hop) = 0;

    virtual EventHandle schedule_timer(double delay, std::uint32_t tag) = 0;
    virtual void cancel_timer(EventHandle handle) = 0;

    /// The packet reached its destination at this node.
    virtual void deliver(const NetPacket& packet) = 0;
    /// This copy leaves the network for the given reason.
    virtual void drop(const NetPacket& packet, DropReason reason) = 0;
    /// This copy is redundant (duplicate suppression); not a loss by itself.
    virtual void discard(const NetPacket& packet) = 0;

    virtual RngStream& rng() = 0;
    /// Whether the MAC reports unicast failures (acknowledged disciplines).
    virtual bool link_feedback() const = 0;
    /// Remaining battery as a fraction of capacity, in [0, 1].
    virtual double residual_energy() const = 0;
    /// Largest routing-layer frame the technology carries; 0 = no limit.
    virtual std::size_t max_frame_payload() const = 0;
};

/// Behavioral contract of every routing protocol.
class RoutingProtocol {
public:
    explicit RoutingProtocol(RoutingServices& node) : node_(node) {}
    virtual ~RoutingProtocol() = default;

    virtual std::string_view name() const = 0;
    virtual void start() {}
    virtual void on_app_send(NetPacket packet) = 0;
    virtual void on_mac_receive(NetPacket packet, NodeId from) = 0;
    /// The MAC gave up on a unicast; the protocol owns the packet again.
    virtual void on_mac_send_failed(NetPacket packet, NodeId /*to*/) {
        if (packet.is_data()) node_.drop(packet, DropReason::mac_failure);
    }
    virtual void on_timer(std::uint32_t /*tag*/) {}
    /// The MAC finished a frame; `confirmed` when the receiver acknowledged it.
    virtual void on_mac_sent(const NetPacket& /*packet*/, NodeId /*to*/, bool /*confirmed*/) {}

protected:
    RoutingServices& node_;
};

struct Delivered {};
struct Forwarded {
    NodeId next_hop = 0;
};
struct Dropped {
    DropReason reason = DropReason::no_route;
};
using ForwardOutcome = std::variant<Delivered, Forwarded, Dropped>;

/// Common data path: deliver at the destination, enforce the hop budget,
/// otherwise hand the packet to the protocol's next-hop choice.
ForwardOutcome deliver_or_forward(RoutingServices& node, NetPacket packet,
                                  const std::function<std::optional<NodeId>(NetPacket&)>& choose_next_hop);

/// Tracks every application packet from creation to its fate. A packet can
/// exist as several copies (broadcast, duplicates); it counts as dropped only
/// when its last copy disappears without any copy reaching the sink.
class PacketLedger {
public:
    std::uint64_t create(NodeId origin, std::uint32_t app_seq, double created_at);
    void acquire(std::uint64_t uid);
    void release(std::uint64_t uid, std::optional<DropReason> reason);
    /// Returns true for the first arrival of this packet at the sink.
    bool mark_delivered(std::uint64_t uid, double now);

    std::uint64_t sent() const { return records_.size(); }
    std::uint64_t delivered() const { return delivered_; }
    std::uint64_t drops(DropReason r) const { return drops_[static_cast<std::size_t>(r)]; }
    std::uint64_t total_drops() const;
    std::uint64_t in_flight() const;
    const std::vector<double>& delays() const { return delays_; }
    int live_copies(std::uint64_t uid) const { return records_.at(uid - 1).live; }

private:
    struct Record {
        NodeId origin;
        std::uint32_t app_seq;
        double created_at;
        int live = 1;
        bool delivered = false;
        bool dropped = false;
        std::optional<DropReason> last_reason;
    };
    std::vector<Record> records_;
    std::uint64_t delivered_ = 0;
    std::array<std::uint64_t, kDropReasonCount> drops_{};
    std::vector<double> delays_;
};

}  // namespace bbn

#endif
