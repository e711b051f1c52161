#include "bbn/aodv.hpp"

#include <algorithm>

namespace bbn::aodv {

namespace {

constexpr std::uint32_t kBufferTimer = 1;
constexpr std::uint32_t kDiscoveryTimerBase = 0x80000000u;

constexpr std::uint32_t kRreqFixed = 16;
constexpr std::uint32_t kRrepFixed = 16;
constexpr std::uint32_t kIdBytes = 4;

NetPacket control_packet(std::any body, std::uint32_t bytes, NodeId destination) {
    NetPacket p;
    p.cls = PacketClass::control;
    p.destination = destination;
    p.header = std::move(body);
    p.header_bytes = bytes;
    return p;
}

}  // namespace

bool better_route(const RouteEntry& candidate, const RouteEntry* incumbent, double now, bool energy_aware) {
    if (incumbent == nullptr || incumbent->expires <= now) return true;
    if (candidate.seq != incumbent->seq) return candidate.seq > incumbent->seq;
    if (candidate.hops != incumbent->hops) return candidate.hops < incumbent->hops;
    return energy_aware && candidate.energy > incumbent->energy;
}

std::uint32_t rreq_bytes(const Rreq& m) { return kRreqFixed + kIdBytes * static_cast<std::uint32_t>(m.path.size()); }
std::uint32_t rrep_bytes(const Rrep& m) { return kRrepFixed + kIdBytes * static_cast<std::uint32_t>(m.path.size()); }

Aodv::Aodv(RoutingServices& node, AodvParams params) : RoutingProtocol(node), params_(params) {}

const RouteEntry* Aodv::route(NodeId destination) const {
    auto it = routes_.find(destination);
    if (it == routes_.end() || it->second.expires <= node_.now()) return nullptr;
    return &it->second;
}

std::size_t Aodv::buffered() const {
    std::size_t n = 0;
    for (const auto& [d, q] : buffers_) n += q.size();
    return n;
}

void Aodv::install(NodeId destination, const RouteEntry& candidate) {
    auto it = routes_.find(destination);
    const RouteEntry* incumbent = it == routes_.end() ? nullptr : &it->second;
    if (!better_route(candidate, incumbent, node_.now(), params_.energy_aware)) {
        // Same route heard again: keep it alive at least as long.
        if (incumbent != nullptr && incumbent->next_hop == candidate.next_hop && incumbent->seq == candidate.seq &&
            incumbent->hops == candidate.hops) {
            it->second.expires = std::max(it->second.expires, candidate.expires);
        }
        return;
    }
    routes_[destination] = candidate;
}

void Aodv::on_app_send(NetPacket packet) {
    if (route(packet.destination) != nullptr) {
        forward_data(std::move(packet));
        return;
    }
    const NodeId dest = packet.destination;
    buffer(std::move(packet));
    if (!discoveries_.count(dest)) originate_rreq(dest);
}

void Aodv::buffer(NetPacket packet) {
    auto& q = buffers_[packet.destination];
    while (q.size() >= params_.buffer_capacity && !q.empty()) {
        node_.drop(q.front().packet, DropReason::no_route);
        q.pop_front();
    }
    q.push_back(Buffered{std::move(packet), node_.now()});
    if (!buffer_timer_.valid()) expire_buffer();
}

void Aodv::expire_buffer() {
    buffer_timer_ = {};
    const double now = node_.now();
    double next = -1.0;
    for (auto& [dest, q] : buffers_) {
        while (!q.empty() && q.front().since + params_.buffer_time <= now) {
            node_.drop(q.front().packet, DropReason::no_route);
            q.pop_front();
        }
        if (!q.empty()) {
            const double due = q.front().since + params_.buffer_time;
            if (next < 0.0 || due < next) next = due;
        }
    }
    if (next >= 0.0) buffer_timer_ = node_.schedule_timer(next - now, kBufferTimer);
}

void Aodv::originate_rreq(NodeId destination) {
    auto& d = discoveries_[destination];
    ++d.attempts;
    ++own_seq_;
    Rreq m;
    m.origin = node_.self();
    m.rreq_id = ++rreq_id_;
    m.origin_seq = own_seq_;
    m.target = destination;
    m.path = {node_.self()};
    m.min_energy = node_.residual_energy();
    seen_[{m.origin, m.rreq_id}] = node_.now() + params_.rreq_window;
    ++rreq_originated_;
    const auto bytes = rreq_bytes(m);
    NetPacket p = control_packet(std::move(m), bytes, kBroadcast);
    p.ttl -= 1;
    node_.mac_send(std::move(p), kBroadcast);
    node_.cancel_timer(d.timer);
    // Binary exponential backoff between attempts.
    const double wait = params_.rreq_wait * static_cast<double>(1u << std::min(d.attempts - 1, 10));
    d.timer = node_.schedule_timer(wait, kDiscoveryTimerBase | destination);
}

void Aodv::on_timer(std::uint32_t tag) {
    if (tag == kBufferTimer) {
        expire_buffer();
        return;
    }
    if ((tag & kDiscoveryTimerBase) == 0) return;
    const NodeId dest = tag & ~kDiscoveryTimerBase;
    auto it = discoveries_.find(dest);
    if (it == discoveries_.end()) return;
    it->second.timer = {};
    if (route(dest) != nullptr) {
        discoveries_.erase(it);
        flush(dest);
        return;
    }
    auto bit = buffers_.find(dest);
    const bool waiting = bit != buffers_.end() && !bit->second.empty();
    if (waiting && it->second.attempts < 1 + params_.rreq_retries) {
        originate_rreq(dest);
        return;
    }
    discoveries_.erase(it);
    if (bit != buffers_.end()) {
        for (auto& b : bit->second) node_.drop(b.packet, DropReason::no_route);
        bit->second.clear();
    }
}

void Aodv::flush(NodeId destination) {
    auto it = buffers_.find(destination);
    if (it == buffers_.end()) return;
    std::deque<Buffered> q = std::move(it->second);
    buffers_.erase(it);
    for (auto& b : q) forward_data(std::move(b.packet));
}

void Aodv::on_mac_receive(NetPacket packet, NodeId from) {
    if (packet.is_data()) {
        forward_data(std::move(packet));
    } else if (std::any_cast<Rreq>(&packet.header) != nullptr) {
        process_rreq(std::move(packet), from);
    } else if (std::any_cast<Rrep>(&packet.header) != nullptr) {
        process_rrep(std::move(packet), from);
    }
}

void Aodv::process_rreq(NetPacket packet, NodeId from) {
    auto m = std::any_cast<Rreq>(std::move(packet.header));
    const double now = node_.now();
    const NodeId self = node_.self();
    if (m.origin == self) return;
    const auto key = std::make_pair(m.origin, m.rreq_id);
    auto sit = seen_.find(key);
    if (sit != seen_.end() && sit->second > now) return;
    if (std::find(m.path.begin(), m.path.end(), self) != m.path.end()) return;
    // A request no fresher than one already handled from the same origin is
    // redundant even after its window closed (it may have sat in a queue).
    auto lit = latest_rreq_seq_.find(m.origin);
    if (lit != latest_rreq_seq_.end() && m.origin_seq <= lit->second) return;
    latest_rreq_seq_[m.origin] = m.origin_seq;
    seen_[key] = now + params_.rreq_window;
    if (seen_.size() > 4096) std::erase_if(seen_, [now](const auto& kv) { return kv.second <= now; });

    RouteEntry reverse;
    reverse.next_hop = from;
    reverse.hops = static_cast<int>(m.path.size());
    reverse.seq = m.origin_seq;
    reverse.energy = m.min_energy;
    reverse.expires = now + params_.reverse_lifetime;
    install(m.origin, reverse);

    const double my_energy = node_.residual_energy();
    if (m.target == self) {
        ++own_seq_;
        Rrep r;
        r.origin = m.origin;
        r.target = self;
        r.target_seq = own_seq_;
        r.path = std::move(m.path);
        r.path.push_back(self);
        r.hop_count = 0;
        r.min_energy = std::min(m.min_energy, my_energy);
        const auto bytes = rrep_bytes(r);
        NetPacket p = control_packet(std::move(r), bytes, from);
        p.ttl -= 1;
        node_.mac_send(std::move(p), from);
        return;
    }
    if (packet.ttl <= 0) return;
    m.path.push_back(self);
    m.min_energy = std::min(m.min_energy, my_energy);
    const auto bytes = rreq_bytes(m);
    if (const std::size_t limit = node_.max_frame_payload(); limit != 0 && bytes > limit) return;
    NetPacket p = control_packet(std::move(m), bytes, kBroadcast);
    p.ttl = packet.ttl - 1;
    ++rreq_forwards_;
    node_.mac_send_after(node_.rng().uniform(0.0, params_.forward_jitter), std::move(p), kBroadcast);
}

void Aodv::process_rrep(NetPacket packet, NodeId from) {
    auto& r = std::any_cast<Rrep&>(packet.header);
    const double now = node_.now();
    const NodeId self = node_.self();

    RouteEntry fwd;
    fwd.next_hop = from;
    fwd.hops = r.hop_count + 1;
    fwd.seq = r.target_seq;
    fwd.energy = r.min_energy;
    fwd.expires = now + params_.route_lifetime;
    install(r.target, fwd);

    if (r.origin == self) {
        auto it = discoveries_.find(r.target);
        if (it != discoveries_.end()) {
            node_.cancel_timer(it->second.timer);
            discoveries_.erase(it);
        }
        flush(r.target);
        return;
    }
    const RouteEntry* back = route(r.origin);
    if (back == nullptr || packet.ttl <= 0) return;
    r.hop_count += 1;
    const NodeId next = back->next_hop;
    packet.destination = next;
    packet.ttl -= 1;
    node_.mac_send(std::move(packet), next);
}

void Aodv::forward_data(NetPacket packet) {
    deliver_or_forward(node_, std::move(packet), [this](NetPacket& p) -> std::optional<NodeId> {
        const RouteEntry* r = route(p.destination);
        if (r == nullptr) return std::nullopt;
        return r->next_hop;
    });
}

void Aodv::on_mac_sent(const NetPacket& packet, NodeId to, bool confirmed) {
    if (!confirmed || !packet.is_data()) return;
    auto it = routes_.find(packet.destination);
    const double now = node_.now();
    if (it != routes_.end() && it->second.next_hop == to && it->second.expires > now) {
        it->second.expires = std::max(it->second.expires, now + params_.route_lifetime);
    }
}

void Aodv::on_mac_send_failed(NetPacket packet, NodeId to) {
    const double now = node_.now();
    for (auto& [dest, r] : routes_) {
        if (r.next_hop == to && r.expires > now) r.expires = now;
    }
    if (!packet.is_data()) return;
    if (packet.origin == node_.self() && packet.hop_trace.size() == 1) {
        packet.ttl += 1;  // the failed hop did not happen
        const NodeId dest = packet.destination;
        buffer(std::move(packet));
        if (!discoveries_.count(dest)) originate_rreq(dest);
        return;
    }
    node_.drop(packet, DropReason::mac_failure);
}

}  // namespace bbn::aodv
