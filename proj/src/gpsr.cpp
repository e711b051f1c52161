#include "bbn/gpsr.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace bbn::gpsr {

namespace {

double angle_of(const Point& from, const Point& to) { return std::atan2(to.y - from.y, to.x - from.x); }

const NeighborPos* find(const std::vector<NeighborPos>& v, NodeId id) {
    for (const auto& n : v) {
        if (n.id == id) return &n;
    }
    return nullptr;
}

}  // namespace

std::optional<NodeId> greedy_next_hop(const Point& self, const std::vector<NeighborPos>& table, const Point& dest) {
    double best = distance_sq(self, dest);
    std::optional<NodeId> choice;
    for (const auto& n : table) {
        const double d = distance_sq(n.pos, dest);
        if (d < best || (choice && d == best && n.id < *choice)) {
            best = d;
            choice = n.id;
        }
    }
    return choice;
}

std::vector<NeighborPos> planarize_gg(const Point& self, const std::vector<NeighborPos>& table) {
    std::vector<NeighborPos> kept;
    for (const auto& v : table) {
        const Point mid = lerp(self, v.pos, 0.5);
        const double r_sq = distance_sq(self, v.pos) / 4.0;
        bool witness = false;
        for (const auto& w : table) {
            if (w.id == v.id) continue;
            if (distance_sq(w.pos, mid) < r_sq) {
                witness = true;
                break;
            }
        }
        if (!witness) kept.push_back(v);
    }
    return kept;
}

std::optional<NodeId> next_counterclockwise(const Point& self, const Point& ref, const std::vector<NeighborPos>& planar) {
    const double base = angle_of(self, ref);
    std::optional<NodeId> best;
    double best_delta = 0.0;
    for (const auto& n : planar) {
        double delta = angle_of(self, n.pos) - base;
        while (delta <= 0.0) delta += 2.0 * std::numbers::pi;
        while (delta > 2.0 * std::numbers::pi) delta -= 2.0 * std::numbers::pi;
        if (!best || delta < best_delta || (delta == best_delta && n.id < *best)) {
            best = n.id;
            best_delta = delta;
        }
    }
    return best;
}

std::optional<NodeId> perimeter_next_hop(NodeId self, const Point& self_pos, GeoHeader& header,
                                         const std::vector<NeighborPos>& planar, std::optional<NodeId> from) {
    if (planar.empty()) return std::nullopt;
    // Reference direction: the incoming edge, or the line toward the
    // destination on perimeter entry.
    Point ref = header.dest;
    if (from) ref = header.prev;
    auto next = next_counterclockwise(self_pos, ref, planar);
    // Face change: the candidate edge crosses Lp->dest closer than Lf.
    for (std::size_t guard = 0; next && guard < planar.size(); ++guard) {
        const NeighborPos* n = find(planar, *next);
        const auto x = segment_intersection(self_pos, n->pos, header.lp, header.dest);
        if (!x || *x == self_pos || distance(*x, header.dest) >= distance(header.lf, header.dest)) break;
        header.lf = *x;
        header.e0_from.reset();
        header.e0_to.reset();
        next = next_counterclockwise(self_pos, n->pos, planar);
    }
    if (!next) return std::nullopt;
    if (header.e0_from == self && header.e0_to == *next) return std::nullopt;  // face toured
    if (!header.e0_from) {
        header.e0_from = self;
        header.e0_to = *next;
    }
    return next;
}

std::optional<NodeId> route(NodeId self, const Point& self_pos, GeoHeader& header,
                            const std::vector<NeighborPos>& table, std::optional<NodeId> from) {
    if (header.mode == Mode::perimeter && distance(self_pos, header.dest) < distance(header.lp, header.dest)) {
        header.mode = Mode::greedy;
    }
    if (header.mode == Mode::greedy) {
        if (auto g = greedy_next_hop(self_pos, table, header.dest)) return g;
        if (table.empty()) return std::nullopt;
        header.mode = Mode::perimeter;
        header.lp = self_pos;
        header.lf = self_pos;
        header.e0_from.reset();
        header.e0_to.reset();
        from.reset();
    }
    return perimeter_next_hop(self, self_pos, header, planarize_gg(self_pos, table), from);
}

Gpsr::Gpsr(RoutingServices& node, GpsrParams params) : RoutingProtocol(node), params_(params) {}

void Gpsr::start() {
    node_.schedule_timer(node_.rng().uniform(0.0, params_.beacon_interval), kBeaconTimer);
}

void Gpsr::on_timer(std::uint32_t tag) {
    if (tag != kBeaconTimer) return;
    send_beacon();
    // Beacon spacing jittered uniformly in [0.5, 1.5] intervals.
    node_.schedule_timer(params_.beacon_interval * node_.rng().uniform(0.5, 1.5), kBeaconTimer);
}

Point Gpsr::advertised_position() {
    Point p = node_.position_of_self();
    if (params_.position_noise > 0.0) {
        p.x += node_.rng().gaussian(0.0, params_.position_noise);
        p.y += node_.rng().gaussian(0.0, params_.position_noise);
    }
    return p;
}

void Gpsr::send_beacon() {
    NetPacket p;
    p.cls = PacketClass::control;
    p.destination = kBroadcast;
    p.header = Beacon{advertised_position()};
    p.header_bytes = params_.beacon_bytes;
    p.ttl = 1;
    node_.mac_send(std::move(p), kBroadcast);
}

std::vector<NeighborPos> Gpsr::neighbors() const {
    const double cutoff = node_.now() - params_.expiry_factor * params_.beacon_interval;
    std::vector<NeighborPos> out;
    out.reserve(table_.size());
    for (const auto& [id, e] : table_) {
        if (e.heard > cutoff) out.push_back({id, e.pos});
    }
    return out;
}

void Gpsr::on_app_send(NetPacket packet) {
    GeoHeader h;
    h.dest = node_.sink_position();
    packet.header = h;
    packet.header_bytes = params_.header_bytes;
    forward(std::move(packet), std::nullopt);
}

void Gpsr::forward(NetPacket packet, std::optional<NodeId> from) {
    const NodeId self = node_.self();
    deliver_or_forward(node_, std::move(packet), [&](NetPacket& p) -> std::optional<NodeId> {
        auto& h = std::any_cast<GeoHeader&>(p.header);
        const Point here = node_.position_of_self();
        auto next = route(self, here, h, neighbors(), from);
        h.prev = here;
        return next;
    });
}

void Gpsr::on_mac_receive(NetPacket packet, NodeId from) {
    if (packet.is_data()) {
        // Data carries the sender's position; it is fresher than its beacon.
        if (const auto* h = std::any_cast<GeoHeader>(&packet.header)) table_[from] = Entry{h->prev, node_.now()};
        forward(std::move(packet), from);
        return;
    }
    if (const auto* b = std::any_cast<Beacon>(&packet.header)) table_[from] = Entry{b->pos, node_.now()};
}

void Gpsr::on_mac_send_failed(NetPacket packet, NodeId to) {
    table_.erase(to);
    if (!packet.is_data()) return;
    // Choose again without the unreachable neighbor; the hop did not happen.
    packet.ttl += 1;
    auto& h = std::any_cast<GeoHeader&>(packet.header);
    std::optional<NodeId> from;
    if (packet.hop_trace.size() >= 2) from = packet.hop_trace[packet.hop_trace.size() - 2];
    if (h.mode == Mode::perimeter && h.e0_from == node_.self()) {
        h.e0_from.reset();
        h.e0_to.reset();
    }
    // h.prev was overwritten with our own position; perimeter retries restart
    // from the destination line.
    if (h.mode == Mode::perimeter) from.reset();
    forward(std::move(packet), from);
}

}  // namespace bbn::gpsr
