#include "bbn/diffusion.hpp"

#include <algorithm>

namespace bbn::dd {

namespace {

constexpr std::uint32_t kInterestTimer = 1;
constexpr std::uint32_t kBufferTimer = 2;
constexpr double kSeenLifetime = 30.0;

NetPacket control_packet(std::any body, std::uint32_t bytes, NodeId destination) {
    NetPacket p;
    p.cls = PacketClass::control;
    p.destination = destination;
    p.header = std::move(body);
    p.header_bytes = bytes;
    return p;
}

}  // namespace

Diffusion::Diffusion(RoutingServices& node, DiffusionParams params) : RoutingProtocol(node), params_(params) {}

void Diffusion::start() {
    if (node_.self() == kSinkId) node_.schedule_timer(0.0, kInterestTimer);
}

void Diffusion::on_timer(std::uint32_t tag) {
    if (tag == kInterestTimer) {
        send_interest();
        node_.schedule_timer(params_.interest_interval, kInterestTimer);
    } else if (tag == kBufferTimer) {
        expire_buffer();
    }
}

void Diffusion::send_interest() {
    Interest in;
    in.sink = node_.self();
    in.round = ++round_;
    in.hops = 0;
    in.rate = params_.exploratory_rate;
    hops_ = 0;
    node_.mac_send(control_packet(in, kInterestBytes, kBroadcast), kBroadcast);
}

std::map<NodeId, Gradient> Diffusion::gradients() const {
    std::map<NodeId, Gradient> out;
    const double now = node_.now();
    for (const auto& [n, g] : gradients_) {
        if (g.expires > now) out.emplace(n, g);
    }
    return out;
}

std::vector<NodeId> Diffusion::gradient_list() const {
    std::vector<NodeId> out;
    const double now = node_.now();
    for (const auto& [n, g] : gradients_) {
        if (g.expires > now) out.push_back(n);
    }
    return out;
}

std::optional<NodeId> Diffusion::reinforced() const {
    if (reinforced_ && reinforced_until_ > node_.now()) return reinforced_;
    return std::nullopt;
}

void Diffusion::handle_interest(const Interest& in, NodeId from) {
    if (node_.self() == in.sink || from == node_.self()) return;
    const double now = node_.now();
    if (in.round > round_) {
        round_ = in.round;
        hops_ = in.hops + 1;
        // Only neighbors strictly closer to the sink keep a gradient.
        std::erase_if(gradients_, [this](const auto& kv) { return kv.second.hops >= hops_; });
        gradients_[from] = Gradient{in.hops, in.rate, now + params_.gradient_lifetime};
        Interest fwd = in;
        fwd.hops = hops_;
        node_.mac_send_after(node_.rng().uniform(0.0, params_.forward_jitter),
                             control_packet(fwd, kInterestBytes, kBroadcast), kBroadcast);
    } else if (in.round == round_ && in.hops < hops_) {
        if (in.hops + 1 < hops_) {
            // A shorter path arrived late: keep only gradients that still lead
            // strictly closer to the sink.
            hops_ = in.hops + 1;
            std::erase_if(gradients_, [this](const auto& kv) { return kv.second.hops >= hops_; });
        }
        auto& g = gradients_[from];
        g.hops = in.hops;
        g.rate = std::max(g.rate, in.rate);
        g.expires = now + params_.gradient_lifetime;
    }
}

bool Diffusion::seen(const NetPacket& packet) {
    const double now = node_.now();
    const auto key = std::make_pair(packet.origin, packet.app_seq);
    auto [it, fresh] = seen_.try_emplace(key, now + kSeenLifetime);
    if (!fresh) return true;
    if (seen_.size() > 8192) std::erase_if(seen_, [now](const auto& kv) { return kv.second <= now; });
    return false;
}

void Diffusion::on_app_send(NetPacket packet) {
    seen(packet);
    const double now = node_.now();
    const double period = 1.0 / params_.exploratory_rate;
    const bool explore_due = now - last_exploratory_ >= period - 1e-9;
    if (auto r = reinforced()) {
        // Close to expiry, an exploratory packet asks the sink to refresh
        // the path before it lapses.
        if (!explore_due || reinforced_until_ - now > period || gradient_list().empty()) {
            send_reinforced(std::move(packet), *r);
            return;
        }
        last_exploratory_ = now;
        explore(std::move(packet));
        return;
    }
    if (explore_due) {
        if (!gradient_list().empty()) {
            last_exploratory_ = now;
            explore(std::move(packet));
            return;
        }
        node_.drop(packet, DropReason::no_route);
        return;
    }
    // Exploratory budget spent: hold the packet until a reinforcement opens
    // the full-rate path.
    while (buffer_.size() >= params_.buffer_capacity && !buffer_.empty()) {
        node_.drop(buffer_.front().packet, DropReason::no_route);
        buffer_.pop_front();
    }
    buffer_.push_back(Buffered{std::move(packet), now});
    if (!buffer_timer_.valid()) expire_buffer();
}

void Diffusion::expire_buffer() {
    buffer_timer_ = {};
    const double now = node_.now();
    const double hold = 1.0 / params_.exploratory_rate;
    while (!buffer_.empty() && buffer_.front().since + hold <= now) {
        node_.drop(buffer_.front().packet, DropReason::no_route);
        buffer_.pop_front();
    }
    if (!buffer_.empty()) buffer_timer_ = node_.schedule_timer(buffer_.front().since + hold - now, kBufferTimer);
}

void Diffusion::explore(NetPacket packet) {
    if (packet.ttl <= 0) {
        node_.drop(packet, DropReason::ttl_expired);
        return;
    }
    auto receivers = gradient_list();
    if (receivers.empty()) {
        node_.drop(packet, DropReason::no_route);
        return;
    }
    packet.header = DataHeader{true, std::move(receivers)};
    packet.ttl -= 1;
    ++data_tx_;
    const double delay = packet.origin == node_.self() ? 0.0 : node_.rng().uniform(0.0, params_.forward_jitter);
    node_.mac_send_after(delay, std::move(packet), kBroadcast);
}

void Diffusion::send_reinforced(NetPacket packet, NodeId next) {
    if (packet.ttl <= 0) {
        node_.drop(packet, DropReason::ttl_expired);
        return;
    }
    packet.header = DataHeader{false, {}};
    packet.ttl -= 1;
    ++data_tx_;
    node_.mac_send(std::move(packet), next);
}

void Diffusion::handle_data(NetPacket packet, NodeId from) {
    const NodeId self = node_.self();
    const auto* h = std::any_cast<DataHeader>(&packet.header);
    const bool exploratory = h != nullptr && h->exploratory;
    if (exploratory && self != kSinkId && std::find(h->receivers.begin(), h->receivers.end(), self) == h->receivers.end()) {
        node_.discard(packet);
        return;
    }
    if (self == packet.destination) {
        const bool first = !seen(packet);
        if (first && exploratory) {
            // Positive reinforcement toward the neighbor that delivered first.
            const Reinforcement r{packet.origin, packet.app_seq};
            NetPacket p = control_packet(r, kReinforceBytes, from);
            node_.mac_send(std::move(p), from);
        }
        node_.deliver(packet);
        return;
    }
    if (seen(packet)) {
        node_.discard(packet);
        return;
    }
    if (exploratory) {
        const auto key = std::make_pair(packet.origin, packet.app_seq);
        upstream_[key] = from;
        upstream_age_.emplace_back(key, node_.now());
        while (!upstream_age_.empty() && upstream_age_.front().second + kSeenLifetime < node_.now()) {
            upstream_.erase(upstream_age_.front().first);
            upstream_age_.pop_front();
        }
        explore(std::move(packet));
        return;
    }
    if (auto r = reinforced()) {
        send_reinforced(std::move(packet), *r);
    } else {
        explore(std::move(packet));
    }
}

void Diffusion::handle_reinforcement(const Reinforcement& r, NodeId from) {
    const double now = node_.now();
    reinforced_ = from;
    reinforced_until_ = now + params_.reinforcement_lifetime;
    auto g = gradients_.find(from);
    if (g != gradients_.end()) g->second.rate = std::max(g->second.rate, params_.data_rate);
    if (r.origin == node_.self()) {
        std::deque<Buffered> q = std::move(buffer_);
        buffer_.clear();
        node_.cancel_timer(buffer_timer_);
        buffer_timer_ = {};
        for (auto& b : q) send_reinforced(std::move(b.packet), from);
        return;
    }
    auto it = upstream_.find({r.origin, r.app_seq});
    if (it == upstream_.end()) return;
    node_.mac_send(control_packet(r, kReinforceBytes, it->second), it->second);
}

void Diffusion::on_mac_receive(NetPacket packet, NodeId from) {
    if (packet.is_data()) {
        handle_data(std::move(packet), from);
    } else if (const auto* in = std::any_cast<Interest>(&packet.header)) {
        handle_interest(*in, from);
    } else if (const auto* r = std::any_cast<Reinforcement>(&packet.header)) {
        handle_reinforcement(*r, from);
    }
}

void Diffusion::on_mac_send_failed(NetPacket packet, NodeId to) {
    if (reinforced_ == to) reinforced_.reset();
    gradients_.erase(to);
    if (!packet.is_data()) return;
    packet.ttl += 1;  // retry the same hop budget over the exploratory path
    const bool origin = packet.origin == node_.self() && packet.hop_trace.size() == 1;
    if (origin) last_exploratory_ = node_.now();
    explore(std::move(packet));
}

}  // namespace bbn::dd
