#include "bbn/olsr.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace bbn::olsr {

std::set<NodeId> select_mprs(const std::set<NodeId>& one_hop, const std::map<NodeId, std::set<NodeId>>& two_hop) {
    std::set<NodeId> targets;
    std::map<NodeId, std::vector<NodeId>> coverers;  // two-hop node -> neighbors reaching it
    for (const auto& [n, reach] : two_hop) {
        if (!one_hop.count(n)) continue;
        for (NodeId x : reach) {
            if (one_hop.count(x)) continue;
            targets.insert(x);
            coverers[x].push_back(n);
        }
    }

    std::set<NodeId> mprs;
    std::set<NodeId> covered;
    auto take = [&](NodeId n) {
        if (!mprs.insert(n).second) return;
        auto it = two_hop.find(n);
        if (it == two_hop.end()) return;
        for (NodeId x : it->second) {
            if (targets.count(x)) covered.insert(x);
        }
    };

    for (const auto& [x, via] : coverers) {
        if (via.size() == 1) take(via.front());
    }
    while (covered.size() < targets.size()) {
        NodeId best = 0;
        std::size_t best_gain = 0;
        for (const auto& [n, reach] : two_hop) {
            if (!one_hop.count(n) || mprs.count(n)) continue;
            std::size_t gain = 0;
            for (NodeId x : reach) {
                if (targets.count(x) && !covered.count(x)) ++gain;
            }
            if (gain > best_gain) {  // map order visits lower ids first
                best_gain = gain;
                best = n;
            }
        }
        if (best_gain == 0) break;
        take(best);
    }

    for (NodeId x : targets) {
        if (!covered.count(x)) throw std::logic_error("MPR set leaves a two-hop node uncovered");
    }
    return mprs;
}

std::map<NodeId, Route> recompute_routes(NodeId self, const std::set<NodeId>& symmetric,
                                         const std::vector<Link>& links) {
    NodeId max_id = self;
    for (NodeId n : symmetric) max_id = std::max(max_id, n);
    for (const auto& [a, b] : links) max_id = std::max({max_id, a, b});
    const std::size_t size = static_cast<std::size_t>(max_id) + 1;

    std::vector<std::vector<NodeId>> adj(size);
    for (NodeId n : symmetric) {
        if (n == self) continue;
        adj[self].push_back(n);
        adj[n].push_back(self);
    }
    for (const auto& [a, b] : links) {
        if (a == b || a == self || b == self) continue;
        adj[a].push_back(b);
        adj[b].push_back(a);
    }
    for (auto& list : adj) {
        std::sort(list.begin(), list.end());
        list.erase(std::unique(list.begin(), list.end()), list.end());
    }

    std::vector<int> dist(size, -1);
    std::vector<NodeId> next(size, 0);
    std::vector<NodeId> frontier{self};
    dist[self] = 0;
    // BFS; a node's next hop is the smallest next hop over its shortest-path
    // predecessors. All of them are dequeued before the node itself is.
    for (std::size_t head = 0; head < frontier.size(); ++head) {
        const NodeId u = frontier[head];
        for (NodeId v : adj[u]) {
            const NodeId via = (u == self) ? v : next[u];
            if (dist[v] < 0) {
                dist[v] = dist[u] + 1;
                next[v] = via;
                frontier.push_back(v);
            } else if (dist[v] == dist[u] + 1 && via < next[v]) {
                next[v] = via;
            }
        }
    }
    std::map<NodeId, Route> table;
    for (NodeId v = 0; v < size; ++v) {
        if (v != self && dist[v] > 0) table.emplace_hint(table.end(), v, Route{next[v], dist[v]});
    }
    return table;
}

namespace {

constexpr std::uint32_t kHelloFixed = 4;
constexpr std::uint32_t kTcFixed = 8;
constexpr std::uint32_t kIdBytes = 4;

NetPacket control_packet(std::any body, std::uint32_t bytes) {
    NetPacket p;
    p.cls = PacketClass::control;
    p.destination = kBroadcast;
    p.header = std::move(body);
    p.header_bytes = bytes;
    return p;
}

}  // namespace

Olsr::Olsr(RoutingServices& node, OlsrParams params) : RoutingProtocol(node), params_(params) {}

void Olsr::start() {
    auto& rng = node_.rng();
    node_.schedule_timer(rng.uniform(0.0, params_.hello_interval), kHelloTimer);
    node_.schedule_timer(rng.uniform(0.0, params_.tc_interval), kTcTimer);
}

std::uint32_t Olsr::max_ids_per_message(std::uint32_t fixed) const {
    // Messages above the technology's payload limit are split.
    const std::size_t limit = node_.max_frame_payload();
    if (limit == 0) return std::numeric_limits<std::uint32_t>::max();
    return static_cast<std::uint32_t>((limit - fixed) / kIdBytes);
}

void Olsr::on_timer(std::uint32_t tag) {
    auto& rng = node_.rng();
    if (tag == kHelloTimer) {
        send_hello();
        const double j = rng.uniform(0.0, params_.max_jitter * params_.hello_interval);
        node_.schedule_timer(params_.hello_interval - j, kHelloTimer);
    } else if (tag == kTcTimer) {
        send_tc();
        const double j = rng.uniform(0.0, params_.max_jitter * params_.tc_interval);
        node_.schedule_timer(params_.tc_interval - j, kTcTimer);
    }
}

void Olsr::purge() {
    const double now = node_.now();
    for (auto it = links_.begin(); it != links_.end();) {
        if (it->second.heard_until <= now && it->second.sym_until <= now) {
            it = links_.erase(it);
            dirty_ = true;
        } else {
            ++it;
        }
    }
    for (auto it = two_hop_.begin(); it != two_hop_.end();) {
        auto& m = it->second;
        for (auto jt = m.begin(); jt != m.end();) {
            if (jt->second <= now) {
                jt = m.erase(jt);
                dirty_ = true;
            } else {
                ++jt;
            }
        }
        it = m.empty() ? two_hop_.erase(it) : std::next(it);
    }
    std::erase_if(selectors_, [now](const auto& kv) { return kv.second <= now; });
    for (auto it = topology_.begin(); it != topology_.end();) {
        auto& m = it->second.selectors;
        const auto before = m.size();
        std::erase_if(m, [now](const auto& kv) { return kv.second <= now; });
        if (m.size() != before) dirty_ = true;
        it = m.empty() ? topology_.erase(it) : std::next(it);
    }
    std::erase_if(seen_tc_, [now](const auto& kv) { return kv.second <= now; });
}

std::set<NodeId> Olsr::symmetric_neighbors() {
    purge();
    const double now = node_.now();
    std::set<NodeId> out;
    for (const auto& [n, l] : links_) {
        if (l.sym_until > now) out.insert(n);
    }
    return out;
}

std::set<NodeId> Olsr::mpr_selectors() {
    purge();
    const auto sym = symmetric_neighbors();
    std::set<NodeId> out;
    for (const auto& [n, until] : selectors_) {
        if (sym.count(n)) out.insert(n);
    }
    return out;
}

void Olsr::recompute_mprs() {
    const auto one_hop = symmetric_neighbors();
    std::map<NodeId, std::set<NodeId>> reach;
    for (NodeId n : one_hop) {
        auto it = two_hop_.find(n);
        if (it == two_hop_.end()) continue;
        auto& r = reach[n];
        for (const auto& [x, until] : it->second) {
            if (x != node_.self() && !one_hop.count(x)) r.insert(x);
        }
    }
    mprs_ = select_mprs(one_hop, reach);
}

const std::map<NodeId, Route>& Olsr::routes() {
    purge();
    const double now = node_.now();
    if (!dirty_ && now < routes_valid_until_) return routes_;

    double valid_until = std::numeric_limits<double>::infinity();
    std::set<NodeId> sym;
    for (const auto& [n, l] : links_) {
        if (l.sym_until > now) {
            sym.insert(n);
            valid_until = std::min(valid_until, l.sym_until);
        }
    }
    std::vector<Link> links;
    for (const auto& [n, m] : two_hop_) {
        if (!sym.count(n)) continue;
        for (const auto& [x, until] : m) {
            links.emplace_back(n, x);
            valid_until = std::min(valid_until, until);
        }
    }
    for (const auto& [orig, topo] : topology_) {
        for (const auto& [x, until] : topo.selectors) {
            links.emplace_back(orig, x);
            valid_until = std::min(valid_until, until);
        }
    }
    routes_ = recompute_routes(node_.self(), sym, links);
    routes_valid_until_ = valid_until;
    dirty_ = false;
    return routes_;
}

void Olsr::send_hello() {
    purge();
    recompute_mprs();
    const double now = node_.now();
    std::vector<std::pair<NodeId, bool>> listed;  // (id, symmetric)
    for (const auto& [n, l] : links_) {
        if (l.sym_until > now) {
            listed.emplace_back(n, true);
        } else if (l.heard_until > now) {
            listed.emplace_back(n, false);
        }
    }
    const std::uint32_t per_msg = max_ids_per_message(kHelloFixed);
    std::size_t i = 0;
    do {
        Hello h;
        const std::size_t end = std::min(listed.size(), i + per_msg);
        for (; i < end; ++i) {
            const auto [n, sym] = listed[i];
            if (sym) {
                h.symmetric.push_back(n);
                if (mprs_.count(n)) h.mprs.push_back(n);
            } else {
                h.heard.push_back(n);
            }
        }
        const auto bytes = static_cast<std::uint32_t>(kHelloFixed + kIdBytes * (h.heard.size() + h.symmetric.size()));
        NetPacket p = control_packet(std::move(h), bytes);
        p.ttl = 1;
        node_.mac_send(std::move(p), kBroadcast);
    } while (i < listed.size());
}

void Olsr::send_tc() {
    const auto sel = mpr_selectors();
    if (sel.empty()) return;
    std::vector<NodeId> ids(sel.begin(), sel.end());
    if (ids != last_advertised_) {
        ++ansn_;
        last_advertised_ = ids;
    }
    const std::uint32_t per_msg = max_ids_per_message(kTcFixed);
    for (std::size_t i = 0; i < ids.size(); i += per_msg) {
        Tc tc;
        tc.originator = node_.self();
        tc.ansn = ansn_;
        tc.msg_seq = ++msg_seq_;
        const std::size_t end = std::min(ids.size(), i + per_msg);
        tc.selectors.assign(ids.begin() + static_cast<std::ptrdiff_t>(i), ids.begin() + static_cast<std::ptrdiff_t>(end));
        const auto bytes = static_cast<std::uint32_t>(kTcFixed + kIdBytes * tc.selectors.size());
        seen_tc_[{tc.originator, tc.msg_seq}] = node_.now() + hold(params_.tc_interval);
        ++tc_originated_;
        node_.mac_send(control_packet(std::move(tc), bytes), kBroadcast);
    }
}

void Olsr::handle_hello(const Hello& h, NodeId from) {
    const double now = node_.now();
    const double until = now + hold(params_.hello_interval);
    const NodeId self = node_.self();
    auto& link = links_[from];
    const bool was_sym = link.sym_until > now;
    link.heard_until = until;
    const auto lists_me = [self](const std::vector<NodeId>& v) { return std::find(v.begin(), v.end(), self) != v.end(); };
    if (lists_me(h.heard) || lists_me(h.symmetric)) link.sym_until = until;
    const bool sym = link.sym_until > now;
    if (sym != was_sym) dirty_ = true;
    if (!sym) return;
    auto& reach = two_hop_[from];
    for (NodeId x : h.symmetric) {
        if (x == self) continue;
        auto [it, fresh] = reach.try_emplace(x, until);
        if (fresh) dirty_ = true;
        it->second = until;
    }
    if (lists_me(h.mprs)) selectors_[from] = until;
}

void Olsr::handle_tc(NetPacket packet, NodeId from) {
    const auto& tc = std::any_cast<const Tc&>(packet.header);
    const double now = node_.now();
    if (tc.originator == node_.self()) return;
    const auto key = std::make_pair(tc.originator, tc.msg_seq);
    if (seen_tc_.count(key)) return;
    auto lit = links_.find(from);
    if (lit == links_.end() || lit->second.sym_until <= now) return;
    const double until = now + hold(params_.tc_interval);
    seen_tc_[key] = until;

    auto& topo = topology_[tc.originator];
    if (tc.ansn > topo.ansn || topo.selectors.empty()) {
        if (tc.ansn > topo.ansn) topo.selectors.clear();
        topo.ansn = tc.ansn;
    }
    if (tc.ansn == topo.ansn) {
        for (NodeId x : tc.selectors) topo.selectors[x] = until;
        dirty_ = true;
    }

    auto sit = selectors_.find(from);
    if (sit == selectors_.end() || sit->second <= now || packet.ttl <= 1) return;
    packet.ttl -= 1;
    ++tc_forwarded_;
    node_.mac_send_after(node_.rng().uniform(0.0, params_.forward_jitter), std::move(packet), kBroadcast);
}

void Olsr::on_mac_receive(NetPacket packet, NodeId from) {
    if (packet.is_data()) {
        forward_data(std::move(packet));
        return;
    }
    if (const auto* h = std::any_cast<Hello>(&packet.header)) {
        handle_hello(*h, from);
    } else if (std::any_cast<Tc>(&packet.header) != nullptr) {
        handle_tc(std::move(packet), from);
    }
}

void Olsr::on_app_send(NetPacket packet) { forward_data(std::move(packet)); }

void Olsr::forward_data(NetPacket packet) {
    deliver_or_forward(node_, std::move(packet), [this](NetPacket& p) -> std::optional<NodeId> {
        const auto& table = routes();
        auto it = table.find(p.destination);
        if (it == table.end()) return std::nullopt;
        return it->second.next_hop;
    });
}

void Olsr::on_mac_send_failed(NetPacket packet, NodeId to) {
    auto it = links_.find(to);
    if (it != links_.end()) {
        links_.erase(it);
        two_hop_.erase(to);
        selectors_.erase(to);
        dirty_ = true;
    }
    if (packet.is_data()) node_.drop(packet, DropReason::mac_failure);
}

}  // namespace bbn::olsr
