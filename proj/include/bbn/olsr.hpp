#ifndef BBN_OLSR_HPP
#define BBN_OLSR_HPP

#include <map>
#include <set>
#include <vector>

#include "bbn/protocols.hpp"
#include "bbn/routing.hpp"

namespace bbn::olsr {

/// Greedy MPR selection. `two_hop` maps each symmetric neighbor to the
/// two-hop nodes it reaches (one-hop nodes and self already excluded).
/// Throws std::logic_error if the result leaves a reachable two-hop node
/// uncovered.
std::set<NodeId> select_mprs(const std::set<NodeId>& one_hop, const std::map<NodeId, std::set<NodeId>>& two_hop);

struct Route {
    NodeId next_hop = 0;
    int hops = 0;
    friend bool operator==(const Route&, const Route&) = default;
};

/// Undirected link (advertising node, advertised node).
using Link = std::pair<NodeId, NodeId>;

/// Shortest hop-count routes from `self`. Links touching `self` are taken
/// only from `symmetric`; ties prefer the lower next-hop id.
std::map<NodeId, Route> recompute_routes(NodeId self, const std::set<NodeId>& symmetric,
                                         const std::vector<Link>& links);

struct Hello {
    std::vector<NodeId> heard;      ///< asymmetric links
    std::vector<NodeId> symmetric;  ///< symmetric links, MPRs included
    std::vector<NodeId> mprs;
};

struct Tc {
    NodeId originator = 0;
    std::uint32_t ansn = 0;
    std::uint32_t msg_seq = 0;
    std::vector<NodeId> selectors;
};

inline constexpr std::uint32_t kHelloTimer = 1;
inline constexpr std::uint32_t kTcTimer = 2;

class Olsr final : public RoutingProtocol {
public:
    Olsr(RoutingServices& node, OlsrParams params);

    std::string_view name() const override { return "OLSRv2"; }
    void start() override;
    void on_app_send(NetPacket packet) override;
    void on_mac_receive(NetPacket packet, NodeId from) override;
    void on_mac_send_failed(NetPacket packet, NodeId to) override;
    void on_timer(std::uint32_t tag) override;

    // Introspection.
    std::set<NodeId> symmetric_neighbors();
    const std::set<NodeId>& mprs() const { return mprs_; }
    std::set<NodeId> mpr_selectors();
    const std::map<NodeId, Route>& routes();
    std::uint64_t tc_forwarded() const { return tc_forwarded_; }
    std::uint64_t tc_originated() const { return tc_originated_; }

private:
    struct LinkTuple {
        double heard_until = 0.0;
        double sym_until = 0.0;
    };
    struct Topology {
        std::uint32_t ansn = 0;
        std::map<NodeId, double> selectors;  ///< advertised node -> expiry
    };

    void send_hello();
    void send_tc();
    void handle_hello(const Hello& h, NodeId from);
    void handle_tc(NetPacket packet, NodeId from);
    void purge();
    void recompute_mprs();
    void forward_data(NetPacket packet);
    double hold(double interval) const { return params_.hold_factor * interval; }
    std::uint32_t max_ids_per_message(std::uint32_t fixed) const;

    OlsrParams params_;
    std::map<NodeId, LinkTuple> links_;
    std::map<NodeId, std::map<NodeId, double>> two_hop_;  ///< neighbor -> two-hop node -> expiry
    std::map<NodeId, double> selectors_;
    std::map<NodeId, Topology> topology_;
    std::map<std::pair<NodeId, std::uint32_t>, double> seen_tc_;
    std::set<NodeId> mprs_;
    std::map<NodeId, Route> routes_;
    bool dirty_ = true;
    double routes_valid_until_ = 0.0;
    std::uint32_t ansn_ = 0;
    std::uint32_t msg_seq_ = 0;
    std::uint64_t tc_forwarded_ = 0;
    std::uint64_t tc_originated_ = 0;
    std::vector<NodeId> last_advertised_;
};

}  // namespace bbn::olsr

#endif
