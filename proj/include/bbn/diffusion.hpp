#ifndef BBN_DIFFUSION_HPP
#define BBN_DIFFUSION_HPP

#include <deque>
#include <map>
#include <optional>
#include <vector>

#include "bbn/protocols.hpp"
#include "bbn/routing.hpp"

namespace bbn::dd {

/// The single network-wide interest.
struct Interest {
    NodeId sink = kSinkId;
    std::uint32_t round = 0;
    int hops = 0;  ///< sender's distance to the sink
    double rate = 0.0;
};

struct Reinforcement {
    NodeId origin = 0;
    std::uint32_t app_seq = 0;
};

/// Header of data packets. Exploratory copies are broadcast once and name
/// the gradient neighbors that should take them further.
struct DataHeader {
    bool exploratory = true;
    std::vector<NodeId> receivers;
};

struct Gradient {
    int hops = 0;        ///< neighbor's distance to the sink
    double rate = 0.0;   ///< packets/s granted to this neighbor
    double expires = 0.0;
};

inline constexpr std::uint32_t kInterestBytes = 12;
inline constexpr std::uint32_t kReinforceBytes = 8;

class Diffusion final : public RoutingProtocol {
public:
    Diffusion(RoutingServices& node, DiffusionParams params);

    std::string_view name() const override { return "DD"; }
    void start() override;
    void on_app_send(NetPacket packet) override;
    void on_mac_receive(NetPacket packet, NodeId from) override;
    void on_mac_send_failed(NetPacket packet, NodeId to) override;
    void on_timer(std::uint32_t tag) override;

    /// Live gradients (toward the sink).
    std::map<NodeId, Gradient> gradients() const;
    std::optional<NodeId> reinforced() const;
    std::optional<int> hops_to_sink() const { return round_ == 0 ? std::nullopt : std::optional{hops_}; }
    std::uint64_t data_transmissions() const { return data_tx_; }

private:
    struct Buffered {
        NetPacket packet;
        double since = 0.0;
    };

    void send_interest();
    void handle_interest(const Interest& in, NodeId from);
    void handle_reinforcement(const Reinforcement& r, NodeId from);
    void handle_data(NetPacket packet, NodeId from);
    void explore(NetPacket packet);
    void send_reinforced(NetPacket packet, NodeId next);
    bool seen(const NetPacket& packet);
    void expire_buffer();
    std::vector<NodeId> gradient_list() const;

    DiffusionParams params_;
    std::uint32_t round_ = 0;
    int hops_ = 0;
    std::map<NodeId, Gradient> gradients_;
    std::optional<NodeId> reinforced_;
    double reinforced_until_ = 0.0;
    std::map<std::pair<NodeId, std::uint32_t>, double> seen_;   // (origin, seq) -> expiry
    std::map<std::pair<NodeId, std::uint32_t>, NodeId> upstream_;  // first sender of an exploratory copy
    std::deque<std::pair<std::pair<NodeId, std::uint32_t>, double>> upstream_age_;
    std::deque<Buffered> buffer_;
    EventHandle buffer_timer_;
    double last_exploratory_ = -1e300;
    std::uint64_t data_tx_ = 0;
};

}  // namespace bbn::dd

#endif
