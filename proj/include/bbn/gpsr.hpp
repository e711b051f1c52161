#ifndef BBN_GPSR_HPP
#define BBN_GPSR_HPP

#include <map>
#include <optional>
#include <vector>

#include "bbn/protocols.hpp"
#include "bbn/routing.hpp"

namespace bbn::gpsr {

struct NeighborPos {
    NodeId id = 0;
    Point pos;
};

enum class Mode { greedy, perimeter };

struct GeoHeader {
    Mode mode = Mode::greedy;
    Point dest;
    Point lp;  ///< where perimeter mode was entered
    Point lf;  ///< where the current face was entered
    std::optional<NodeId> e0_from;  ///< first edge traversed on the current face
    std::optional<NodeId> e0_to;
    Point prev;  ///< position of the node that sent this copy
};

/// Neighbor strictly closer to dest than self that minimizes the distance;
/// ties go to the lower id.
std::optional<NodeId> greedy_next_hop(const Point& self, const std::vector<NeighborPos>& table, const Point& dest);

/// Gabriel-graph subset of the table as seen from self.
std::vector<NeighborPos> planarize_gg(const Point& self, const std::vector<NeighborPos>& table);

/// First planar neighbor counterclockwise from the direction self->ref,
/// excluding a neighbor lying exactly on that direction unless it is the
/// only choice.
std::optional<NodeId> next_counterclockwise(const Point& self, const Point& ref,
                                            const std::vector<NeighborPos>& planar);

/// One perimeter-mode decision. Updates the header (face changes, first
/// edge); returns nothing when the face was toured without progress.
std::optional<NodeId> perimeter_next_hop(NodeId self, const Point& self_pos, GeoHeader& header,
                                         const std::vector<NeighborPos>& planar, std::optional<NodeId> from);

/// Full forwarding decision at a node: perimeter exit check, greedy attempt,
/// perimeter entry. Updates the header.
std::optional<NodeId> route(NodeId self, const Point& self_pos, GeoHeader& header,
                            const std::vector<NeighborPos>& table, std::optional<NodeId> from);

inline constexpr std::uint32_t kBeaconTimer = 1;

class Gpsr final : public RoutingProtocol {
public:
    Gpsr(RoutingServices& node, GpsrParams params);

    std::string_view name() const override { return "GPSR"; }
    void start() override;
    void on_app_send(NetPacket packet) override;
    void on_mac_receive(NetPacket packet, NodeId from) override;
    void on_mac_send_failed(NetPacket packet, NodeId to) override;
    void on_timer(std::uint32_t tag) override;

    std::vector<NeighborPos> neighbors() const;

private:
    struct Beacon {
        Point pos;
    };
    struct Entry {
        Point pos;
        double heard = 0.0;
    };

    void send_beacon();
    void forward(NetPacket packet, std::optional<NodeId> from);
    Point advertised_position();

    GpsrParams params_;
    std::map<NodeId, Entry> table_;
};

}  // namespace bbn::gpsr

#endif
