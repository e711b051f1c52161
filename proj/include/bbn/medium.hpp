#ifndef BBN_MEDIUM_HPP
#define BBN_MEDIUM_HPP

#include <cstdint>
#include <memory>
#include <unordered_map>
#include <vector>

#include "bbn/engine.hpp"
#include "bbn/mobility.hpp"
#include "bbn/phy.hpp"
#include "bbn/routing.hpp"

namespace bbn {

enum class FrameType { data, rts, cts, ack };

/// A MAC frame on the air. `packet` is null for control frames.
struct Frame {
    FrameType type = FrameType::data;
    NodeId src = 0;
    NodeId dst = kBroadcast;
    std::uint32_t seq = 0;
    std::size_t payload_bytes = 0;
    double duration = 0.0;
    double nav_until = 0.0;  ///< end of the reserved exchange (DCF virtual carrier sense)
    std::shared_ptr<const NetPacket> packet;
};

/// Per-node receiver of medium events (implemented by the MAC).
class MediumListener {
public:
    virtual ~MediumListener() = default;
    virtual void on_frame_received(const Frame& frame) = 0;
    virtual void on_tx_end(const Frame& frame) = 0;
    virtual void on_channel_busy() = 0;
    virtual void on_channel_idle() = 0;
};

struct MediumParams {
    double capture_threshold_db = 10.0;
    /// Carrier sense threshold; defaults to sensitivity minus the profile margin.
    std::optional<double> carrier_sense_dbm;
    /// Signals below this level are ignored entirely.
    double interference_floor_dbm = -100.0;
};

/// The shared wireless channel of one run: propagation, half-duplex radios,
/// threshold + capture reception, carrier sense and radio-state energy.
class Medium {
public:
    Medium(Scheduler& scheduler, const MobilityTrace& trace, std::vector<Polygon> obstacles, PropagationModel propagation,
           TechProfile profile, MediumParams params, EnergyLedger& energy);

    void attach(NodeId node, MediumListener* listener);

    /// Starts transmitting `frame` from `sender` now for frame.duration.
    void transmit(NodeId sender, Frame frame);

    bool channel_busy(NodeId node) const { return radios_[node].busy; }
    /// True when the channel at `node` has been continuously idle since `t`.
    bool idle_since(NodeId node, double t) const {
        return !radios_[node].busy && radios_[node].idle_since <= t;
    }
    bool transmitting(NodeId node) const { return radios_[node].transmitting; }
    bool receiving(NodeId node) const { return radios_[node].locked != 0; }

    Point position(NodeId node, double t) const { return trace_.position_at(node, t); }
    const TechProfile& profile() const { return profile_; }
    const PropagationModel& propagation() const { return propagation_; }
    std::size_t node_count() const { return radios_.size(); }

    std::uint64_t transmissions() const { return tx_count_; }
    std::uint64_t collisions() const { return corrupted_count_; }

private:
    struct Incoming {
        std::uint64_t tx = 0;
        double mw = 0.0;
    };
    struct Radio {
        std::vector<Incoming> incoming;
        double incoming_mw = 0.0;
        bool transmitting = false;
        bool busy = false;
        double idle_since = 0.0;
        std::uint64_t locked = 0;
        double locked_mw = 0.0;
        bool locked_corrupt = false;
        MediumListener* listener = nullptr;
    };
    struct Transmission {
        NodeId sender = 0;
        Frame frame;
        std::vector<NodeId> audience;
    };

    void finish(std::uint64_t id);
    void refresh_positions();
    void recompute_incoming(Radio& r);

    Scheduler& scheduler_;
    const MobilityTrace& trace_;
    std::vector<Polygon> obstacles_;
    PropagationModel propagation_;
    TechProfile profile_;
    MediumParams params_;
    EnergyLedger& energy_;
    std::vector<Radio> radios_;
    std::unordered_map<std::uint64_t, Transmission> active_;
    std::uint64_t next_tx_ = 1;
    std::uint64_t tx_count_ = 0;
    std::uint64_t corrupted_count_ = 0;
    double capture_ratio_;
    double cs_mw_;
    double positions_time_ = -1.0;
    std::vector<Point> positions_;
    double max_range_m_;
    double unit_gain_mw_;
    double floor_mw_;
    double sensitivity_mw_;
    double wall_factor_;
};

}  // namespace bbn

#endif
