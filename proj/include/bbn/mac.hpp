#ifndef BBN_MAC_HPP
#define BBN_MAC_HPP

#include <cstdint>
#include <deque>
#include <optional>
#include <unordered_map>

#include "bbn/engine.hpp"
#include "bbn/medium.hpp"
#include "bbn/phy.hpp"
#include "bbn/routing.hpp"

namespace bbn {

/// CSMA/CA parameter set. One struct covers the three disciplines; fields a
/// discipline does not use are ignored.
struct MacDiscipline {
    MacKind kind = MacKind::dcf;
    bool ack = true;
    bool rts_cts = true;
    int retransmit_limit = 7;
    // DCF / BAN156 contention window bounds.
    int cw_min = 31;
    int cw_max = 1023;
    // Z154 backoff exponent bounds.
    int min_be = 3;
    int max_be = 3;
    /// Z154: CCA rounds before channel-access failure. BAN156: backoff
    /// freezes tolerated per attempt.
    int max_backoff_rounds = 5;
    double slot = 20e-6;
    double sifs = 10e-6;
    double difs = 50e-6;
    double cca_duration = 128e-6;

    int max_attempts() const { return 1 + retransmit_limit; }
};

MacDiscipline default_discipline(MacKind kind);

/// Backoff slot count for the given 1-based attempt (Z154: CCA round).
int draw_backoff(const MacDiscipline& d, int attempt, RngStream& rng);

/// Closed slot window draw_backoff samples from.
std::pair<int, int> backoff_window(const MacDiscipline& d, int attempt);

enum class TxOutcome { delivered, collided, cca_busy_abort, retry_exhausted };
std::string_view to_string(TxOutcome o);

/// Upper-layer side of the MAC.
class MacUser {
public:
    virtual ~MacUser() = default;
    virtual void on_mac_receive(const NetPacket& packet, NodeId from) = 0;
    /// The frame left the MAC. `confirmed` is true when an ACK was received.
    virtual void on_mac_sent(const NetPacket& packet, NodeId to, bool confirmed) = 0;
    virtual void on_mac_send_failed(NetPacket packet, NodeId to, TxOutcome outcome) = 0;
};

struct MacStats {
    std::uint64_t data_frames = 0;
    std::uint64_t control_frames = 0;
    std::uint64_t retries = 0;
    std::uint64_t failures = 0;
    std::uint64_t cca_aborts = 0;
    std::uint64_t queue_drops = 0;
};

/// Per-node CSMA/CA state machine. DCF (RTS/CTS + ACK, freezing binary
/// exponential backoff), unslotted 802.15.4 CSMA/CA (no ACK, no retries) and
/// 802.15.6 CSMA/CA (immediate ACK, alternate-failure CW doubling).
class Mac final : public MediumListener {
public:
    Mac(NodeId self, Scheduler& scheduler, Medium& medium, MacDiscipline discipline, std::size_t queue_capacity,
        RngStream rng, MacUser& user);

    /// Queues a packet for next_hop (kBroadcast allowed). Returns false when
    /// the queue is full.
    bool enqueue(NetPacket packet, NodeId next_hop);

    std::size_t queue_length() const { return queue_.size(); }
    bool idle() const { return state_ == State::idle && queue_.empty(); }
    const MacStats& stats() const { return stats_; }
    const MacDiscipline& discipline() const { return discipline_; }

    void on_frame_received(const Frame& frame) override;
    void on_tx_end(const Frame& frame) override;
    void on_channel_busy() override;
    void on_channel_idle() override;

private:
    enum class State { idle, counting, frozen, cca_wait, tx_rts, wait_cts, tx_data, wait_ack };

    struct Pending {
        NetPacket packet;
        NodeId next_hop = kBroadcast;
    };

    void start_next();
    void begin_attempt();
    void resume_countdown();
    void freeze();
    void countdown_done();
    void z154_backoff();
    void z154_cca();
    void send_rts();
    void send_data();
    void send_response(FrameType type, NodeId to, double nav_until);
    void attempt_failed();
    void complete(bool confirmed);
    void fail(TxOutcome outcome);
    bool virtually_busy() const;
    void cancel_timer();
    double control_airtime() const;
    double data_airtime() const;

    NodeId self_;
    Scheduler& scheduler_;
    Medium& medium_;
    MacDiscipline discipline_;
    std::size_t capacity_;
    RngStream rng_;
    MacUser& user_;

    std::deque<Pending> queue_;
    std::optional<Pending> current_;
    State state_ = State::idle;
    int attempt_ = 0;
    int rounds_ = 0;
    int counter_ = 0;
    double countdown_start_ = 0.0;
    double cca_start_ = 0.0;
    double nav_until_ = 0.0;
    EventHandle timer_;
    EventHandle nav_timer_;
    std::uint32_t next_seq_ = 1;
    std::uint32_t current_seq_ = 0;
    std::unordered_map<NodeId, std::uint32_t> last_seq_from_;
    MacStats stats_;
};

}  // namespace bbn

#endif
