#include "bbn/mac.hpp"

#include <algorithm>
#include <cmath>

namespace bbn {

MacDiscipline default_discipline(MacKind kind) {
    MacDiscipline d;
    d.kind = kind;
    switch (kind) {
        case MacKind::dcf:
            d.ack = true;
            d.rts_cts = true;
            d.retransmit_limit = 7;
            d.cw_min = 31;
            d.cw_max = 1023;
            d.slot = 20e-6;
            d.sifs = 10e-6;
            d.difs = 50e-6;
            break;
        case MacKind::z154:
            d.ack = false;
            d.rts_cts = false;
            d.retransmit_limit = 0;
            d.min_be = 3;
            d.max_be = 3;
            d.max_backoff_rounds = 5;
            d.slot = 320e-6;  // aUnitBackoffPeriod
            d.cca_duration = 128e-6;
            d.sifs = 0.0;
            d.difs = 0.0;
            break;
        case MacKind::ban156:
            d.ack = true;
            d.rts_cts = false;
            d.retransmit_limit = 3;
            d.cw_min = 8;  // user priority 2
            d.cw_max = 32;
            d.max_backoff_rounds = 5;
            d.slot = 145e-6;
            d.sifs = 75e-6;
            d.difs = 75e-6;
            break;
    }
    return d;
}

std::pair<int, int> backoff_window(const MacDiscipline& d, int attempt) {
    attempt = std::max(attempt, 1);
    switch (d.kind) {
        case MacKind::dcf: {
            const int doublings = std::min(attempt - 1, 20);
            const long cw = std::min<long>(d.cw_max, (static_cast<long>(d.cw_min) + 1) * (1L << doublings) - 1);
            return {0, static_cast<int>(cw)};
        }
        case MacKind::z154: {
            const int be = std::min(d.min_be + attempt - 1, d.max_be);
            return {0, (1 << be) - 1};
        }
        case MacKind::ban156: {
            // CW doubles after every second consecutive failure.
            const int doublings = std::min((attempt - 1) / 2, 20);
            const long cw = std::min<long>(d.cw_max, static_cast<long>(d.cw_min) * (1L << doublings));
            return {1, static_cast<int>(cw)};
        }
    }
    return {0, 0};
}

int draw_backoff(const MacDiscipline& d, int attempt, RngStream& rng) {
    const auto [lo, hi] = backoff_window(d, attempt);
    return static_cast<int>(rng.uniform_int(lo, hi));
}

std::string_view to_string(TxOutcome o) {
    switch (o) {
        case TxOutcome::delivered: return "delivered";
        case TxOutcome::collided: return "collided";
        case TxOutcome::cca_busy_abort: return "cca-busy-abort";
        case TxOutcome::retry_exhausted: return "retry-exhausted";
    }
    return "?";
}

Mac::Mac(NodeId self, Scheduler& scheduler, Medium& medium, MacDiscipline discipline, std::size_t queue_capacity,
         RngStream rng, MacUser& user)
    : self_(self),
      scheduler_(scheduler),
      medium_(medium),
      discipline_(discipline),
      capacity_(queue_capacity),
      rng_(std::move(rng)),
      user_(user) {
    medium_.attach(self_, this);
}

bool Mac::enqueue(NetPacket packet, NodeId next_hop) {
    if (queue_.size() >= capacity_) {
        ++stats_.queue_drops;
        return false;
    }
    const int prio = packet.priority;
    auto pos = std::find_if(queue_.begin(), queue_.end(), [prio](const Pending& p) { return p.packet.priority < prio; });
    queue_.insert(pos, Pending{std::move(packet), next_hop});
    if (!current_ && state_ == State::idle) start_next();
    return true;
}

double Mac::control_airtime() const { return airtime(0, medium_.profile()); }

double Mac::data_airtime() const { return airtime(current_->packet.wire_bytes(), medium_.profile()); }

bool Mac::virtually_busy() const { return discipline_.kind == MacKind::dcf && scheduler_.now() < nav_until_; }

void Mac::cancel_timer() {
    if (timer_.valid()) scheduler_.cancel(timer_);
    timer_ = {};
}

void Mac::start_next() {
    if (queue_.empty()) {
        state_ = State::idle;
        return;
    }
    current_ = std::move(queue_.front());
    queue_.pop_front();
    attempt_ = 1;
    current_seq_ = next_seq_++;
    begin_attempt();
}

void Mac::begin_attempt() {
    rounds_ = 0;
    if (discipline_.kind == MacKind::z154) {
        z154_backoff();
        return;
    }
    counter_ = draw_backoff(discipline_, attempt_, rng_);
    resume_countdown();
}

void Mac::resume_countdown() {
    cancel_timer();
    if (medium_.transmitting(self_) || medium_.channel_busy(self_)) {
        state_ = State::frozen;
        return;
    }
    if (virtually_busy()) {
        state_ = State::frozen;
        if (nav_timer_.valid()) scheduler_.cancel(nav_timer_);
        nav_timer_ = scheduler_.schedule(nav_until_, self_, "mac-nav-end", [this] {
            nav_timer_ = {};
            if (state_ == State::frozen) resume_countdown();
        });
        return;
    }
    state_ = State::counting;
    countdown_start_ = scheduler_.now();
    timer_ = scheduler_.schedule_in(discipline_.difs + counter_ * discipline_.slot, self_, "mac-backoff-done", [this] {
        timer_ = {};
        countdown_done();
    });
}

void Mac::freeze() {
    cancel_timer();
    const double elapsed = scheduler_.now() - countdown_start_ - discipline_.difs;
    if (elapsed > 0.0) {
        const int consumed = static_cast<int>(std::floor(elapsed / discipline_.slot + 1e-9));
        counter_ = std::max(0, counter_ - consumed);
    }
    state_ = State::frozen;
}

void Mac::on_channel_busy() {
    if (state_ != State::counting) return;
    freeze();
    if (discipline_.kind == MacKind::ban156 && ++rounds_ > discipline_.max_backoff_rounds) attempt_failed();
}

void Mac::on_channel_idle() {
    if (state_ == State::frozen) resume_countdown();
}

void Mac::countdown_done() {
    const bool unicast = current_->next_hop != kBroadcast;
    if (discipline_.rts_cts && unicast) {
        send_rts();
    } else {
        send_data();
    }
}

void Mac::z154_backoff() {
    state_ = State::cca_wait;
    const int slots = draw_backoff(discipline_, rounds_ + 1, rng_);
    timer_ = scheduler_.schedule_in(slots * discipline_.slot, self_, "mac-backoff-done", [this] {
        cca_start_ = scheduler_.now();
        timer_ = scheduler_.schedule_in(discipline_.cca_duration, self_, "mac-cca", [this] {
            timer_ = {};
            z154_cca();
        });
    });
}

void Mac::z154_cca() {
    if (!medium_.transmitting(self_) && medium_.idle_since(self_, cca_start_)) {
        send_data();
        return;
    }
    if (++rounds_ >= discipline_.max_backoff_rounds) {
        ++stats_.cca_aborts;
        fail(TxOutcome::cca_busy_abort);
        return;
    }
    z154_backoff();
}

void Mac::send_rts() {
    const double now = scheduler_.now();
    const double ctl = control_airtime();
    Frame f;
    f.type = FrameType::rts;
    f.dst = current_->next_hop;
    f.seq = current_seq_;
    f.duration = ctl;
    f.nav_until = now + 3.0 * ctl + data_airtime() + 3.0 * discipline_.sifs;
    state_ = State::tx_rts;
    ++stats_.control_frames;
    medium_.transmit(self_, std::move(f));
}

void Mac::send_data() {
    if (medium_.transmitting(self_)) {
        attempt_failed();
        return;
    }
    const double now = scheduler_.now();
    Frame f;
    f.type = FrameType::data;
    f.dst = current_->next_hop;
    f.seq = current_seq_;
    f.payload_bytes = current_->packet.wire_bytes();
    f.duration = data_airtime();
    const bool expects_ack = discipline_.ack && f.dst != kBroadcast;
    f.nav_until = now + f.duration + (expects_ack ? discipline_.sifs + control_airtime() : 0.0);
    f.packet = std::make_shared<const NetPacket>(current_->packet);
    state_ = State::tx_data;
    ++stats_.data_frames;
    medium_.transmit(self_, std::move(f));
}

void Mac::send_response(FrameType type, NodeId to, double nav_until) {
    if (medium_.transmitting(self_)) return;
    if (state_ == State::counting) freeze();
    Frame f;
    f.type = type;
    f.dst = to;
    f.seq = 0;
    f.duration = control_airtime();
    f.nav_until = nav_until;
    ++stats_.control_frames;
    medium_.transmit(self_, std::move(f));
}

void Mac::on_tx_end(const Frame& frame) {
    switch (frame.type) {
        case FrameType::rts:
            state_ = State::wait_cts;
            timer_ = scheduler_.schedule_in(discipline_.sifs + control_airtime() + 2.0 * discipline_.slot, self_,
                                            "mac-cts-timeout", [this] {
                                                timer_ = {};
                                                attempt_failed();
                                            });
            break;
        case FrameType::data:
            if (frame.dst != kBroadcast && discipline_.ack) {
                state_ = State::wait_ack;
                timer_ = scheduler_.schedule_in(discipline_.sifs + control_airtime() + 2.0 * discipline_.slot, self_,
                                                "mac-ack-timeout", [this] {
                                                    timer_ = {};
                                                    attempt_failed();
                                                });
            } else {
                complete(false);
            }
            break;
        case FrameType::cts:
        case FrameType::ack:
            if (state_ == State::frozen) resume_countdown();
            break;
    }
}

void Mac::on_frame_received(const Frame& frame) {
    if (frame.dst != self_ && frame.dst != kBroadcast) {
        if (discipline_.kind == MacKind::dcf) nav_until_ = std::max(nav_until_, frame.nav_until);
        return;
    }
    const NodeId from = frame.src;
    switch (frame.type) {
        case FrameType::rts:
            if (!virtually_busy()) {
                const double nav = frame.nav_until;
                scheduler_.schedule_in(discipline_.sifs, self_, "mac-send-cts",
                                       [this, from, nav] { send_response(FrameType::cts, from, nav); });
            }
            break;
        case FrameType::cts:
            if (state_ == State::wait_cts && current_ && current_->next_hop == from) {
                cancel_timer();
                state_ = State::tx_data;
                timer_ = scheduler_.schedule_in(discipline_.sifs, self_, "mac-send-data", [this] {
                    timer_ = {};
                    send_data();
                });
            }
            break;
        case FrameType::ack:
            if (state_ == State::wait_ack && current_ && current_->next_hop == from) {
                cancel_timer();
                complete(true);
            }
            break;
        case FrameType::data: {
            if (frame.dst == self_ && discipline_.ack) {
                scheduler_.schedule_in(discipline_.sifs, self_, "mac-send-ack",
                                       [this, from] { send_response(FrameType::ack, from, 0.0); });
                auto [it, inserted] = last_seq_from_.try_emplace(from, frame.seq);
                if (!inserted) {
                    if (it->second == frame.seq) return;  // retransmission of a frame already passed up
                    it->second = frame.seq;
                }
            }
            user_.on_mac_receive(*frame.packet, from);
            break;
        }
    }
}

void Mac::attempt_failed() {
    cancel_timer();
    if (!current_) return;
    if (current_->next_hop == kBroadcast) {
        ++stats_.cca_aborts;
        fail(TxOutcome::cca_busy_abort);
        return;
    }
    ++attempt_;
    if (attempt_ > discipline_.max_attempts()) {
        fail(TxOutcome::retry_exhausted);
        return;
    }
    ++stats_.retries;
    begin_attempt();
}

void Mac::complete(bool confirmed) {
    Pending p = std::move(*current_);
    current_.reset();
    state_ = State::idle;
    user_.on_mac_sent(p.packet, p.next_hop, confirmed);
    if (!current_ && state_ == State::idle) start_next();
}

void Mac::fail(TxOutcome outcome) {
    Pending p = std::move(*current_);
    current_.reset();
    state_ = State::idle;
    ++stats_.failures;
    user_.on_mac_send_failed(std::move(p.packet), p.next_hop, outcome);
    if (!current_ && state_ == State::idle) start_next();
}

}  // namespace bbn
