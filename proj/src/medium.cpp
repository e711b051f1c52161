#include "bbn/medium.hpp"

#include <algorithm>
#include <cmath>

namespace bbn {

Medium::Medium(Scheduler& scheduler, const MobilityTrace& trace, std::vector<Polygon> obstacles,
               PropagationModel propagation, TechProfile profile, MediumParams params, EnergyLedger& energy)
    : scheduler_(scheduler),
      trace_(trace),
      obstacles_(std::move(obstacles)),
      propagation_(propagation),
      profile_(profile),
      params_(params),
      energy_(energy),
      radios_(trace.node_count()),
      capture_ratio_(dbm_to_mw(params.capture_threshold_db)),
      cs_mw_(dbm_to_mw(params.carrier_sense_dbm.value_or(profile.sensitivity_dbm - profile.carrier_sense_margin_db))) {
    // Beyond this distance even a wall-free link falls under the floor.
    const double budget = profile_.tx_power_dbm - params_.interference_floor_dbm - propagation_.reference_loss_db;
    max_range_m_ = std::pow(10.0, budget / (10.0 * propagation_.exponent));
    unit_gain_mw_ = dbm_to_mw(profile_.tx_power_dbm - propagation_.reference_loss_db);
    floor_mw_ = dbm_to_mw(params_.interference_floor_dbm);
    sensitivity_mw_ = dbm_to_mw(profile_.sensitivity_dbm);
    wall_factor_ = dbm_to_mw(-propagation_.wall_loss_db);
}

void Medium::attach(NodeId node, MediumListener* listener) { radios_.at(node).listener = listener; }

void Medium::refresh_positions() {
    const double now = scheduler_.now();
    if (now == positions_time_) return;
    positions_.resize(radios_.size());
    for (NodeId n = 0; n < radios_.size(); ++n) positions_[n] = trace_.position_at(n, now);
    positions_time_ = now;
}

void Medium::recompute_incoming(Radio& r) {
    double sum = 0.0;
    for (const auto& in : r.incoming) sum += in.mw;
    r.incoming_mw = sum;
}

void Medium::transmit(NodeId sender, Frame frame) {
    const double now = scheduler_.now();
    refresh_positions();
    const std::uint64_t id = next_tx_++;
    ++tx_count_;

    Radio& tx = radios_[sender];
    if (tx.transmitting) throw std::logic_error("radio already transmitting");
    if (tx.locked != 0) {
        // Half duplex: starting a transmission aborts the ongoing reception.
        tx.locked = 0;
        tx.locked_corrupt = false;
    }
    tx.transmitting = true;
    energy_.transition(sender, RadioState::tx, now);

    Transmission t;
    t.sender = sender;
    t.frame = std::move(frame);
    t.frame.src = sender;

    std::vector<NodeId> became_busy;
    const Point& from = positions_[sender];
    const double max_range_sq = max_range_m_ * max_range_m_;
    for (NodeId n = 0; n < radios_.size(); ++n) {
        if (n == sender) continue;
        const Point& to = positions_[n];
        const double d_sq = std::max(distance_sq(from, to), 1e-6);
        if (d_sq > max_range_sq) continue;
        // Received power in mW: P0 * d^-n, then one wall factor per crossing.
        double mw = unit_gain_mw_ * std::pow(d_sq, -0.5 * propagation_.exponent);
        if (mw < floor_mw_) continue;
        if (!obstacles_.empty()) {
            const int walls = obstacle_crossings(from, to, obstacles_);
            if (walls > 0) {
                mw *= std::pow(wall_factor_, walls);
                if (mw < floor_mw_) continue;
            }
        }
        Radio& r = radios_[n];
        r.incoming.push_back({id, mw});
        r.incoming_mw += mw;
        t.audience.push_back(n);

        if (!r.transmitting) {
            if (r.locked != 0) {
                const double others = r.incoming_mw - r.locked_mw;
                if (!r.locked_corrupt && others > 0.0 && r.locked_mw < capture_ratio_ * others) r.locked_corrupt = true;
            } else if (mw >= sensitivity_mw_) {
                r.locked = id;
                r.locked_mw = mw;
                const double others = r.incoming_mw - mw;
                r.locked_corrupt = others > 0.0 && mw < capture_ratio_ * others;
                energy_.transition(n, RadioState::rx, now);
            }
        }
        if (!r.busy && r.incoming_mw >= cs_mw_) {
            r.busy = true;
            became_busy.push_back(n);
        }
    }

    const double end = now + t.frame.duration;
    active_.emplace(id, std::move(t));
    scheduler_.schedule(end, sender, "phy-tx-end", [this, id] { finish(id); });

    for (NodeId n : became_busy) {
        if (radios_[n].listener != nullptr) radios_[n].listener->on_channel_busy();
    }
}

void Medium::finish(std::uint64_t id) {
    const double now = scheduler_.now();
    auto it = active_.find(id);
    Transmission t = std::move(it->second);
    active_.erase(it);

    std::vector<NodeId> received;
    std::vector<NodeId> became_idle;
    for (NodeId n : t.audience) {
        Radio& r = radios_[n];
        auto pos = std::find_if(r.incoming.begin(), r.incoming.end(), [id](const Incoming& in) { return in.tx == id; });
        if (pos != r.incoming.end()) r.incoming.erase(pos);
        recompute_incoming(r);
        if (r.locked == id) {
            if (r.locked_corrupt) {
                ++corrupted_count_;
            } else {
                received.push_back(n);
            }
            r.locked = 0;
            r.locked_corrupt = false;
            if (!r.transmitting) energy_.transition(n, RadioState::idle, now);
        }
        if (r.busy && r.incoming_mw < cs_mw_) {
            r.busy = false;
            r.idle_since = now;
            became_idle.push_back(n);
        }
    }

    Radio& tx = radios_[t.sender];
    tx.transmitting = false;
    energy_.transition(t.sender, RadioState::idle, now);

    // Receivers first so that custody passes before the sender lets go.
    for (NodeId n : received) {
        if (radios_[n].listener != nullptr) radios_[n].listener->on_frame_received(t.frame);
    }
    if (tx.listener != nullptr) tx.listener->on_tx_end(t.frame);
    for (NodeId n : became_idle) {
        if (radios_[n].listener != nullptr && !radios_[n].busy) radios_[n].listener->on_channel_idle();
    }
}

}  // namespace bbn
