#include "bbn/phy.hpp"

#include <limits>
#include <string>

namespace bbn {

std::string_view to_string(Tech t) {
    switch (t) {
        case Tech::wifi: return "WIFI";
        case Tech::wsn: return "WSN";
        case Tech::wban: return "WBAN";
    }
    return "?";
}

std::string_view to_string(Modulation m) {
    switch (m) {
        case Modulation::bpsk: return "BPSK";
        case Modulation::oqpsk: return "O-QPSK";
        case Modulation::dqpsk: return "DQPSK";
    }
    return "?";
}

std::string_view to_string(MacKind m) {
    switch (m) {
        case MacKind::dcf: return "DCF";
        case MacKind::z154: return "Z154";
        case MacKind::ban156: return "BAN156";
    }
    return "?";
}

Tech parse_tech(std::string_view text) {
    for (Tech t : kAllTechs) {
        if (to_string(t) == text) return t;
    }
    throw std::invalid_argument("unknown technology '" + std::string(text) + "'");
}

TechProfile default_profile(Tech tech) {
    TechProfile p;
    p.tech = tech;
    p.tx_power_dbm = 0.0;
    p.band_ghz = 2.4;
    switch (tech) {
        case Tech::wifi:
            p.modulation = Modulation::bpsk;
            p.sensitivity_dbm = -92.0;
            p.carrier_sense_margin_db = 8.0;
            p.bit_rate = 1.0e6;
            p.current_tx_ma = 160.0;
            p.current_rx_ma = 53.0;
            p.current_idle_ma = 0.69;
            p.mac = MacKind::dcf;
            p.phy_overhead = 24;
            p.mac_overhead = 28;
            break;
        case Tech::wsn:
            p.modulation = Modulation::oqpsk;
            p.sensitivity_dbm = -85.0;
            p.carrier_sense_margin_db = 5.0;
            p.bit_rate = 250.0e3;
            p.current_tx_ma = 17.4;
            p.current_rx_ma = 19.7;
            p.current_idle_ma = 0.9;
            p.mac = MacKind::z154;
            p.phy_overhead = 6;
            p.mac_overhead = 11;
            break;
        case Tech::wban:
            p.modulation = Modulation::dqpsk;
            p.sensitivity_dbm = -85.0;
            p.carrier_sense_margin_db = 5.0;
            p.bit_rate = 971.4e3;
            p.current_tx_ma = 17.4;
            p.current_rx_ma = 19.7;
            p.current_idle_ma = 0.9;
            p.mac = MacKind::ban156;
            p.phy_overhead = 5;
            p.mac_overhead = 9;
            p.max_payload = 256;
            break;
    }
    return p;
}

double path_loss_at(const PropagationModel& model, double meters, int crossings) {
    if (!(meters > 0.0)) throw PhyError("path loss undefined for co-located radios");
    return model.reference_loss_db + 10.0 * model.exponent * std::log10(meters) + model.wall_loss_db * crossings;
}

double path_loss(const PropagationModel& model, const Point& a, const Point& b, int crossings) {
    return path_loss_at(model, distance(a, b), crossings);
}

LinkBudget link_budget(const PropagationModel& model, const TechProfile& profile, const Point& tx, const Point& rx,
                       std::span<const Polygon> obstacles) {
    LinkBudget b;
    b.crossings = obstacle_crossings(tx, rx, obstacles);
    b.path_loss_db = path_loss(model, tx, rx, b.crossings);
    b.rx_power_dbm = profile.tx_power_dbm - b.path_loss_db;
    return b;
}

double combine_dbm(std::span<const double> levels_dbm) {
    if (levels_dbm.empty()) return -std::numeric_limits<double>::infinity();
    double mw = 0.0;
    for (double l : levels_dbm) mw += dbm_to_mw(l);
    return mw_to_dbm(mw);
}

bool receivable(const LinkBudget& budget, const TechProfile& profile, std::span<const double> interferers_dbm,
                double capture_threshold_db) {
    if (budget.rx_power_dbm < profile.sensitivity_dbm) return false;
    if (interferers_dbm.empty()) return true;
    return budget.rx_power_dbm - combine_dbm(interferers_dbm) >= capture_threshold_db;
}

double airtime(std::size_t payload_bytes, const TechProfile& profile) {
    if (profile.max_payload && payload_bytes > *profile.max_payload) {
        throw PhyError("payload exceeds standard limit (" + std::to_string(payload_bytes) + " > " +
                       std::to_string(*profile.max_payload) + " bytes for " + std::string(to_string(profile.tech)) + ")");
    }
    const double bits = 8.0 * static_cast<double>(payload_bytes + profile.mac_overhead + profile.phy_overhead);
    return bits / profile.bit_rate;
}

double energy_packet(double seconds, double current_ma) {
    // V * A * s = J; the mA -> A and J -> mJ factors cancel.
    return kSupplyVolts * current_ma * seconds;
}

EnergyLedger::EnergyLedger(std::size_t nodes, const TechProfile& profile)
    : nodes_(nodes), currents_{profile.current_idle_ma, profile.current_rx_ma, profile.current_tx_ma} {}

void EnergyLedger::transition(std::size_t node, RadioState next, double now) {
    auto& acc = nodes_[node];
    const double dt = now - acc.since;
    if (dt > 0.0) {
        const int s = static_cast<int>(acc.state);
        acc.seconds[s] += dt;
        acc.mj[s] += energy_packet(dt, currents_[s]);
    }
    acc.since = std::max(acc.since, now);
    acc.state = next;
}

void EnergyLedger::settle(double now) {
    for (std::size_t n = 0; n < nodes_.size(); ++n) transition(n, nodes_[n].state, now);
}

double EnergyLedger::node_energy(std::size_t node) const {
    const auto& acc = nodes_[node];
    return acc.mj[0] + acc.mj[1] + acc.mj[2];
}

double EnergyLedger::total_energy() const {
    double total = 0.0;
    for (std::size_t n = 0; n < nodes_.size(); ++n) total += node_energy(n);
    return total;
}

}  // namespace bbn
