#ifndef BBN_PHY_HPP
#define BBN_PHY_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "bbn/geometry.hpp"

namespace bbn {

enum class Tech { wifi, wsn, wban };
enum class Modulation { bpsk, oqpsk, dqpsk };
enum class MacKind { dcf, z154, ban156 };

std::string_view to_string(Tech t);
std::string_view to_string(Modulation m);
std::string_view to_string(MacKind m);
Tech parse_tech(std::string_view text);

inline constexpr std::array<Tech, 3> kAllTechs{Tech::wifi, Tech::wsn, Tech::wban};

/// Radio parameter set of one wireless technology.
struct TechProfile {
    Tech tech = Tech::wifi;
    Modulation modulation = Modulation::bpsk;
    double sensitivity_dbm = -92.0;
    /// Carrier sense sits this far below sensitivity unless overridden.
    double carrier_sense_margin_db = 0.0;
    double tx_power_dbm = 0.0;
    double band_ghz = 2.4;
    double bit_rate = 1e6;  // bit/s
    double current_tx_ma = 160.0;
    double current_rx_ma = 53.0;
    double current_idle_ma = 0.69;
    MacKind mac = MacKind::dcf;
    std::size_t phy_overhead = 24;  // bytes
    std::size_t mac_overhead = 28;  // bytes
    std::optional<std::size_t> max_payload;  // bytes
};

/// Built-in profiles (radio constants per technology; rates and frame
/// overheads are model choices and may be overridden by configuration).
TechProfile default_profile(Tech tech);

struct PropagationModel {
    double reference_loss_db = 40.0;  // at 1 m
    double exponent = 3.0;
    double wall_loss_db = 5.0;
};

class PhyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Log-distance loss plus a fixed penalty per obstacle crossed.
/// Throws PhyError for co-located endpoints.
double path_loss(const PropagationModel& model, const Point& a, const Point& b, int crossings);

/// Same as path_loss for a known distance in meters.
double path_loss_at(const PropagationModel& model, double meters, int crossings);

struct LinkBudget {
    double path_loss_db = 0.0;
    double rx_power_dbm = 0.0;
    int crossings = 0;
};

LinkBudget link_budget(const PropagationModel& model, const TechProfile& profile, const Point& tx, const Point& rx,
                       std::span<const Polygon> obstacles);

inline double dbm_to_mw(double dbm) { return std::pow(10.0, dbm / 10.0); }
inline double mw_to_dbm(double mw) { return 10.0 * std::log10(mw); }

/// Power sum of the given levels, in dBm. -inf for an empty list.
double combine_dbm(std::span<const double> levels_dbm);

/// Threshold + capture reception decision.
bool receivable(const LinkBudget& budget, const TechProfile& profile, std::span<const double> interferers_dbm,
                double capture_threshold_db = 10.0);

/// Frame duration for a MAC payload of the given size; header-only frames
/// (ACK, RTS, CTS) use payload 0. Throws PhyError when the payload exceeds the
/// technology's limit.
double airtime(std::size_t payload_bytes, const TechProfile& profile);

/// Energy in mJ of holding a radio state for `seconds` at `current_ma`
/// from a 3 V supply.
double energy_packet(double seconds, double current_ma);

inline constexpr double kSupplyVolts = 3.0;

enum class RadioState { idle = 0, rx = 1, tx = 2 };

/// Per-node cumulative time and energy by radio state.
class EnergyLedger {
public:
    EnergyLedger(std::size_t nodes, const TechProfile& profile);

    /// Closes the interval since the node's last transition and enters `next`.
    void transition(std::size_t node, RadioState next, double now);
    /// Accrues every node up to `now` without changing states.
    void settle(double now);

    RadioState state(std::size_t node) const { return nodes_[node].state; }
    double time_in(std::size_t node, RadioState s) const { return nodes_[node].seconds[static_cast<int>(s)]; }
    double energy_in(std::size_t node, RadioState s) const { return nodes_[node].mj[static_cast<int>(s)]; }
    double node_energy(std::size_t node) const;
    double total_energy() const;
    std::size_t size() const { return nodes_.size(); }
    double current_for(RadioState s) const { return currents_[static_cast<int>(s)]; }

private:
    struct NodeAccount {
        RadioState state = RadioState::idle;
        double since = 0.0;
        std::array<double, 3> seconds{};
        std::array<double, 3> mj{};
    };
    std::vector<NodeAccount> nodes_;
    std::array<double, 3> currents_;
};

}  // namespace bbn

#endif
