#ifndef BBN_SCENARIO_HPP
#define BBN_SCENARIO_HPP

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bbn/mac.hpp"
#include "bbn/medium.hpp"
#include "bbn/mobility.hpp"
#include "bbn/phy.hpp"
#include "bbn/protocols.hpp"

namespace bbn {

struct ClassificationThresholds {
    double prr_high = 0.8;
    double prr_medium = 0.5;
};

/// Every input of a sweep: geometry, population, traffic and all model
/// constants.
struct Scenario {
    DisasterArea area;
    double horizon = 100.0;
    std::uint64_t seed = 1;
    int iterations = 10;
    std::vector<ProtocolKind> protocols{kAllProtocols.begin(), kAllProtocols.end()};
    std::vector<Tech> techs{kAllTechs.begin(), kAllTechs.end()};
    std::vector<std::uint32_t> payloads{2, 16, 64, 128, 256};
    double cbr_rate = 1.0;

    PropagationModel propagation;
    MediumParams medium;
    std::array<TechProfile, 3> profiles{default_profile(Tech::wifi), default_profile(Tech::wsn),
                                        default_profile(Tech::wban)};
    std::array<MacDiscipline, 3> macs{default_discipline(MacKind::dcf), default_discipline(MacKind::z154),
                                      default_discipline(MacKind::ban156)};
    std::size_t queue_capacity = 50;
    int ttl = 32;
    double battery_capacity_mj = 2.16e7;
    ProtocolParams protocol;
    ClassificationThresholds classification;

    const TechProfile& profile(Tech t) const { return profiles[static_cast<std::size_t>(t)]; }
    TechProfile& profile(Tech t) { return profiles[static_cast<std::size_t>(t)]; }
    const MacDiscipline& mac(MacKind k) const { return macs[static_cast<std::size_t>(k)]; }
    MacDiscipline& mac(MacKind k) { return macs[static_cast<std::size_t>(k)]; }
    std::size_t node_count() const { return 1 + static_cast<std::size_t>(area.mobile_nodes()); }
};

/// The built-in disaster-area scenario: a 400 m x 200 m shopping mall with
/// two incident sites, a casualty treatment area, a transport zone at the
/// gate and the command post holding the sink.
DisasterArea default_disaster_area();

Scenario default_scenario();

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses the sectioned `key = value` format. Unknown keys, malformed
/// values and violated invariants raise ConfigError naming the key path and
/// line.
Scenario parse_config(std::string_view text);
Scenario load_config(const std::string& path);

/// Checks cross-field invariants (payload limits, geometry); throws
/// ConfigError.
void validate(const Scenario& s);

/// Canonical text of the effective configuration; parses back to the same
/// scenario.
std::string dump_config(const Scenario& s);

/// FNV-1a 64 over the canonical dump, as 16 hex digits.
std::string config_hash(const Scenario& s);
std::uint64_t fnv1a64(std::string_view data);

}  // namespace bbn

#endif
