#ifndef BBN_PROTOCOLS_HPP
#define BBN_PROTOCOLS_HPP

#include <array>
#include <memory>
#include <string_view>

#include "bbn/routing.hpp"

namespace bbn {

enum class ProtocolKind { olsrv2, aodvv2, dd, gpsr };

inline constexpr std::array<ProtocolKind, 4> kAllProtocols{ProtocolKind::olsrv2, ProtocolKind::aodvv2,
                                                           ProtocolKind::dd, ProtocolKind::gpsr};

std::string_view to_string(ProtocolKind p);
/// Accepts the display names (OLSRv2, AODVv2, DD, GPSR), case-insensitive.
ProtocolKind parse_protocol(std::string_view text);

struct OlsrParams {
    double hello_interval = 2.0;
    double tc_interval = 5.0;
    double hold_factor = 3.0;
    double max_jitter = 0.25;  ///< fraction of the interval removed at random
    double forward_jitter = 0.05;
};

struct AodvParams {
    double route_lifetime = 5.0;
    double reverse_lifetime = 2.0;
    double rreq_window = 3.0;
    double buffer_time = 2.0;
    std::size_t buffer_capacity = 50;
    int rreq_retries = 3;
    double rreq_wait = 1.0;
    double forward_jitter = 0.01;
    bool energy_aware = true;
};

struct DiffusionParams {
    double interest_interval = 10.0;
    double gradient_lifetime = 30.0;
    double exploratory_rate = 0.2;  // packets/s
    double data_rate = 1.0;         // packets/s
    double reinforcement_lifetime = 20.0;
    double forward_jitter = 0.01;
    std::size_t buffer_capacity = 50;
};

struct GpsrParams {
    double beacon_interval = 1.0;
    double expiry_factor = 3.0;
    std::uint32_t beacon_bytes = 8;
    std::uint32_t header_bytes = 0;
    double position_noise = 0.0;  ///< standard deviation of advertised positions, m
};

struct ProtocolParams {
    OlsrParams olsr;
    AodvParams aodv;
    DiffusionParams dd;
    GpsrParams gpsr;
};

std::unique_ptr<RoutingProtocol> make_protocol(ProtocolKind kind, RoutingServices& node, const ProtocolParams& params);

}  // namespace bbn

#endif
