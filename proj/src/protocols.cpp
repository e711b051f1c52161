#include "bbn/protocols.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>
#include <string>

#include "bbn/aodv.hpp"
#include "bbn/diffusion.hpp"
#include "bbn/gpsr.hpp"
#include "bbn/olsr.hpp"

namespace bbn {

std::string_view to_string(ProtocolKind p) {
    switch (p) {
        case ProtocolKind::olsrv2: return "OLSRv2";
        case ProtocolKind::aodvv2: return "AODVv2";
        case ProtocolKind::dd: return "DD";
        case ProtocolKind::gpsr: return "GPSR";
    }
    return "?";
}

ProtocolKind parse_protocol(std::string_view text) {
    auto lower = [](std::string_view s) {
        std::string out(s);
        std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
        return out;
    };
    const std::string t = lower(text);
    for (ProtocolKind p : kAllProtocols) {
        if (lower(to_string(p)) == t) return p;
    }
    throw std::invalid_argument("unknown protocol '" + std::string(text) + "'");
}

std::unique_ptr<RoutingProtocol> make_protocol(ProtocolKind kind, RoutingServices& node, const ProtocolParams& params) {
    switch (kind) {
        case ProtocolKind::olsrv2: return std::make_unique<olsr::Olsr>(node, params.olsr);
        case ProtocolKind::aodvv2: return std::make_unique<aodv::Aodv>(node, params.aodv);
        case ProtocolKind::dd: return std::make_unique<dd::Diffusion>(node, params.dd);
        case ProtocolKind::gpsr: return std::make_unique<gpsr::Gpsr>(node, params.gpsr);
    }
    throw std::invalid_argument("unknown protocol");
}

}  // namespace bbn
