#include <gtest/gtest.h>

#include "bbn/scenario.hpp"

namespace bbn {
namespace {

std::string error_of(std::string_view text) {
    try {
        parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return "";
}

TEST(Config, EmptyFileGivesDefaults) {
    const Scenario s = parse_config("");
    EXPECT_EQ(s.node_count(), 100u);
    EXPECT_EQ(s.horizon, 100.0);
    EXPECT_EQ(s.iterations, 10);
    EXPECT_EQ(s.payloads, (std::vector<std::uint32_t>{2, 16, 64, 128, 256}));
    EXPECT_EQ(s.protocols.size(), 4u);
    EXPECT_EQ(s.techs.size(), 3u);
    EXPECT_EQ(s.cbr_rate, 1.0);
    EXPECT_EQ(dump_config(s), dump_config(default_scenario()));
}

TEST(Config, PayloadListAccepted) {
    const Scenario s = parse_config("[run]\npayloads = [2,16,64,128,256]\n");
    EXPECT_EQ(s.payloads, (std::vector<std::uint32_t>{2, 16, 64, 128, 256}));
}

TEST(Config, WbanPayloadLimitIsEnforced) {
    const auto msg = error_of("[run]\ntechs = [WBAN]\npayloads = [512]\n");
    EXPECT_NE(msg.find("run.payloads"), std::string::npos) << msg;
    EXPECT_NE(msg.find("256"), std::string::npos) << msg;
    EXPECT_NO_THROW(parse_config("[run]\ntechs = [WIFI]\npayloads = [512]\n"));
}

TEST(Config, UnknownKeyNamesLineAndPath) {
    const auto msg = error_of("[run]\nhorizon = 50\n\n[olsrv2]\nhello_intervall = 2\n");
    EXPECT_NE(msg.find("line 5"), std::string::npos) << msg;
    EXPECT_NE(msg.find("olsrv2.hello_intervall"), std::string::npos) << msg;
    EXPECT_NE(msg.find("unknown key"), std::string::npos) << msg;
}

TEST(Config, TypeMismatchNamesKey) {
    const auto msg = error_of("[run]\nhorizon = soon\n");
    EXPECT_NE(msg.find("line 2"), std::string::npos) << msg;
    EXPECT_NE(msg.find("run.horizon"), std::string::npos) << msg;
    EXPECT_FALSE(error_of("[run]\niterations = 0\n").empty());
    EXPECT_FALSE(error_of("[run]\nprotocols = [BATMAN]\n").empty());
    EXPECT_FALSE(error_of("[classification]\nprr_high = 0.4\nprr_medium = 0.6\n").empty());
    EXPECT_FALSE(error_of("run]\n").empty());
    EXPECT_FALSE(error_of("[run]\nhorizon\n").empty());
}

TEST(Config, OverridesReachTheScenario) {
    const Scenario s = parse_config(R"([run]
horizon = 30
seed = 9
protocols = [GPSR, dd]
techs = [WSN]

[tech.WSN]
sensitivity_dbm = -80

[olsrv2]
hello_interval = 1.5

[radio]
carrier_sense_dbm = -95
)");
    EXPECT_EQ(s.horizon, 30.0);
    EXPECT_EQ(s.seed, 9u);
    EXPECT_EQ(s.protocols, (std::vector<ProtocolKind>{ProtocolKind::gpsr, ProtocolKind::dd}));
    EXPECT_EQ(s.techs, (std::vector<Tech>{Tech::wsn}));
    EXPECT_EQ(s.profile(Tech::wsn).sensitivity_dbm, -80.0);
    EXPECT_EQ(s.protocol.olsr.hello_interval, 1.5);
    EXPECT_EQ(s.medium.carrier_sense_dbm, -95.0);
}

TEST(Config, DumpParsesBackToSameScenario) {
    Scenario s = default_scenario();
    s.horizon = 42.5;
    s.payloads = {8, 99};
    s.protocol.aodv.energy_aware = false;
    s.profile(Tech::wban).tx_power_dbm = -3.0;
    const auto text = dump_config(s);
    const Scenario back = parse_config(text);
    EXPECT_EQ(dump_config(back), text);
    EXPECT_EQ(config_hash(back), config_hash(s));
    EXPECT_NE(config_hash(back), config_hash(default_scenario()));
}

TEST(Config, HashIgnoresKeyOrder) {
    const Scenario a = parse_config("[run]\nhorizon = 30\nseed = 4\n[olsrv2]\ntc_interval = 4\n");
    const Scenario b = parse_config("[olsrv2]\ntc_interval = 4\n[run]\nseed = 4\nhorizon = 30\n");
    EXPECT_EQ(config_hash(a), config_hash(b));
    EXPECT_EQ(config_hash(a).size(), 16u);
    EXPECT_EQ(config_hash(a), config_hash(a));
}

TEST(Config, Fnv1aReferenceValues) {
    EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ull);
    EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cull);
}

TEST(Config, GeometryIsValidated) {
    Scenario s = default_scenario();
    EXPECT_NO_THROW(validate(s));
    s.area.groups.front().home_area = "nowhere";
    EXPECT_THROW(validate(s), ConfigError);
}

TEST(Config, ShippedDefaultConfigMatchesBuiltIns) {
    const Scenario s = load_config(std::string(BBN_SOURCE_DIR) + "/configs/default.ini");
    EXPECT_EQ(config_hash(s), config_hash(default_scenario()));
}

TEST(Config, DefaultAreaHasEveryZoneKind) {
    const auto area = default_disaster_area();
    for (auto kind : {AreaKind::incident_site, AreaKind::casualties_treatment, AreaKind::transport_zone,
                      AreaKind::command_center}) {
        EXPECT_NE(area.first_of_kind(kind), nullptr);
    }
    EXPECT_EQ(area.mobile_nodes(), 99);
    for (const auto& o : area.obstacles) EXPECT_FALSE(o.contains(area.sink));
}

}  // namespace
}  // namespace bbn
