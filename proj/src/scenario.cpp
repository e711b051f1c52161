#include "bbn/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

namespace bbn {

namespace {

Polygon rect(double x0, double y0, double x1, double y1) { return Polygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}}); }

}  // namespace

DisasterArea default_disaster_area() {
    DisasterArea a;
    a.width = 400.0;
    a.height = 200.0;
    a.sink = {200.0, 4.0};
    a.obstacle_margin = 0.5;
    a.areas = {
        {"incident-west", AreaKind::incident_site, rect(90.0, 100.0, 190.0, 150.0), 0},
        {"incident-east", AreaKind::incident_site, rect(210.0, 100.0, 310.0, 150.0), 0},
        {"treatment", AreaKind::casualties_treatment, rect(110.0, 55.0, 290.0, 97.0), 0},
        {"transport", AreaKind::transport_zone, rect(140.0, 14.0, 260.0, 40.0), 0},
        {"command", AreaKind::command_center, rect(185.0, 1.0, 215.0, 12.0), 0},
    };
    a.obstacles = {
        rect(190.0, 105.0, 210.0, 145.0),
        rect(20.0, 45.0, 100.0, 95.0),
        rect(300.0, 45.0, 380.0, 95.0),
    };
    a.groups = {
        {"fire-west", 25, "incident-west", 0.5, 1.5, 0.0, 20.0, 0.0},
        {"fire-east", 25, "incident-east", 0.5, 1.5, 0.0, 20.0, 0.0},
        {"medics", 30, "treatment", 0.5, 2.0, 0.0, 10.0, 0.3},
        {"transport", 12, "transport", 0.5, 2.0, 0.0, 10.0, 0.0},
        {"command", 7, "command", 0.3, 1.0, 0.0, 30.0, 0.0},
    };
    return a;
}

Scenario default_scenario() {
    Scenario s;
    s.area = default_disaster_area();
    return s;
}

std::uint64_t fnv1a64(std::string_view data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

std::string config_hash(const Scenario& s) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a64(dump_config(s))));
    return buf;
}

namespace {

// ---- value syntax -------------------------------------------------------

struct Value {
    std::string raw;
    bool is_array = false;
    std::vector<std::string> items;
    int line = 0;
};

std::string trim(std::string_view s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && s.front() == '"' && s.back() == '"') return s.substr(1, s.size() - 2);
    return s;
}

std::string fmt(double v) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

template <class T>
std::string fmt_int(T v) {
    return std::to_string(v);
}

std::string fmt_bool(bool b) { return b ? "true" : "false"; }

class Binder {
public:
    [[noreturn]] static void fail(const std::string& path, int line, const std::string& msg) {
        throw ConfigError("config line " + std::to_string(line) + ": key '" + path + "': " + msg);
    }

    static double number(const std::string& path, const Value& v, const std::string& text) {
        double out = 0.0;
        const std::string t = trim(text);
        auto r = std::from_chars(t.data(), t.data() + t.size(), out);
        if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size() || !std::isfinite(out)) {
            fail(path, v.line, "expected a number, got '" + t + "'");
        }
        return out;
    }
    static double number(const std::string& path, const Value& v) {
        if (v.is_array) fail(path, v.line, "expected a number, got an array");
        return number(path, v, v.raw);
    }
    static long long integer(const std::string& path, const Value& v, long long lo, long long hi) {
        if (v.is_array) fail(path, v.line, "expected an integer, got an array");
        long long out = 0;
        const std::string t = trim(v.raw);
        auto r = std::from_chars(t.data(), t.data() + t.size(), out);
        if (t.empty() || r.ec != std::errc() || r.ptr != t.data() + t.size()) {
            fail(path, v.line, "expected an integer, got '" + t + "'");
        }
        if (out < lo || out > hi) fail(path, v.line, "value " + t + " out of range");
        return out;
    }
    static bool boolean(const std::string& path, const Value& v) {
        const std::string t = trim(v.raw);
        if (t == "true") return true;
        if (t == "false") return false;
        fail(path, v.line, "expected true or false, got '" + t + "'");
    }
    static std::vector<double> numbers(const std::string& path, const Value& v) {
        std::vector<double> out;
        if (!v.is_array) {
            out.push_back(number(path, v));
            return out;
        }
        for (const auto& it : v.items) out.push_back(number(path, v, it));
        return out;
    }
    static std::vector<std::string> strings(const Value& v) {
        if (!v.is_array) return {unquote(trim(v.raw))};
        std::vector<std::string> out;
        for (const auto& it : v.items) out.push_back(unquote(trim(it)));
        return out;
    }
};

struct Field {
    std::function<std::string()> dump;
    std::function<void(const std::string& path, const Value&)> set;
};

using FieldTable = std::vector<std::pair<std::string, Field>>;  // "section.key" -> field

void add_double(FieldTable& t, const std::string& path, double& ref, double lo = -1e300, double hi = 1e300) {
    t.push_back({path, Field{[&ref] { return fmt(ref); },
                             [&ref, lo, hi](const std::string& p, const Value& v) {
                                 const double x = Binder::number(p, v);
                                 if (x < lo || x > hi) Binder::fail(p, v.line, "value " + trim(v.raw) + " out of range");
                                 ref = x;
                             }}});
}

template <class T>
void add_int(FieldTable& t, const std::string& path, T& ref, long long lo, long long hi) {
    t.push_back({path, Field{[&ref] { return fmt_int(ref); },
                             [&ref, lo, hi](const std::string& p, const Value& v) {
                                 ref = static_cast<T>(Binder::integer(p, v, lo, hi));
                             }}});
}

void add_bool(FieldTable& t, const std::string& path, bool& ref) {
    t.push_back({path, Field{[&ref] { return fmt_bool(ref); },
                             [&ref](const std::string& p, const Value& v) { ref = Binder::boolean(p, v); }}});
}

std::string join(const std::vector<std::string>& items) {
    std::string out = "[";
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ", ";
        out += items[i];
    }
    return out + "]";
}

std::string section_of_mac(MacKind k) { return "mac." + std::string(to_string(k)); }
std::string section_of_tech(Tech t) { return "tech." + std::string(to_string(t)); }

FieldTable fields(Scenario& s) {
    FieldTable t;
    constexpr double kPos = 1e-12;
    add_double(t, "run.horizon", s.horizon, kPos);
    add_int(t, "run.seed", s.seed, 0, std::numeric_limits<long long>::max());
    add_int(t, "run.iterations", s.iterations, 1, 100000);
    t.push_back({"run.protocols",
                 Field{[&s] {
                           std::vector<std::string> v;
                           for (auto p : s.protocols) v.emplace_back(to_string(p));
                           return join(v);
                       },
                       [&s](const std::string& p, const Value& v) {
                           s.protocols.clear();
                           for (const auto& name : Binder::strings(v)) {
                               try {
                                   s.protocols.push_back(parse_protocol(name));
                               } catch (const std::invalid_argument& e) {
                                   Binder::fail(p, v.line, e.what());
                               }
                           }
                           if (s.protocols.empty()) Binder::fail(p, v.line, "list must not be empty");
                       }}});
    t.push_back({"run.techs",
                 Field{[&s] {
                           std::vector<std::string> v;
                           for (auto x : s.techs) v.emplace_back(to_string(x));
                           return join(v);
                       },
                       [&s](const std::string& p, const Value& v) {
                           s.techs.clear();
                           for (const auto& name : Binder::strings(v)) {
                               std::string up = name;
                               std::transform(up.begin(), up.end(), up.begin(),
                                              [](unsigned char c) { return std::toupper(c); });
                               try {
                                   s.techs.push_back(parse_tech(up));
                               } catch (const std::invalid_argument& e) {
                                   Binder::fail(p, v.line, e.what());
                               }
                           }
                           if (s.techs.empty()) Binder::fail(p, v.line, "list must not be empty");
                       }}});
    t.push_back({"run.payloads",
                 Field{[&s] {
                           std::vector<std::string> v;
                           for (auto x : s.payloads) v.push_back(std::to_string(x));
                           return join(v);
                       },
                       [&s](const std::string& p, const Value& v) {
                           s.payloads.clear();
                           for (double x : Binder::numbers(p, v)) {
                               if (x < 1 || x > 65535 || x != std::floor(x)) {
                                   Binder::fail(p, v.line, "payload must be a positive integer byte count");
                               }
                               s.payloads.push_back(static_cast<std::uint32_t>(x));
                           }
                           if (s.payloads.empty()) Binder::fail(p, v.line, "list must not be empty");
                       }}});
    add_double(t, "run.rate", s.cbr_rate, kPos);

    add_double(t, "area.width", s.area.width, kPos);
    add_double(t, "area.height", s.area.height, kPos);
    t.push_back({"area.sink", Field{[&s] { return join({fmt(s.area.sink.x), fmt(s.area.sink.y)}); },
                                    [&s](const std::string& p, const Value& v) {
                                        auto xs = Binder::numbers(p, v);
                                        if (xs.size() != 2) Binder::fail(p, v.line, "expected [x, y]");
                                        s.area.sink = {xs[0], xs[1]};
                                    }}});
    add_double(t, "area.obstacle_margin", s.area.obstacle_margin, 0.0);

    add_double(t, "propagation.reference_loss_db", s.propagation.reference_loss_db);
    add_double(t, "propagation.exponent", s.propagation.exponent, kPos);
    add_double(t, "propagation.wall_loss_db", s.propagation.wall_loss_db, 0.0);

    add_double(t, "radio.capture_threshold_db", s.medium.capture_threshold_db);
    add_double(t, "radio.interference_floor_dbm", s.medium.interference_floor_dbm);
    t.push_back({"radio.carrier_sense_dbm",
                 Field{[&s] { return s.medium.carrier_sense_dbm ? fmt(*s.medium.carrier_sense_dbm) : std::string("auto"); },
                       [&s](const std::string& p, const Value& v) {
                           if (trim(v.raw) == "auto") {
                               s.medium.carrier_sense_dbm.reset();
                           } else {
                               s.medium.carrier_sense_dbm = Binder::number(p, v);
                           }
                       }}});

    for (Tech tech : kAllTechs) {
        auto& pr = s.profile(tech);
        const std::string sec = section_of_tech(tech) + ".";
        add_double(t, sec + "sensitivity_dbm", pr.sensitivity_dbm);
        add_double(t, sec + "carrier_sense_margin_db", pr.carrier_sense_margin_db, 0.0);
        add_double(t, sec + "tx_power_dbm", pr.tx_power_dbm);
        add_double(t, sec + "bit_rate", pr.bit_rate, kPos);
        add_double(t, sec + "current_tx_ma", pr.current_tx_ma, 0.0);
        add_double(t, sec + "current_rx_ma", pr.current_rx_ma, 0.0);
        add_double(t, sec + "current_idle_ma", pr.current_idle_ma, 0.0);
        add_int(t, sec + "phy_overhead", pr.phy_overhead, 0, 1 << 16);
        add_int(t, sec + "mac_overhead", pr.mac_overhead, 0, 1 << 16);
        t.push_back({sec + "max_payload",
                     Field{[&pr] { return std::to_string(pr.max_payload.value_or(0)); },
                           [&pr](const std::string& p, const Value& v) {
                               const auto n = Binder::integer(p, v, 0, 1 << 20);
                               pr.max_payload = n == 0 ? std::nullopt : std::optional<std::size_t>(n);
                           }}});
    }

    for (MacKind kind : {MacKind::dcf, MacKind::z154, MacKind::ban156}) {
        auto& m = s.mac(kind);
        const std::string sec = section_of_mac(kind) + ".";
        add_bool(t, sec + "ack", m.ack);
        add_bool(t, sec + "rts_cts", m.rts_cts);
        add_int(t, sec + "retransmit_limit", m.retransmit_limit, 0, 64);
        add_int(t, sec + "cw_min", m.cw_min, 0, 1 << 16);
        add_int(t, sec + "cw_max", m.cw_max, 0, 1 << 16);
        add_int(t, sec + "min_be", m.min_be, 0, 20);
        add_int(t, sec + "max_be", m.max_be, 0, 20);
        add_int(t, sec + "max_backoff_rounds", m.max_backoff_rounds, 1, 1000);
        add_double(t, sec + "slot", m.slot, kPos);
        add_double(t, sec + "sifs", m.sifs, 0.0);
        add_double(t, sec + "difs", m.difs, 0.0);
        add_double(t, sec + "cca_duration", m.cca_duration, 0.0);
    }

    add_int(t, "network.queue_capacity", s.queue_capacity, 1, 1 << 20);
    add_int(t, "network.ttl", s.ttl, 1, 255);
    add_double(t, "network.battery_capacity_mj", s.battery_capacity_mj, kPos);

    auto& o = s.protocol.olsr;
    add_double(t, "olsrv2.hello_interval", o.hello_interval, kPos);
    add_double(t, "olsrv2.tc_interval", o.tc_interval, kPos);
    add_double(t, "olsrv2.hold_factor", o.hold_factor, kPos);
    add_double(t, "olsrv2.max_jitter", o.max_jitter, 0.0, 0.99);
    add_double(t, "olsrv2.forward_jitter", o.forward_jitter, 0.0);

    auto& a = s.protocol.aodv;
    add_double(t, "aodvv2.route_lifetime", a.route_lifetime, kPos);
    add_double(t, "aodvv2.reverse_lifetime", a.reverse_lifetime, kPos);
    add_double(t, "aodvv2.rreq_window", a.rreq_window, kPos);
    add_double(t, "aodvv2.buffer_time", a.buffer_time, kPos);
    add_int(t, "aodvv2.buffer_capacity", a.buffer_capacity, 1, 1 << 20);
    add_int(t, "aodvv2.rreq_retries", a.rreq_retries, 0, 100);
    add_double(t, "aodvv2.rreq_wait", a.rreq_wait, kPos);
    add_double(t, "aodvv2.forward_jitter", a.forward_jitter, 0.0);
    add_bool(t, "aodvv2.energy_aware", a.energy_aware);

    auto& d = s.protocol.dd;
    add_double(t, "dd.interest_interval", d.interest_interval, kPos);
    add_double(t, "dd.gradient_lifetime", d.gradient_lifetime, kPos);
    add_double(t, "dd.exploratory_rate", d.exploratory_rate, kPos);
    add_double(t, "dd.data_rate", d.data_rate, kPos);
    add_double(t, "dd.reinforcement_lifetime", d.reinforcement_lifetime, kPos);
    add_double(t, "dd.forward_jitter", d.forward_jitter, 0.0);
    add_int(t, "dd.buffer_capacity", d.buffer_capacity, 1, 1 << 20);

    auto& g = s.protocol.gpsr;
    add_double(t, "gpsr.beacon_interval", g.beacon_interval, kPos);
    add_double(t, "gpsr.expiry_factor", g.expiry_factor, kPos);
    add_int(t, "gpsr.beacon_bytes", g.beacon_bytes, 0, 1 << 16);
    add_int(t, "gpsr.header_bytes", g.header_bytes, 0, 1 << 16);
    add_double(t, "gpsr.position_noise", g.position_noise, 0.0);

    add_double(t, "classification.prr_high", s.classification.prr_high, 0.0, 1.0);
    add_double(t, "classification.prr_medium", s.classification.prr_medium, 0.0, 1.0);
    return t;
}

const std::map<std::string, std::string>& aliases() {
    static const std::map<std::string, std::string> m{
        {"run.tech", "run.techs"},
        {"run.protocol", "run.protocols"},
        {"run.payload", "run.payloads"},
    };
    return m;
}

struct Entry {
    std::string section;
    std::string key;
    Value value;
};

/// Splits an array body on commas at the top level.
std::vector<std::string> split_items(const std::string& body) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : body) {
        if (c == ',') {
            out.push_back(trim(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!trim(cur).empty() || !out.empty()) out.push_back(trim(cur));
    return out;
}

std::vector<Entry> tokenize(std::string_view text) {
    std::vector<Entry> out;
    std::string section = "run";
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']' || t.size() < 3) {
                throw ConfigError("config line " + std::to_string(lineno) + ": malformed section header '" + t + "'");
            }
            section = trim(t.substr(1, t.size() - 2));
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(lineno) + ": expected 'key = value', got '" + t + "'");
        }
        Entry e;
        e.section = section;
        e.key = trim(t.substr(0, eq));
        e.value.line = lineno;
        e.value.raw = trim(t.substr(eq + 1));
        if (e.key.empty()) throw ConfigError("config line " + std::to_string(lineno) + ": missing key");
        if (!e.value.raw.empty() && e.value.raw.front() == '[') {
            if (e.value.raw.back() != ']') {
                throw ConfigError("config line " + std::to_string(lineno) + ": key '" + section + "." + e.key +
                                  "': unterminated array");
            }
            e.value.is_array = true;
            e.value.items = split_items(e.value.raw.substr(1, e.value.raw.size() - 2));
        }
        out.push_back(std::move(e));
    }
    return out;
}

Polygon parse_polygon(const std::string& path, const Value& v) {
    const auto xs = Binder::numbers(path, v);
    if (xs.size() < 6 || xs.size() % 2 != 0) Binder::fail(path, v.line, "expected [x1, y1, x2, y2, ...] with >= 3 vertices");
    std::vector<Point> pts;
    for (std::size_t i = 0; i < xs.size(); i += 2) pts.push_back({xs[i], xs[i + 1]});
    if (!is_simple_polygon(pts)) Binder::fail(path, v.line, "polygon is not simple");
    return Polygon(std::move(pts));
}

std::string dump_polygon(const Polygon& p) {
    std::vector<std::string> items;
    for (const auto& v : p.vertices()) {
        items.push_back(fmt(v.x));
        items.push_back(fmt(v.y));
    }
    return join(items);
}

}  // namespace

void validate(const Scenario& s) {
    try {
        bbn::validate(s.area);
    } catch (const GeometryError& e) {
        throw ConfigError(std::string("invalid geometry: ") + e.what());
    }
    if (s.area.mobile_nodes() < 1) throw ConfigError("scenario needs at least one mobile node");
    for (Tech t : s.techs) {
        const auto& pr = s.profile(t);
        if (!pr.max_payload) continue;
        for (auto p : s.payloads) {
            if (p > *pr.max_payload) {
                throw ConfigError("key 'run.payloads': payload " + std::to_string(p) + " exceeds the " +
                                  std::to_string(*pr.max_payload) + "-byte limit of " + std::string(to_string(t)));
            }
        }
    }
    for (MacKind k : {MacKind::dcf, MacKind::ban156}) {
        const auto& m = s.mac(k);
        if (m.cw_min > m.cw_max) throw ConfigError("key '" + section_of_mac(k) + ".cw_min': exceeds cw_max");
    }
    if (s.mac(MacKind::z154).min_be > s.mac(MacKind::z154).max_be) {
        throw ConfigError("key 'mac.Z154.min_be': exceeds max_be");
    }
    if (s.classification.prr_medium > s.classification.prr_high) {
        throw ConfigError("key 'classification.prr_medium': exceeds prr_high");
    }
}

Scenario parse_config(std::string_view text) {
    Scenario s = default_scenario();
    auto table = fields(s);
    std::map<std::string, Field*> index;
    for (auto& [path, f] : table) index[path] = &f;

    std::set<std::string> assigned;
    bool areas_reset = false, obstacles_reset = false, groups_reset = false;
    std::map<std::string, int> run_key_lines;
    std::map<std::string, std::size_t> area_index, group_index;

    for (auto& e : tokenize(text)) {
        std::string path = e.section + "." + e.key;
        if (auto a = aliases().find(path); a != aliases().end()) path = a->second;
        if (!assigned.insert(path).second) Binder::fail(path, e.value.line, "assigned twice");

        const auto dot = e.section.find('.');
        const std::string head = e.section.substr(0, dot);
        const std::string name = dot == std::string::npos ? "" : e.section.substr(dot + 1);
        if (head == "subarea" && !name.empty()) {
            if (!areas_reset) {
                s.area.areas.clear();
                areas_reset = true;
            }
            auto [it, fresh] = area_index.try_emplace(name, s.area.areas.size());
            if (fresh) s.area.areas.push_back(SubArea{name, AreaKind::incident_site, Polygon(), 0});
            SubArea& a = s.area.areas[it->second];
            if (e.key == "kind") {
                try {
                    a.kind = parse_area_kind(unquote(e.value.raw));
                } catch (const std::invalid_argument& ex) {
                    Binder::fail(path, e.value.line, ex.what());
                }
            } else if (e.key == "polygon") {
                a.polygon = parse_polygon(path, e.value);
            } else if (e.key == "capacity") {
                a.capacity = static_cast<int>(Binder::integer(path, e.value, 0, 1 << 20));
            } else {
                Binder::fail(path, e.value.line, "unknown key");
            }
            continue;
        }
        if (head == "obstacle" && !name.empty()) {
            if (!obstacles_reset) {
                s.area.obstacles.clear();
                obstacles_reset = true;
            }
            if (e.key != "polygon") Binder::fail(path, e.value.line, "unknown key");
            s.area.obstacles.push_back(parse_polygon(path, e.value));
            continue;
        }
        if (head == "group" && !name.empty()) {
            if (!groups_reset) {
                s.area.groups.clear();
                groups_reset = true;
            }
            auto [it, fresh] = group_index.try_emplace(name, s.area.groups.size());
            if (fresh) {
                NodeGroup g;
                g.label = name;
                s.area.groups.push_back(g);
            }
            NodeGroup& g = s.area.groups[it->second];
            if (e.key == "count") {
                g.count = static_cast<int>(Binder::integer(path, e.value, 1, 100000));
            } else if (e.key == "home") {
                g.home_area = unquote(e.value.raw);
            } else if (e.key == "speed" || e.key == "pause") {
                auto xs = Binder::numbers(path, e.value);
                if (xs.size() != 2) Binder::fail(path, e.value.line, "expected [min, max]");
                if (e.key == "speed") {
                    g.speed_min = xs[0];
                    g.speed_max = xs[1];
                } else {
                    g.pause_min = xs[0];
                    g.pause_max = xs[1];
                }
            } else if (e.key == "transport_fraction") {
                g.transport_fraction = Binder::number(path, e.value);
            } else {
                Binder::fail(path, e.value.line, "unknown key");
            }
            continue;
        }
        auto it = index.find(path);
        if (it == index.end()) Binder::fail(path, e.value.line, "unknown key");
        it->second->set(path, e.value);
        if (head == "run") run_key_lines[path] = e.value.line;
    }
    for (const auto& a : s.area.areas) {
        if (a.polygon.size() == 0) throw ConfigError("key 'subarea." + a.name + ".polygon': missing");
    }
    for (const auto& g : s.area.groups) {
        if (g.home_area.empty()) throw ConfigError("key 'group." + g.label + ".home': missing");
    }
    try {
        validate(s);
    } catch (const ConfigError& e) {
        std::string msg = e.what();
        // Point payload-limit violations at the offending line.
        if (auto l = run_key_lines.find("run.payloads"); l != run_key_lines.end() && msg.rfind("key 'run.payloads'", 0) == 0) {
            msg = "config line " + std::to_string(l->second) + ": " + msg;
        }
        throw ConfigError(msg);
    }
    return s;
}

Scenario load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string dump_config(const Scenario& scenario) {
    Scenario s = scenario;  // the field table binds to a mutable scenario
    auto table = fields(s);
    std::ostringstream out;
    std::string current;
    for (auto& [path, f] : table) {
        const auto dot = path.rfind('.');
        const std::string section = path.substr(0, dot);
        if (section != current) {
            if (!current.empty()) out << '\n';
            out << '[' << section << "]\n";
            current = section;
        }
        out << path.substr(dot + 1) << " = " << f.dump() << '\n';
    }
    for (const auto& a : s.area.areas) {
        out << "\n[subarea." << a.name << "]\n";
        out << "kind = " << to_string(a.kind) << '\n';
        out << "polygon = " << dump_polygon(a.polygon) << '\n';
        out << "capacity = " << a.capacity << '\n';
    }
    for (std::size_t i = 0; i < s.area.obstacles.size(); ++i) {
        out << "\n[obstacle.o" << (i + 1) << "]\n";
        out << "polygon = " << dump_polygon(s.area.obstacles[i]) << '\n';
    }
    for (const auto& g : s.area.groups) {
        out << "\n[group." << g.label << "]\n";
        out << "count = " << g.count << '\n';
        out << "home = " << g.home_area << '\n';
        out << "speed = " << join({fmt(g.speed_min), fmt(g.speed_max)}) << '\n';
        out << "pause = " << join({fmt(g.pause_min), fmt(g.pause_max)}) << '\n';
        out << "transport_fraction = " << fmt(g.transport_fraction) << '\n';
    }
    return out.str();
}

}  // namespace bbn
