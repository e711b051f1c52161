// Command-line front end: mobility generation, single runs, sweeps, reports.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bbn/experiment.hpp"
#include "bbn/mobility.hpp"
#include "bbn/scenario.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitPartial = 2;

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::optional<int> iterations;
    std::string out;
    std::vector<std::string> filters;
    std::string trace;
    bool event_log = false;
    unsigned threads = 0;
};

bbn::Scenario load(const Common& c) {
    bbn::Scenario s = c.config.empty() ? bbn::default_scenario() : bbn::load_config(c.config);
    if (c.seed) s.seed = *c.seed;
    if (c.iterations) {
        if (*c.iterations < 1) throw bbn::ConfigError("--iterations must be at least 1");
        s.iterations = *c.iterations;
    }
    bbn::validate(s);
    return s;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw bbn::ConfigError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::optional<bbn::MobilityTrace> load_trace(const Common& c, const bbn::Scenario& s) {
    if (c.trace.empty()) return std::nullopt;
    auto t = bbn::parse_trace(read_file(c.trace));
    if (t.node_count() != s.node_count()) {
        throw bbn::ConfigError("trace '" + c.trace + "' has " + std::to_string(t.node_count()) +
                               " nodes, the scenario needs " + std::to_string(s.node_count()));
    }
    return t;
}

std::ofstream open_out(const fs::path& p) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write '" + p.string() + "'");
    return f;
}

void write_reports(const fs::path& dir, const bbn::Scenario& s, std::span<const bbn::RunResult> runs,
                   const std::string& hash, bool with_runs) {
    fs::create_directories(dir);
    if (with_runs) {
        auto f = open_out(dir / "runs.csv");
        bbn::write_runs_csv(f, runs, hash);
        auto e = open_out(dir / "node_energy.csv");
        bbn::write_node_energy_csv(e, runs, hash);
        auto c = open_out(dir / "config.ini");
        c << "# config_hash=" << hash << "\n" << bbn::dump_config(s);
    }
    const auto cells = bbn::summarize(runs);
    {
        auto f = open_out(dir / "summary.csv");
        bbn::write_summary_csv(f, cells, hash);
    }
    {
        auto f = open_out(dir / "classification.csv");
        bbn::write_classification(f, bbn::classify(cells, s.classification), s.classification, hash);
    }
    {
        auto f = open_out(dir / "plot.py");
        bbn::write_plot_script(f, "summary.csv", hash);
    }
}

int cmd_validate(const Common& c) {
    const auto s = load(c);
    std::cout << "ok: " << s.node_count() << " nodes, " << bbn::sweep_plan(s).size() << " runs, config_hash "
              << bbn::config_hash(s) << "\n";
    return kExitOk;
}

int cmd_gen_mobility(const Common& c) {
    const auto s = load(c);
    const auto trace = bbn::generate_trace(s.area, s.horizon, s.seed);
    const std::string text = bbn::write_trace(trace);
    if (c.out.empty() || c.out == "-") {
        std::cout << text;
    } else {
        auto f = open_out(c.out);
        f << text;
    }
    return kExitOk;
}

int cmd_run(const Common& c, const std::string& protocol, const std::string& tech, std::uint32_t payload) {
    const auto s = load(c);
    bbn::RunSpec spec{bbn::parse_protocol(protocol), bbn::parse_tech(tech), payload, s.seed};
    const auto trace = load_trace(c, s);
    std::ofstream log;
    bbn::RunOptions opt;
    if (trace) opt.trace = &*trace;
    if (c.event_log) {
        if (c.out.empty()) {
            opt.event_log = &std::cout;
        } else {
            fs::create_directories(c.out);
            log = open_out(fs::path(c.out) / "events.log");
            opt.event_log = &log;
        }
    }
    const auto r = bbn::run_once(s, spec, opt);
    const std::string hash = bbn::config_hash(s);
    if (!c.out.empty()) {
        std::vector<bbn::RunResult> one{r};
        write_reports(c.out, s, one, hash, true);
    }
    std::ostream& os = c.event_log && c.out.empty() ? std::cerr : std::cout;
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s %s %uB seed %llu: sent %llu delivered %llu prr %.4f", std::string(bbn::to_string(spec.protocol)).c_str(),
                  std::string(bbn::to_string(spec.tech)).c_str(), spec.payload,
                  static_cast<unsigned long long>(spec.seed), static_cast<unsigned long long>(r.sent),
                  static_cast<unsigned long long>(r.delivered), bbn::prr(r));
    os << buf;
    if (r.mean_delay) {
        std::snprintf(buf, sizeof buf, " delay %.3f ms", *r.mean_delay * 1e3);
        os << buf;
    }
    std::snprintf(buf, sizeof buf, " energy %.3f mJ drops [no_route %llu ttl %llu queue %llu mac %llu] in_flight %llu\n",
                  r.total_energy_mj, static_cast<unsigned long long>(r.drops[0]),
                  static_cast<unsigned long long>(r.drops[1]), static_cast<unsigned long long>(r.drops[2]),
                  static_cast<unsigned long long>(r.drops[3]), static_cast<unsigned long long>(r.in_flight));
    os << buf;
    std::snprintf(buf, sizeof buf,
                  "  tx %llu collisions %llu mac: data %llu control %llu retries %llu failures %llu cca_aborts %llu "
                  "queue_drops %llu events %llu\n",
                  static_cast<unsigned long long>(r.transmissions), static_cast<unsigned long long>(r.collisions),
                  static_cast<unsigned long long>(r.mac.data_frames), static_cast<unsigned long long>(r.mac.control_frames),
                  static_cast<unsigned long long>(r.mac.retries), static_cast<unsigned long long>(r.mac.failures),
                  static_cast<unsigned long long>(r.mac.cca_aborts), static_cast<unsigned long long>(r.mac.queue_drops),
                  static_cast<unsigned long long>(r.events));
    os << buf;
    return kExitOk;
}

int cmd_sweep(const Common& c) {
    const auto s = load(c);
    bbn::SweepFilter filter;
    for (const auto& f : c.filters) bbn::apply_filter(filter, f);
    const auto plan = bbn::sweep_plan(s, filter);
    const auto trace = load_trace(c, s);
    const std::string hash = bbn::config_hash(s);
    std::cerr << "sweep: " << plan.size() << " runs, config_hash " << hash << "\n";
    auto outcome = bbn::run_sweep(
        s, plan, c.threads,
        [](const bbn::RunSpec& spec, std::size_t done, std::size_t total) {
            std::cerr << "[" << done << "/" << total << "] " << bbn::to_string(spec.protocol) << ' '
                      << bbn::to_string(spec.tech) << ' ' << spec.payload << "B seed " << spec.seed << "\n";
        },
        trace ? &*trace : nullptr);
    const fs::path dir = c.out.empty() ? fs::path("results") : fs::path(c.out);
    write_reports(dir, s, outcome.results, hash, true);
    for (const auto& [spec, err] : outcome.failures) {
        std::cerr << "failed: " << bbn::to_string(spec.protocol) << ' ' << bbn::to_string(spec.tech) << ' '
                  << spec.payload << "B seed " << spec.seed << ": " << err << "\n";
    }
    std::cerr << "wrote " << outcome.results.size() << " runs to " << dir.string() << "\n";
    return outcome.failures.empty() ? kExitOk : kExitPartial;
}

int cmd_report(const Common& c, const std::string& runs_path) {
    const auto s = load(c);
    std::ifstream in(runs_path);
    if (!in) throw bbn::ConfigError("cannot open '" + runs_path + "'");
    const auto runs = bbn::read_runs_csv(in);
    std::string hash = runs.empty() ? bbn::config_hash(s) : runs.front().config_hash;
    const fs::path dir = c.out.empty() ? fs::path(runs_path).parent_path() : fs::path(c.out);
    write_reports(dir.empty() ? fs::path(".") : dir, s, runs, hash, false);
    std::cerr << "report: " << runs.size() << " runs re-aggregated\n";
    return kExitOk;
}

void add_common(CLI::App* app, Common& c, bool sweep_flags) {
    app->add_option("--config", c.config, "scenario configuration file");
    app->add_option("--seed", c.seed, "master seed");
    app->add_option("--iterations", c.iterations, "iterations per cell");
    app->add_option("--out", c.out, "output directory (file for gen-mobility)");
    if (sweep_flags) {
        app->add_option("--filter", c.filters, "restrict the sweep, e.g. protocol=GPSR (repeatable)");
        app->add_option("--threads", c.threads, "worker threads (0 = all cores)");
    }
    app->add_option("--trace", c.trace, "external waypoint trace instead of generated mobility");
    app->add_flag("--emit-event-log", c.event_log, "write the dispatched event log");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"bbnsim: packet-level simulator for routing in disaster-area body-to-body networks"};
    app.require_subcommand(1);

    Common c;
    auto* validate = app.add_subcommand("validate", "check a configuration and print its hash");
    add_common(validate, c, false);

    auto* gen = app.add_subcommand("gen-mobility", "write the disaster-area waypoint trace for a seed");
    add_common(gen, c, false);

    std::string protocol = "GPSR", tech = "WIFI";
    std::uint32_t payload = 64;
    auto* run = app.add_subcommand("run", "simulate one protocol/technology/payload/seed");
    add_common(run, c, false);
    run->add_option("--protocol", protocol, "OLSRv2, AODVv2, DD or GPSR");
    run->add_option("--tech", tech, "WIFI, WSN or WBAN");
    run->add_option("--payload", payload, "payload bytes");

    auto* sweep = app.add_subcommand("sweep", "run protocols x techs x payloads x iterations");
    add_common(sweep, c, true);

    std::string runs_path;
    auto* report = app.add_subcommand("report", "re-aggregate an existing runs CSV");
    add_common(report, c, false);
    report->add_option("runs", runs_path, "runs.csv from a sweep")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    try {
        if (*validate) return cmd_validate(c);
        if (*gen) return cmd_gen_mobility(c);
        if (*run) return cmd_run(c, protocol, tech, payload);
        if (*sweep) return cmd_sweep(c);
        if (*report) return cmd_report(c, runs_path);
    } catch (const bbn::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
    return kExitOk;
}
