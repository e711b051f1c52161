#include "bbn/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <mutex>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <boost/math/distributions/students_t.hpp>

#include "bbn/network.hpp"

namespace bbn {

std::uint64_t RunResult::total_drops() const {
    std::uint64_t n = 0;
    for (auto d : drops) n += d;
    return n;
}

RunResult run_once(const Scenario& s, const RunSpec& spec, const RunOptions& options) {
    const TechProfile& profile = s.profile(spec.tech);
    if (spec.payload == 0) throw ConfigError("payload must be positive");
    if (profile.max_payload && spec.payload > *profile.max_payload) {
        throw ConfigError("payload " + std::to_string(spec.payload) + " exceeds the " +
                          std::to_string(*profile.max_payload) + "-byte limit of " + std::string(to_string(spec.tech)));
    }
    MobilityTrace generated;
    if (options.trace == nullptr) generated = generate_trace(s.area, s.horizon, spec.seed);
    const MobilityTrace& trace = options.trace != nullptr ? *options.trace : generated;
    if (trace.node_count() < 2) throw ConfigError("trace must contain the sink and at least one source");

    Scheduler scheduler(s.horizon);
    if (options.event_log != nullptr) scheduler.set_event_log(options.event_log);

    NetworkParams np;
    np.mac = s.mac(profile.mac);
    np.queue_capacity = s.queue_capacity;
    np.ttl = s.ttl;
    np.battery_capacity_mj = s.battery_capacity_mj;
    np.sink = trace.position_at(kSinkId, 0.0);
    Network net(scheduler, trace, s.area.obstacles, s.propagation, profile, s.medium, np, spec.seed);
    net.install(spec.protocol, s.protocol);

    // Constant-bit-rate sources on every node but the sink.
    const double interval = 1.0 / s.cbr_rate;
    for (NodeId n = 1; n < net.size(); ++n) {
        RngStream rng(spec.seed, StreamId{0, n, StreamPurpose::application});
        const double offset = rng.uniform(0.0, interval);
        Node* node = &net.node(n);
        const std::uint32_t payload = spec.payload;
        for (std::uint32_t k = 0;; ++k) {
            const double t = offset + k * interval;
            if (t >= s.horizon) break;
            scheduler.schedule(t, n, "app-send", [node, payload, k] { node->app_send(payload, k); });
        }
    }

    scheduler.run_until(s.horizon);
    net.energy().settle(s.horizon);

    const PacketLedger& ledger = net.ledger();
    RunResult r;
    r.spec = spec;
    r.sent = ledger.sent();
    r.delivered = ledger.delivered();
    for (std::size_t i = 0; i < kDropReasonCount; ++i) r.drops[i] = ledger.drops(static_cast<DropReason>(i));
    r.in_flight = ledger.in_flight();
    if (r.sent != r.delivered + r.total_drops() + r.in_flight) {
        throw std::logic_error("packet conservation violated");
    }
    r.mean_delay = mean_delay(ledger.delays());
    r.node_energy_mj.resize(net.size());
    for (std::size_t n = 0; n < net.size(); ++n) r.node_energy_mj[n] = net.energy().node_energy(n);
    r.total_energy_mj = net.energy().total_energy();
    r.transmissions = net.medium().transmissions();
    r.collisions = net.medium().collisions();
    for (std::size_t n = 0; n < net.size(); ++n) {
        const MacStats& m = net.node(static_cast<NodeId>(n)).mac().stats();
        r.mac.data_frames += m.data_frames;
        r.mac.control_frames += m.control_frames;
        r.mac.retries += m.retries;
        r.mac.failures += m.failures;
        r.mac.cca_aborts += m.cca_aborts;
        r.mac.queue_drops += m.queue_drops;
    }
    r.events = scheduler.dispatched();
    r.config_hash = config_hash(s);
    return r;
}

double prr(const RunResult& r) {
    if (r.sent == 0) throw std::invalid_argument("PRR undefined: no packets were sent");
    return static_cast<double>(r.delivered) / static_cast<double>(r.sent);
}

std::optional<double> mean_delay(std::span<const double> delays) {
    if (delays.empty()) return std::nullopt;
    return std::accumulate(delays.begin(), delays.end(), 0.0) / static_cast<double>(delays.size());
}

double t_quantile_95(std::size_t dof) {
    if (dof == 0) throw std::invalid_argument("t quantile needs at least one degree of freedom");
    boost::math::students_t dist(static_cast<double>(dof));
    return boost::math::quantile(boost::math::complement(dist, 0.025));
}

Stat aggregate(std::span<const double> samples) {
    Stat st;
    st.n = samples.size();
    if (samples.empty()) return st;
    // Sorting first makes the floating-point sum independent of input order.
    std::vector<double> v(samples.begin(), samples.end());
    std::sort(v.begin(), v.end());
    st.min = v.front();
    st.max = v.back();
    st.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    st.mean = std::clamp(st.mean, st.min, st.max);
    if (v.size() >= 2) {
        double ss = 0.0;
        for (double x : v) ss += (x - st.mean) * (x - st.mean);
        const double sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
        st.ci95 = t_quantile_95(v.size() - 1) * sd / std::sqrt(static_cast<double>(v.size()));
    }
    return st;
}

std::vector<CellSummary> summarize(std::span<const RunResult> runs) {
    struct Acc {
        CellSummary cell;
        std::vector<double> prr, delay, energy;
    };
    std::vector<Acc> cells;
    std::map<std::tuple<int, int, std::uint32_t>, std::size_t> index;
    for (const auto& r : runs) {
        const auto key = std::make_tuple(static_cast<int>(r.spec.protocol), static_cast<int>(r.spec.tech), r.spec.payload);
        auto [it, fresh] = index.try_emplace(key, cells.size());
        if (fresh) {
            Acc a;
            a.cell.protocol = r.spec.protocol;
            a.cell.tech = r.spec.tech;
            a.cell.payload = r.spec.payload;
            cells.push_back(std::move(a));
        }
        auto& a = cells[it->second];
        a.prr.push_back(prr(r));
        if (r.mean_delay) a.delay.push_back(*r.mean_delay * 1e3);
        a.energy.push_back(r.total_energy_mj);
    }
    std::vector<CellSummary> out;
    for (auto& a : cells) {
        a.cell.prr = aggregate(a.prr);
        if (!a.delay.empty()) a.cell.delay_ms = aggregate(a.delay);
        a.cell.energy_mj = aggregate(a.energy);
        out.push_back(a.cell);
    }
    return out;
}

std::string_view to_string(Grade g) {
    switch (g) {
        case Grade::high: return "High";
        case Grade::medium: return "Medium";
        case Grade::low: return "Low";
        case Grade::worst: return "Worst";
    }
    return "?";
}

Grade classify_prr(double prr, const ClassificationThresholds& t) {
    if (prr >= t.prr_high) return Grade::high;
    if (prr >= t.prr_medium) return Grade::medium;
    if (prr > 0.0) return Grade::low;
    return Grade::worst;
}

namespace {

/// Tercile label of each value: lowest third Low, middle Medium, top High.
std::vector<Grade> terciles(const std::vector<double>& values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<Grade> out(values.size(), Grade::low);
    const double k = static_cast<double>(values.size());
    for (std::size_t rank = 0; rank < order.size(); ++rank) {
        const double r = static_cast<double>(rank);
        out[order[rank]] = r < k / 3.0 ? Grade::low : (r < 2.0 * k / 3.0 ? Grade::medium : Grade::high);
    }
    return out;
}

}  // namespace

std::vector<ClassRow> classify(std::span<const CellSummary> cells, const ClassificationThresholds& t) {
    std::vector<ClassRow> rows;
    std::map<std::pair<int, int>, std::size_t> index;
    std::vector<std::vector<const CellSummary*>> members;
    for (const auto& c : cells) {
        const auto key = std::make_pair(static_cast<int>(c.protocol), static_cast<int>(c.tech));
        auto [it, fresh] = index.try_emplace(key, rows.size());
        if (fresh) {
            ClassRow r;
            r.protocol = c.protocol;
            r.tech = c.tech;
            rows.push_back(r);
            members.emplace_back();
        }
        members[it->second].push_back(&c);
    }
    for (std::size_t i = 0; i < rows.size(); ++i) {
        auto& r = rows[i];
        double prr_sum = 0.0, energy_sum = 0.0, delay_sum = 0.0;
        std::size_t delay_n = 0;
        for (const auto* c : members[i]) {
            prr_sum += c->prr.mean;
            energy_sum += c->energy_mj.mean;
            if (c->delay_ms) {
                delay_sum += c->delay_ms->mean;
                ++delay_n;
            }
        }
        const double n = static_cast<double>(members[i].size());
        r.prr = prr_sum / n;
        r.energy_mj = energy_sum / n;
        if (delay_n > 0) r.delay_ms = delay_sum / static_cast<double>(delay_n);
        r.prr_grade = classify_prr(r.prr, t);
    }
    for (Tech tech : kAllTechs) {
        std::vector<std::size_t> live;
        std::vector<double> delays, energies;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].tech != tech) continue;
            if (rows[i].prr_grade == Grade::worst || !rows[i].delay_ms) continue;
            live.push_back(i);
            delays.push_back(*rows[i].delay_ms);
            energies.push_back(rows[i].energy_mj);
        }
        const auto dg = terciles(delays);
        const auto eg = terciles(energies);
        for (std::size_t j = 0; j < live.size(); ++j) {
            rows[live[j]].delay_grade = dg[j];
            rows[live[j]].energy_grade = eg[j];
        }
    }
    return rows;
}

// ---- files --------------------------------------------------------------

namespace {

std::string fixed(double v, int decimals) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", decimals, v);
    return buf;
}

std::string opt_fixed(const std::optional<double>& v, int decimals) { return v ? fixed(*v, decimals) : std::string(); }

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

}  // namespace

void write_runs_csv(std::ostream& out, std::span<const RunResult> runs, const std::string& hash) {
    out << "# bbnsim runs; config_hash=" << hash << "; delay in ms, energy network-total in mJ\n";
    out << "protocol,tech,payload_bytes,seed,sent,delivered,prr,mean_delay_ms,drop_no_route,drop_ttl,drop_queue,"
           "drop_mac,total_energy_mJ,config_hash\n";
    for (const auto& r : runs) {
        out << to_string(r.spec.protocol) << ',' << to_string(r.spec.tech) << ',' << r.spec.payload << ','
            << r.spec.seed << ',' << r.sent << ',' << r.delivered << ',' << fixed(prr(r), 6) << ','
            << opt_fixed(r.mean_delay ? std::optional<double>(*r.mean_delay * 1e3) : std::nullopt, 6) << ','
            << r.drops[0] << ',' << r.drops[1] << ',' << r.drops[2] << ',' << r.drops[3] << ','
            << fixed(r.total_energy_mj, 6) << ',' << r.config_hash << '\n';
    }
}

void write_summary_csv(std::ostream& out, std::span<const CellSummary> cells, const std::string& hash) {
    out << "# bbnsim summary; config_hash=" << hash << "; 95% CI half-widths, Student-t over iterations\n";
    out << "protocol,tech,payload_bytes,iterations,prr_mean,prr_ci95,delay_mean_ms,delay_ci95_ms,energy_mean_mJ,"
           "energy_ci95_mJ,config_hash\n";
    for (const auto& c : cells) {
        out << to_string(c.protocol) << ',' << to_string(c.tech) << ',' << c.payload << ',' << c.prr.n << ','
            << fixed(c.prr.mean, 6) << ',' << opt_fixed(c.prr.ci95, 6) << ','
            << (c.delay_ms ? fixed(c.delay_ms->mean, 6) : "") << ','
            << (c.delay_ms ? opt_fixed(c.delay_ms->ci95, 6) : "") << ',' << fixed(c.energy_mj.mean, 6) << ','
            << opt_fixed(c.energy_mj.ci95, 6) << ',' << hash << '\n';
    }
}

void write_classification(std::ostream& out, std::span<const ClassRow> rows, const ClassificationThresholds& t,
                          const std::string& hash) {
    out << "# bbnsim classification; config_hash=" << hash << "\n";
    out << "# PRR (mean over payloads): High >= " << fixed(t.prr_high, 2) << ", Medium >= " << fixed(t.prr_medium, 2)
        << ", Low > 0, Worst = 0\n";
    out << "# Delay, Energy: terciles of the per-technology values (High = largest); Worst = nothing delivered\n";
    out << "tech,protocol,prr,prr_class,delay_ms,delay_class,energy_mJ,energy_class\n";
    for (Tech tech : kAllTechs) {
        for (const auto& r : rows) {
            if (r.tech != tech) continue;
            out << to_string(r.tech) << ',' << to_string(r.protocol) << ',' << fixed(r.prr, 4) << ','
                << to_string(r.prr_grade) << ',' << opt_fixed(r.delay_ms, 3) << ',' << to_string(r.delay_grade) << ','
                << fixed(r.energy_mj, 3) << ',' << to_string(r.energy_grade) << '\n';
        }
    }
}

void write_node_energy_csv(std::ostream& out, std::span<const RunResult> runs, const std::string& hash) {
    out << "# bbnsim per-node energy; config_hash=" << hash << "\n";
    out << "protocol,tech,payload_bytes,seed,node,energy_mJ\n";
    for (const auto& r : runs) {
        for (std::size_t n = 0; n < r.node_energy_mj.size(); ++n) {
            out << to_string(r.spec.protocol) << ',' << to_string(r.spec.tech) << ',' << r.spec.payload << ','
                << r.spec.seed << ',' << n << ',' << fixed(r.node_energy_mj[n], 6) << '\n';
        }
    }
}

void write_plot_script(std::ostream& out, const std::string& summary_csv, const std::string& hash) {
    out << "#!/usr/bin/env python3\n"
           "# Plots PRR, delay and energy against payload for each technology.\n"
           "# config_hash="
        << hash
        << "\n"
           "import csv\n"
           "import os\n"
           "import sys\n"
           "\n"
           "import matplotlib\n"
           "matplotlib.use(\"Agg\")\n"
           "import matplotlib.pyplot as plt\n"
           "\n"
           "HERE = os.path.dirname(os.path.abspath(__file__))\n"
           "SUMMARY = sys.argv[1] if len(sys.argv) > 1 else os.path.join(HERE, \""
        << summary_csv
        << "\")\n"
           "TECHS = [\"WIFI\", \"WSN\", \"WBAN\"]\n"
           "METRICS = [(\"prr\", \"PRR\"), (\"delay\", \"mean delay (ms)\"), (\"energy\", \"energy (mJ)\")]\n"
           "\n"
           "\n"
           "def num(text):\n"
           "    return float(text) if text else None\n"
           "\n"
           "\n"
           "rows = []\n"
           "with open(SUMMARY) as f:\n"
           "    rows = list(csv.DictReader(line for line in f if not line.startswith(\"#\")))\n"
           "\n"
           "fig, axes = plt.subplots(len(METRICS), len(TECHS), figsize=(15, 12), squeeze=False)\n"
           "for col, tech in enumerate(TECHS):\n"
           "    for row, (key, label) in enumerate(METRICS):\n"
           "        ax = axes[row][col]\n"
           "        protocols = sorted({r[\"protocol\"] for r in rows if r[\"tech\"] == tech})\n"
           "        for proto in protocols:\n"
           "            cells = sorted((r for r in rows if r[\"tech\"] == tech and r[\"protocol\"] == proto),\n"
           "                           key=lambda r: int(r[\"payload_bytes\"]))\n"
           "            xs, ys, es = [], [], []\n"
           "            for r in cells:\n"
           "                mean = num(r[key + (\"_mean\" if key == \"prr\" else \"_mean_ms\" if key == \"delay\" else \"_mean_mJ\")])\n"
           "                ci = num(r[key + (\"_ci95\" if key == \"prr\" else \"_ci95_ms\" if key == \"delay\" else \"_ci95_mJ\")])\n"
           "                if mean is None:\n"
           "                    continue\n"
           "                xs.append(int(r[\"payload_bytes\"]))\n"
           "                ys.append(mean)\n"
           "                es.append(ci or 0.0)\n"
           "            if not xs:\n"
           "                continue\n"
           "            if key == \"prr\":\n"
           "                lower = [min(e, y) for y, e in zip(ys, es)]\n"
           "                upper = [min(e, 1.0 - y) for y, e in zip(ys, es)]\n"
           "                ax.errorbar(xs, ys, yerr=[lower, upper], marker=\"o\", capsize=3, label=proto)\n"
           "            else:\n"
           "                ax.errorbar(xs, ys, yerr=es, marker=\"o\", capsize=3, label=proto)\n"
           "        ax.set_xscale(\"log\", base=2)\n"
           "        ax.set_xlabel(\"payload (bytes)\")\n"
           "        ax.set_ylabel(label)\n"
           "        ax.set_title(tech)\n"
           "        if key == \"prr\":\n"
           "            ax.set_ylim(0.0, 1.05)\n"
           "        ax.grid(True, alpha=0.3)\n"
           "        ax.legend(fontsize=8)\n"
           "fig.tight_layout()\n"
           "fig.savefig(os.path.join(os.path.dirname(SUMMARY), \"metrics.png\"), dpi=120)\n";
}

std::vector<RunResult> read_runs_csv(std::istream& in) {
    std::vector<RunResult> out;
    std::string line;
    int lineno = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty() || line[0] == '#') continue;
        const auto f = split_csv(line);
        if (!header_seen) {
            if (f.size() != 14 || f[0] != "protocol") {
                throw std::runtime_error("runs CSV line " + std::to_string(lineno) + ": unexpected header");
            }
            header_seen = true;
            continue;
        }
        if (f.size() != 14) {
            throw std::runtime_error("runs CSV line " + std::to_string(lineno) + ": expected 14 fields, got " +
                                     std::to_string(f.size()));
        }
        try {
            RunResult r;
            r.spec.protocol = parse_protocol(f[0]);
            r.spec.tech = parse_tech(f[1]);
            r.spec.payload = static_cast<std::uint32_t>(std::stoul(f[2]));
            r.spec.seed = std::stoull(f[3]);
            r.sent = std::stoull(f[4]);
            r.delivered = std::stoull(f[5]);
            if (!f[7].empty()) r.mean_delay = std::stod(f[7]) / 1e3;
            for (std::size_t i = 0; i < 4; ++i) r.drops[i] = std::stoull(f[8 + i]);
            r.total_energy_mj = std::stod(f[12]);
            r.config_hash = f[13];
            if (r.delivered + r.total_drops() > r.sent) throw std::invalid_argument("counts exceed sent");
            r.in_flight = r.sent - r.delivered - r.total_drops();
            out.push_back(std::move(r));
        } catch (const std::exception& e) {
            throw std::runtime_error("runs CSV line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (!header_seen) throw std::runtime_error("runs CSV has no header");
    return out;
}

// ---- sweeps -------------------------------------------------------------

bool SweepFilter::accepts(const RunSpec& s) const {
    if (protocol && *protocol != s.protocol) return false;
    if (tech && *tech != s.tech) return false;
    if (payload && *payload != s.payload) return false;
    if (seed && *seed != s.seed) return false;
    return true;
}

void apply_filter(SweepFilter& f, const std::string& expr) {
    const auto eq = expr.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("filter '" + expr + "' is not key=value");
    const std::string key = expr.substr(0, eq);
    const std::string value = expr.substr(eq + 1);
    try {
        if (key == "protocol") {
            f.protocol = parse_protocol(value);
        } else if (key == "tech") {
            std::string up = value;
            std::transform(up.begin(), up.end(), up.begin(), [](unsigned char c) { return std::toupper(c); });
            f.tech = parse_tech(up);
        } else if (key == "payload") {
            f.payload = static_cast<std::uint32_t>(std::stoul(value));
        } else if (key == "seed") {
            f.seed = std::stoull(value);
        } else {
            throw std::invalid_argument("unknown filter key '" + key + "'");
        }
    } catch (const std::logic_error& e) {
        throw std::invalid_argument("bad filter '" + expr + "': " + e.what());
    }
}

std::vector<RunSpec> sweep_plan(const Scenario& s, const SweepFilter& filter) {
    std::vector<RunSpec> plan;
    for (auto p : s.protocols) {
        for (auto t : s.techs) {
            for (auto payload : s.payloads) {
                for (int i = 0; i < s.iterations; ++i) {
                    RunSpec spec{p, t, payload, s.seed + static_cast<std::uint64_t>(i)};
                    if (filter.accepts(spec)) plan.push_back(spec);
                }
            }
        }
    }
    return plan;
}

SweepOutcome run_sweep(const Scenario& s, std::span<const RunSpec> plan, unsigned threads,
                       const std::function<void(const RunSpec&, std::size_t, std::size_t)>& progress,
                       const MobilityTrace* trace) {
    std::map<std::uint64_t, MobilityTrace> traces;
    if (trace == nullptr) {
        for (const auto& spec : plan) {
            if (!traces.count(spec.seed)) traces.emplace(spec.seed, generate_trace(s.area, s.horizon, spec.seed));
        }
    }
    std::vector<std::optional<RunResult>> results(plan.size());
    std::vector<std::string> errors(plan.size());
    std::atomic<std::size_t> next{0};
    std::atomic<std::size_t> done{0};
    std::mutex progress_mutex;

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= plan.size()) return;
            try {
                RunOptions opt;
                opt.trace = trace != nullptr ? trace : &traces.at(plan[i].seed);
                results[i] = run_once(s, plan[i], opt);
            } catch (const std::exception& e) {
                errors[i] = e.what();
            }
            const std::size_t d = ++done;
            if (progress) {
                std::lock_guard lock(progress_mutex);
                progress(plan[i], d, plan.size());
            }
        }
    };
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(plan.size(), 1)));
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }

    SweepOutcome out;
    for (std::size_t i = 0; i < plan.size(); ++i) {
        if (results[i]) {
            out.results.push_back(std::move(*results[i]));
        } else {
            out.failures.emplace_back(plan[i], errors[i]);
        }
    }
    return out;
}

}  // namespace bbn
