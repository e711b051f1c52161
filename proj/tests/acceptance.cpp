// Acceptance run: exact oracles plus trend checks on the default sweep.
// Prints one PASS/FAIL line per criterion; exits nonzero if any fails.

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "bbn/aodv.hpp"
#include "bbn/experiment.hpp"
#include "bbn/gpsr.hpp"
#include "bbn/olsr.hpp"
#include "support.hpp"

namespace {

using namespace bbn;
using testing::bfs;
using testing::Graph;
using testing::GraphNet;

struct Verdict {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void report(int id, const std::string& what, const Verdict& v) {
    std::printf("criterion %2d: %s  %s (%s)\n", id, v.pass ? "PASS" : "FAIL", what.c_str(), v.detail.c_str());
    std::fflush(stdout);
    failures += !v.pass;
}

std::string fmt(double x, int digits = 3) {
    std::ostringstream o;
    o.setf(std::ios::fixed);
    o.precision(digits);
    o << x;
    return o.str();
}

Graph random_graph(std::mt19937_64& gen, std::size_t n, double p) {
    std::bernoulli_distribution e(p);
    Graph g(n);
    for (NodeId a = 0; a < n; ++a)
        for (NodeId b = a + 1; b < n; ++b)
            if (e(gen)) {
                g[a].push_back(b);
                g[b].push_back(a);
            }
    return g;
}

// ---- exact criteria ------------------------------------------------------

Verdict energy_formula() {
    const double e = energy_packet(1e-3, 160.0);
    const double rel = std::abs(e - 0.48) / 0.48;
    return {rel <= 1e-12, "E = " + fmt(e, 15) + " mJ"};
}

Verdict mpr_and_routes() {
    std::mt19937_64 gen(2024);
    int bad_cover = 0, bad_route = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + trial % 9;
        const Graph g = random_graph(gen, n, 0.35);
        std::vector<olsr::Link> links;
        for (NodeId a = 0; a < n; ++a)
            for (NodeId b : g[a]) links.emplace_back(a, b);
        for (NodeId self = 0; self < n; ++self) {
            const std::set<NodeId> one(g[self].begin(), g[self].end());
            std::map<NodeId, std::set<NodeId>> two;
            std::set<NodeId> need;
            for (NodeId v : one) {
                auto& r = two[v];
                for (NodeId w : g[v])
                    if (w != self && !one.count(w)) {
                        r.insert(w);
                        need.insert(w);
                    }
            }
            std::set<NodeId> got;
            for (NodeId m : olsr::select_mprs(one, two)) got.insert(two[m].begin(), two[m].end());
            bad_cover += got != need;
            const auto routes = olsr::recompute_routes(self, one, links);
            const auto dist = bfs(g, self);
            for (NodeId d = 0; d < n; ++d) {
                if (d == self) continue;
                const auto it = routes.find(d);
                const int hops = it == routes.end() ? -1 : it->second.hops;
                bad_route += hops != dist[d];
            }
        }
    }
    return {bad_cover == 0 && bad_route == 0,
            "200 graphs; uncovered sets " + std::to_string(bad_cover) + ", route mismatches " + std::to_string(bad_route)};
}

std::optional<int> gpsr_walk(const Graph& g, const std::vector<Point>& pts, NodeId src, NodeId dst) {
    gpsr::GeoHeader h;
    h.dest = pts[dst];
    NodeId cur = src;
    std::optional<NodeId> from;
    for (std::size_t hops = 0; hops <= 4 * g.size() * g.size() + 16; ++hops) {
        if (cur == dst) return static_cast<int>(hops);
        std::vector<gpsr::NeighborPos> table;
        for (NodeId v : g[cur]) table.push_back({v, pts[v]});
        const auto next = gpsr::route(cur, pts[cur], h, table, from);
        if (!next) return std::nullopt;
        h.prev = pts[cur];
        from = cur;
        cur = *next;
    }
    return std::nullopt;
}

Verdict gpsr_oracles() {
    std::mt19937_64 gen(77);
    std::uniform_real_distribution<double> u(0.0, 100.0);
    auto points = [&](std::size_t n) {
        std::vector<Point> p(n);
        for (auto& x : p) x = {u(gen), u(gen)};
        return p;
    };
    int crossings = 0, argmin_bad = 0, undelivered = 0, pairs = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const auto pts = points(5 + trial % 26);
        const Graph g = testing::unit_disk(pts, 40.0);
        std::vector<std::pair<NodeId, NodeId>> edges;
        for (NodeId a = 0; a < pts.size(); ++a) {
            std::vector<gpsr::NeighborPos> t;
            for (NodeId v : g[a]) t.push_back({v, pts[v]});
            for (const auto& k : gpsr::planarize_gg(pts[a], t))
                if (a < k.id) edges.emplace_back(a, k.id);
        }
        for (std::size_t i = 0; i < edges.size(); ++i)
            for (std::size_t j = i + 1; j < edges.size(); ++j)
                crossings += segments_cross_properly(pts[edges[i].first], pts[edges[i].second], pts[edges[j].first],
                                                     pts[edges[j].second]);
    }
    for (int trial = 0; trial < 200; ++trial) {
        const auto pts = points(2 + trial % 15);
        std::vector<gpsr::NeighborPos> t;
        for (NodeId i = 2; i < pts.size(); ++i) t.push_back({i, pts[i]});
        std::optional<NodeId> best;
        double bd = distance(pts[0], pts[1]);
        for (const auto& n : t)
            if (distance(n.pos, pts[1]) < bd) {
                bd = distance(n.pos, pts[1]);
                best = n.id;
            }
        argmin_bad += gpsr::greedy_next_hop(pts[0], t, pts[1]) != best;
    }
    for (std::size_t n = 2; n <= 12; ++n)
        for (int trial = 0; trial < 300; ++trial) {
            const auto pts = points(n);
            const Graph g = testing::unit_disk(pts, 35.0);
            for (NodeId s = 0; s < n; ++s) {
                const auto dist = bfs(g, s);
                for (NodeId d = 0; d < n; ++d) {
                    if (d == s || dist[d] < 0) continue;
                    ++pairs;
                    undelivered += !gpsr_walk(g, pts, s, d);
                }
            }
        }
    return {crossings == 0 && argmin_bad == 0 && undelivered == 0,
            "GG crossings " + std::to_string(crossings) + ", argmin mismatches " + std::to_string(argmin_bad) +
                ", undelivered " + std::to_string(undelivered) + "/" + std::to_string(pairs) + " connected pairs"};
}

Verdict aodv_dedup() {
    std::mt19937_64 gen(5150);
    int worst = 0;
    std::uint64_t forwards = 0;
    for (int trial = 0; trial < 10000; ++trial) {
        const std::size_t n = 3 + trial % 8;
        GraphNet net(random_graph(gen, n, 0.4), {}, static_cast<std::uint64_t>(trial) + 1);
        std::map<std::tuple<NodeId, NodeId, std::uint32_t>, int> count;
        net.on_send = [&](const GraphNet::Sent& s) {
            if (const auto* m = std::any_cast<aodv::Rreq>(&s.packet.header))
                if (m->origin != s.from) {
                    worst = std::max(worst, ++count[{s.from, m->origin, m->rreq_id}]);
                    ++forwards;
                }
        };
        net.install(ProtocolKind::aodvv2);
        const NodeId origin = 1 + static_cast<NodeId>(gen() % (n - 1));
        net.protocol<aodv::Aodv>(origin).originate_rreq(kSinkId);
        net.protocol<aodv::Aodv>(kSinkId).originate_rreq(origin);
        net.run_until(0.5);
        net.protocol<aodv::Aodv>(origin).originate_rreq(kSinkId);
        net.run_until(2.0);
    }
    return {worst <= 1, "10000 floods, " + std::to_string(forwards) + " forwards, max per node and request " +
                            std::to_string(worst)};
}

Verdict backoff_bounds() {
    int bad = 0;
    std::pair<int, int> z1{-1, -1};
    for (MacKind kind : {MacKind::dcf, MacKind::z154, MacKind::ban156}) {
        const auto d = default_discipline(kind);
        const int attempts = kind == MacKind::z154 ? d.max_backoff_rounds : d.max_attempts();
        for (int a = 1; a <= attempts; ++a) {
            RngStream rng(a, StreamId{0, static_cast<std::uint64_t>(kind), StreamPurpose::mac});
            const auto [lo, hi] = backoff_window(d, a);
            int seen_lo = hi, seen_hi = lo;
            for (int i = 0; i < 100000; ++i) {
                const int s = draw_backoff(d, a, rng);
                bad += s < lo || s > hi;
                seen_lo = std::min(seen_lo, s);
                seen_hi = std::max(seen_hi, s);
            }
            if (kind == MacKind::z154 && a == 1) z1 = {seen_lo, seen_hi};
        }
    }
    const bool z_ok = backoff_window(default_discipline(MacKind::z154), 1) == std::pair{0, 7} && z1 == std::pair{0, 7};
    return {bad == 0 && z_ok, "out-of-window draws " + std::to_string(bad) + ", Z154 attempt 1 drew [" +
                                  std::to_string(z1.first) + "," + std::to_string(z1.second) + "]"};
}

Verdict determinism(const Scenario& base, double horizon) {
    Scenario s = base;
    s.horizon = horizon;
    s.iterations = 1;
    const auto plan = sweep_plan(s);
    std::vector<std::string> csv;
    for (int rep = 0; rep < 3; ++rep) {
        const auto out = run_sweep(s, plan, 1);
        std::ostringstream o;
        write_runs_csv(o, out.results, config_hash(s));
        csv.push_back(o.str());
    }
    const bool same = csv[0] == csv[1] && csv[1] == csv[2];
    return {same, std::to_string(plan.size()) + " runs of " + fmt(horizon, 0) + " s, 3 repetitions, " +
                      std::to_string(csv[0].size()) + " bytes each"};
}

// ---- trend criteria ------------------------------------------------------

struct Grid {
    std::map<std::tuple<ProtocolKind, Tech, std::uint32_t>, CellSummary> cells;
    const CellSummary& at(ProtocolKind p, Tech t, std::uint32_t payload) const {
        return cells.at({p, t, payload});
    }
    double prr(ProtocolKind p, Tech t, std::uint32_t payload) const { return at(p, t, payload).prr.mean; }
    std::optional<double> delay(ProtocolKind p, Tech t, std::uint32_t payload) const {
        const auto& d = at(p, t, payload).delay_ms;
        return d ? std::optional{d->mean} : std::nullopt;
    }
};

std::string name(ProtocolKind p) { return std::string(to_string(p)); }
std::string name(Tech t) { return std::string(to_string(t)); }

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"acceptance checks"};
    int iterations = 10;
    double det_horizon = 20.0;
    std::string out_dir = "acceptance_out";
    app.add_option("--iterations", iterations, "seeds per sweep cell")->check(CLI::Range(2, 1000));
    app.add_option("--determinism-horizon", det_horizon, "horizon of the repeated determinism sweep, s");
    app.add_option("--out", out_dir, "directory for the sweep CSVs");
    CLI11_PARSE(app, argc, argv);

    const auto t0 = std::chrono::steady_clock::now();
    report(1, "energy formula", energy_formula());
    report(3, "MPR cover and route oracle", mpr_and_routes());
    report(4, "GPSR oracles", gpsr_oracles());
    report(5, "AODV request dedup", aodv_dedup());
    report(7, "backoff bounds", backoff_bounds());

    Scenario s = default_scenario();
    s.iterations = iterations;
    report(2, "determinism", determinism(s, det_horizon));

    const auto plan = sweep_plan(s);
    std::printf("running the default sweep: %zu runs\n", plan.size());
    std::fflush(stdout);
    const auto outcome = run_sweep(s, plan, 0);
    {
        std::size_t broken = 0;
        for (const auto& r : outcome.results) broken += r.sent != r.delivered + r.total_drops() + r.in_flight;
        std::string detail = std::to_string(outcome.results.size()) + " runs checked";
        for (const auto& [spec, msg] : outcome.failures) detail += "; " + name(spec.protocol) + "/" + name(spec.tech) + ": " + msg;
        report(6, "conservation", {broken == 0 && outcome.failures.empty(), detail});
    }

    const auto cells = summarize(outcome.results);
    const auto rows = classify(cells, s.classification);
    const std::string hash = config_hash(s);
    std::filesystem::create_directories(out_dir);
    {
        std::ofstream runs(out_dir + "/runs.csv"), summary(out_dir + "/summary.csv"),
            grid(out_dir + "/classification.csv");
        write_runs_csv(runs, outcome.results, hash);
        write_summary_csv(summary, cells, hash);
        write_classification(grid, rows, s.classification, hash);
    }
    Grid g;
    for (const auto& c : cells) g.cells[{c.protocol, c.tech, c.payload}] = c;

    std::printf("cell PRR means (delay ms):\n");
    for (auto t : kAllTechs)
        for (auto p : kAllProtocols) {
            std::printf("  %-5s %-7s", name(t).c_str(), name(p).c_str());
            for (auto pl : s.payloads) {
                const auto d = g.delay(p, t, pl);
                std::printf("  %4u:%.3f(%s)", pl, g.prr(p, t, pl), d ? fmt(*d, 0).c_str() : "-");
            }
            std::printf("\n");
        }

    // 8: WIFI reliability at small payloads.
    {
        bool ok = true;
        std::string detail;
        for (auto p : {ProtocolKind::gpsr, ProtocolKind::olsrv2, ProtocolKind::aodvv2}) {
            double sum = 0.0;
            int n = 0;
            for (auto pl : s.payloads)
                if (pl <= 64) {
                    sum += g.prr(p, Tech::wifi, pl);
                    ++n;
                }
            const double m = sum / n;
            ok &= m >= 0.85;
            detail += (detail.empty() ? "" : ", ") + name(p) + " " + fmt(m);
        }
        report(8, "WIFI PRR >= 0.85 for payloads <= 64 B", {ok, detail});
    }
    // 9: technology ordering.
    {
        int violations = 0;
        std::string where;
        for (auto p : kAllProtocols)
            for (auto pl : s.payloads) {
                const double wifi = g.prr(p, Tech::wifi, pl), wban = g.prr(p, Tech::wban, pl),
                             wsn = g.prr(p, Tech::wsn, pl);
                if (!(wifi >= wban && wban >= wsn)) {
                    ++violations;
                    where += " " + name(p) + "@" + std::to_string(pl);
                }
            }
        report(9, "PRR(WIFI) >= PRR(WBAN) >= PRR(WSN), <= 2 violations of 20",
               {violations <= 2, std::to_string(violations) + " violations" + where});
    }
    // 10: OLSRv2 collapse on WSN.
    {
        double worst = 0.0;
        for (auto pl : s.payloads) worst = std::max(worst, g.prr(ProtocolKind::olsrv2, Tech::wsn, pl));
        report(10, "PRR(OLSRv2, WSN) <= 0.05 at every payload", {worst <= 0.05, "max " + fmt(worst)});
    }
    // 11: GPSR strength on WBAN.
    {
        bool lead = true;
        std::string detail;
        for (auto pl : s.payloads) {
            if (pl > 16) continue;
            double others = 0.0;
            for (auto p : {ProtocolKind::olsrv2, ProtocolKind::aodvv2, ProtocolKind::dd})
                others = std::max(others, g.prr(p, Tech::wban, pl));
            const double mine = g.prr(ProtocolKind::gpsr, Tech::wban, pl);
            lead &= mine >= others;
            detail += std::to_string(pl) + " B: GPSR " + fmt(mine) + " vs " + fmt(others) + "; ";
        }
        int inversions = 0;
        for (std::size_t i = 1; i < s.payloads.size(); ++i)
            inversions += g.prr(ProtocolKind::gpsr, Tech::wban, s.payloads[i]) >
                          g.prr(ProtocolKind::gpsr, Tech::wban, s.payloads[i - 1]);
        detail += std::to_string(inversions) + " inversions";
        report(11, "GPSR leads on WBAN at <= 16 B and decreases with payload", {lead && inversions <= 1, detail});
    }
    // 12: delay ordering.
    {
        bool ok = true;
        std::string detail;
        const auto gw = g.delay(ProtocolKind::gpsr, Tech::wban, 64), gi = g.delay(ProtocolKind::gpsr, Tech::wifi, 64);
        ok &= gw && gi && *gw < *gi;
        detail += "GPSR@64 WBAN " + (gw ? fmt(*gw, 1) : "-") + " ms vs WIFI " + (gi ? fmt(*gi, 1) : "-") + " ms";
        for (auto pl : s.payloads) {
            if (pl < 64) continue;
            const auto dd = g.delay(ProtocolKind::dd, Tech::wifi, pl), ao = g.delay(ProtocolKind::aodvv2, Tech::wifi, pl);
            ok &= dd && ao && *dd < *ao;
            detail += "; WIFI@" + std::to_string(pl) + " DD " + (dd ? fmt(*dd, 1) : "-") + " vs AODVv2 " +
                      (ao ? fmt(*ao, 1) : "-");
        }
        report(12, "delay ordering", {ok, detail});
    }
    // 13: classification grid.
    {
        auto grade = [&](ProtocolKind p, Tech t) {
            for (const auto& r : rows)
                if (r.protocol == p && r.tech == t) return r;
            return ClassRow{};
        };
        const std::tuple<ProtocolKind, Tech, Grade> want[] = {
            {ProtocolKind::olsrv2, Tech::wsn, Grade::worst},
            {ProtocolKind::gpsr, Tech::wifi, Grade::high},
            {ProtocolKind::gpsr, Tech::wban, Grade::high},
            {ProtocolKind::gpsr, Tech::wsn, Grade::low},
        };
        bool ok = true;
        std::string detail;
        for (const auto& [p, t, w] : want) {
            const auto r = grade(p, t);
            ok &= r.prr_grade == w;
            detail += (detail.empty() ? "" : ", ") + name(p) + "/" + name(t) + " " + std::string(to_string(r.prr_grade)) +
                      " (" + fmt(r.prr) + ", want " + std::string(to_string(w)) + ")";
        }
        report(13, "classification grid", {ok, detail});
    }

    const double minutes =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count() / 60.0;
    std::printf("acceptance: %d of 13 criteria failed (%.1f min)\n", failures, minutes);
    return failures == 0 ? 0 : 1;
}
