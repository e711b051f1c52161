#include "bbn/mobility.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <queue>
#include <sstream>

namespace bbn {

std::string_view to_string(AreaKind kind) {
    switch (kind) {
        case AreaKind::incident_site: return "incident-site";
        case AreaKind::casualties_treatment: return "casualties-treatment";
        case AreaKind::transport_zone: return "transport-zone";
        case AreaKind::command_center: return "command-center";
    }
    return "?";
}

AreaKind parse_area_kind(std::string_view text) {
    for (auto k : {AreaKind::incident_site, AreaKind::casualties_treatment, AreaKind::transport_zone,
                   AreaKind::command_center}) {
        if (to_string(k) == text) return k;
    }
    throw std::invalid_argument("unknown sub-area kind '" + std::string(text) + "'");
}

const SubArea* DisasterArea::find_area(std::string_view name) const {
    for (const auto& a : areas) {
        if (a.name == name) return &a;
    }
    return nullptr;
}

const SubArea* DisasterArea::first_of_kind(AreaKind kind) const {
    for (const auto& a : areas) {
        if (a.kind == kind) return &a;
    }
    return nullptr;
}

int DisasterArea::mobile_nodes() const {
    int n = 0;
    for (const auto& g : groups) n += g.count;
    return n;
}

void validate(const DisasterArea& area) {
    if (!(area.width > 0.0) || !(area.height > 0.0)) throw GeometryError("bounding box must have positive size");
    const Box box = area.bounds();
    if (!box.contains(area.sink)) throw GeometryError("sink lies outside the bounding box");
    for (const auto& a : area.areas) {
        if (!is_simple_polygon(a.polygon.vertices())) throw GeometryError("sub-area '" + a.name + "' is not a simple polygon");
        for (const auto& p : a.polygon.vertices()) {
            if (!box.contains(p)) throw GeometryError("sub-area '" + a.name + "' extends outside the bounding box");
        }
    }
    for (std::size_t i = 0; i < area.obstacles.size(); ++i) {
        if (!is_simple_polygon(area.obstacles[i].vertices())) {
            throw GeometryError("obstacle " + std::to_string(i) + " is not a simple polygon");
        }
    }
    for (const auto& obstacle : area.obstacles) {
        if (obstacle.contains(area.sink)) throw GeometryError("sink lies inside an obstacle");
    }
    for (const auto& g : area.groups) {
        if (g.count <= 0) throw GeometryError("group '" + g.label + "' must have a positive count");
        if (g.speed_min > g.speed_max || !(g.speed_min > 0.0)) throw GeometryError("group '" + g.label + "' has an invalid speed range");
        if (g.pause_min > g.pause_max || g.pause_min < 0.0) throw GeometryError("group '" + g.label + "' has an invalid pause range");
        if (g.transport_fraction < 0.0 || g.transport_fraction > 1.0) throw GeometryError("group '" + g.label + "' transport fraction outside [0,1]");
        if (area.find_area(g.home_area) == nullptr) throw GeometryError("group '" + g.label + "' references unknown area '" + g.home_area + "'");
        if (g.transport_fraction > 0.0 && area.first_of_kind(AreaKind::transport_zone) == nullptr) {
            throw GeometryError("group '" + g.label + "' needs a transport-zone area");
        }
    }
    for (const auto& a : area.areas) {
        if (a.capacity <= 0) continue;
        int homed = 0;
        for (const auto& g : area.groups) {
            if (g.home_area == a.name) homed += g.count;
        }
        if (homed > a.capacity) throw GeometryError("sub-area '" + a.name + "' over capacity");
    }
}

MobilityTrace::MobilityTrace(std::vector<std::vector<Waypoint>> nodes) : nodes_(std::move(nodes)) {
    for (std::size_t n = 0; n < nodes_.size(); ++n) {
        const auto& w = nodes_[n];
        if (w.empty()) throw TraceFormatError("node " + std::to_string(n) + " has no waypoints");
        for (std::size_t i = 1; i < w.size(); ++i) {
            if (!(w[i].t > w[i - 1].t)) {
                throw TraceFormatError("node " + std::to_string(n) + ": waypoint times are not strictly increasing");
            }
        }
    }
}

Point MobilityTrace::position_at(NodeId node, double t) const {
    const auto& w = nodes_.at(node);
    if (t <= w.front().t) return w.front().p;
    if (t >= w.back().t) return w.back().p;
    auto hi = std::upper_bound(w.begin(), w.end(), t, [](double v, const Waypoint& wp) { return v < wp.t; });
    auto lo = hi - 1;
    if (lo->t == t) return lo->p;
    return lerp(lo->p, hi->p, (t - lo->t) / (hi->t - lo->t));
}

double MobilityTrace::horizon() const {
    double h = std::numeric_limits<double>::infinity();
    for (const auto& w : nodes_) {
        if (w.size() > 1) h = std::min(h, w.back().t);
    }
    return h;
}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\r' || c == '\f' || c == '\v'; }

void append_number(std::string& out, double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    out.append(buf, res.ptr);
}

}  // namespace

MobilityTrace parse_trace(std::string_view text) {
    std::vector<std::vector<Waypoint>> nodes;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = text.find('\n', pos);
        const std::string_view line = text.substr(pos, eol == std::string_view::npos ? text.size() - pos : eol - pos);
        ++line_no;
        pos = (eol == std::string_view::npos) ? text.size() + 1 : eol + 1;

        std::vector<double> values;
        std::size_t i = 0;
        bool comment = false;
        while (i < line.size()) {
            while (i < line.size() && is_space(line[i])) ++i;
            if (i >= line.size()) break;
            if (values.empty() && line[i] == '#') {
                comment = true;
                break;
            }
            std::size_t j = i;
            while (j < line.size() && !is_space(line[j])) ++j;
            const std::string_view token = line.substr(i, j - i);
            double v = 0.0;
            auto res = std::from_chars(token.data(), token.data() + token.size(), v);
            if (res.ec != std::errc{} || res.ptr != token.data() + token.size() || !std::isfinite(v)) {
                throw TraceFormatError("line " + std::to_string(line_no) + ": malformed token '" + std::string(token) + "'");
            }
            values.push_back(v);
            i = j;
        }
        if (comment || values.empty()) continue;
        if (values.size() % 3 != 0) {
            throw TraceFormatError("line " + std::to_string(line_no) + ": expected whitespace-separated 't x y' triples, got " +
                                   std::to_string(values.size()) + " tokens");
        }
        std::vector<Waypoint> w;
        w.reserve(values.size() / 3);
        for (std::size_t k = 0; k < values.size(); k += 3) {
            w.push_back({values[k], {values[k + 1], values[k + 2]}});
        }
        const std::size_t node = nodes.size();
        for (std::size_t k = 1; k < w.size(); ++k) {
            if (!(w[k].t > w[k - 1].t)) {
                throw TraceFormatError("node " + std::to_string(node) + " (line " + std::to_string(line_no) +
                                       "): non-monotone waypoint times at t=" + std::to_string(w[k].t));
            }
        }
        nodes.push_back(std::move(w));
    }
    if (nodes.empty()) throw TraceFormatError("no nodes");
    return MobilityTrace(std::move(nodes));
}

std::string write_trace(const MobilityTrace& trace) {
    std::string out;
    for (NodeId n = 0; n < trace.node_count(); ++n) {
        bool first = true;
        for (const auto& wp : trace.waypoints(n)) {
            for (double v : {wp.t, wp.p.x, wp.p.y}) {
                if (!first) out.push_back(' ');
                append_number(out, v);
                first = false;
            }
        }
        out.push_back('\n');
    }
    return out;
}

PathPlanner::PathPlanner(const std::vector<Polygon>& obstacles, Box bounds, double margin)
    : obstacles_(obstacles), bounds_(bounds) {
    for (const auto& poly : obstacles_) {
        const auto v = poly.vertices();
        const double orient = poly.signed_area() > 0.0 ? 1.0 : -1.0;
        const std::size_t n = v.size();
        for (std::size_t i = 0; i < n; ++i) {
            const Point& prev = v[(i + n - 1) % n];
            const Point& cur = v[i];
            const Point& next = v[(i + 1) % n];
            auto outward = [orient](const Point& a, const Point& b) {
                const Point d = b - a;
                const double len = std::hypot(d.x, d.y);
                return Point{orient * d.y / len, -orient * d.x / len};
            };
            const Point n1 = outward(prev, cur);
            const Point n2 = outward(cur, next);
            Point bis = n1 + n2;
            double len_sq = bis.x * bis.x + bis.y * bis.y;
            // Sharp spikes: cap the push so the corner stays near the vertex.
            len_sq = std::max(len_sq, 0.25);
            const Point corner = cur + bis * (2.0 * margin / len_sq);
            if (!bounds_.contains(corner) || blocked(corner)) continue;
            corners_.push_back(corner);
        }
    }
    corner_edges_.resize(corners_.size());
    for (std::size_t i = 0; i < corners_.size(); ++i) {
        for (std::size_t j = i + 1; j < corners_.size(); ++j) {
            if (clear(corners_[i], corners_[j])) {
                const double d = distance(corners_[i], corners_[j]);
                corner_edges_[i].emplace_back(j, d);
                corner_edges_[j].emplace_back(i, d);
            }
        }
    }
}

bool PathPlanner::blocked(const Point& p) const {
    for (const auto& poly : obstacles_) {
        if (poly.contains(p) || poly.on_boundary(p)) return true;
    }
    return false;
}

bool PathPlanner::clear(const Point& a, const Point& b) const {
    for (const auto& poly : obstacles_) {
        if (segment_enters(poly, a, b)) return false;
    }
    return true;
}

std::vector<Point> PathPlanner::route(const Point& a, const Point& b) const {
    if (clear(a, b)) return {b};
    // Nodes: corners [0, k), a = k, b = k + 1.
    const std::size_t k = corners_.size();
    const std::size_t src = k;
    const std::size_t dst = k + 1;
    std::vector<double> dist(k + 2, std::numeric_limits<double>::infinity());
    std::vector<std::size_t> prev(k + 2, static_cast<std::size_t>(-1));
    std::vector<char> to_dst(k, 0);
    for (std::size_t i = 0; i < k; ++i) to_dst[i] = clear(corners_[i], b) ? 1 : 0;

    using Item = std::pair<double, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[src] = 0.0;
    pq.emplace(0.0, src);
    while (!pq.empty()) {
        auto [d, u] = pq.top();
        pq.pop();
        if (d > dist[u]) continue;
        if (u == dst) break;
        auto relax = [&](std::size_t v, double w) {
            if (dist[u] + w < dist[v]) {
                dist[v] = dist[u] + w;
                prev[v] = u;
                pq.emplace(dist[v], v);
            }
        };
        if (u == src) {
            for (std::size_t i = 0; i < k; ++i) {
                if (clear(a, corners_[i])) relax(i, distance(a, corners_[i]));
            }
        } else {
            for (const auto& [v, w] : corner_edges_[u]) relax(v, w);
            if (to_dst[u]) relax(dst, distance(corners_[u], b));
        }
    }
    if (!std::isfinite(dist[dst])) return {};
    std::vector<Point> path;
    for (std::size_t v = dst; v != src; v = prev[v]) path.push_back(v == dst ? b : corners_[v]);
    std::reverse(path.begin(), path.end());
    return path;
}

namespace {

constexpr int kMaxPlacementTries = 10000;

Point random_free_point(const SubArea& area, const PathPlanner& planner, RngStream& rng) {
    const Box& bb = area.polygon.bounds();
    for (int i = 0; i < kMaxPlacementTries; ++i) {
        const Point p{rng.uniform(bb.min_x, bb.max_x), rng.uniform(bb.min_y, bb.max_y)};
        if (area.polygon.contains(p) && !planner.blocked(p)) return p;
    }
    throw GeometryError("sub-area '" + area.name + "' has no free space outside obstacles");
}

}  // namespace

MobilityTrace generate_trace(const DisasterArea& area, double horizon, std::uint64_t seed) {
    validate(area);
    const PathPlanner planner(area.obstacles, area.bounds(), area.obstacle_margin);
    const SubArea* transport = area.first_of_kind(AreaKind::transport_zone);

    std::vector<std::vector<Waypoint>> nodes;
    nodes.push_back({Waypoint{0.0, area.sink}});

    NodeId id = 1;
    for (const auto& group : area.groups) {
        const SubArea& home = *area.find_area(group.home_area);
        const int shuttles = static_cast<int>(std::lround(group.count * group.transport_fraction));
        for (int member = 0; member < group.count; ++member, ++id) {
            RngStream rng(seed, StreamId{0, id, StreamPurpose::mobility});
            const bool shuttle = member < shuttles;
            std::vector<Waypoint> w;
            Point pos = random_free_point(home, planner, rng);
            double t = 0.0;
            w.push_back({t, pos});
            bool at_home = true;
            int stuck = 0;
            while (t < horizon) {
                const double pause = rng.uniform(group.pause_min, group.pause_max);
                if (pause > 0.0) {
                    t += pause;
                    w.push_back({t, pos});
                    if (t >= horizon) break;
                }
                const SubArea& target_area = (shuttle && at_home) ? *transport : home;
                const Point dest = random_free_point(target_area, planner, rng);
                const double speed = group.speed_min == group.speed_max ? group.speed_min
                                                                         : rng.uniform(group.speed_min, group.speed_max);
                const auto path = planner.route(pos, dest);
                if (path.empty()) {
                    if (++stuck > 100) {
                        throw GeometryError("node " + std::to_string(id) + " cannot reach any point of '" + target_area.name + "'");
                    }
                    continue;
                }
                stuck = 0;
                for (const Point& next : path) {
                    const double len = distance(pos, next);
                    if (len <= 0.0) continue;
                    t += len / speed;
                    w.push_back({t, next});
                    pos = next;
                }
                if (shuttle) at_home = !at_home;
                if (w.size() == 1) {
                    // Degenerate: no pause and no movement; force progress.
                    t += 1.0;
                    w.push_back({t, pos});
                }
            }
            nodes.push_back(std::move(w));
        }
    }
    return MobilityTrace(std::move(nodes));
}

}  // namespace bbn
