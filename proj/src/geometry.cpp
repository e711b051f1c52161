#include "bbn/geometry.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

namespace bbn {

namespace {

int orientation(const Point& a, const Point& b, const Point& c) {
    const double v = cross(a, b, c);
    const double scale = std::max({std::abs(b.x - a.x), std::abs(b.y - a.y), std::abs(c.x - a.x),
                                   std::abs(c.y - a.y), 1.0});
    const double eps = 1e-12 * scale * scale;
    if (v > eps) return 1;
    if (v < -eps) return -1;
    return 0;
}

bool on_segment(const Point& a, const Point& b, const Point& p) {
    return std::min(a.x, b.x) - 1e-12 <= p.x && p.x <= std::max(a.x, b.x) + 1e-12 &&
           std::min(a.y, b.y) - 1e-12 <= p.y && p.y <= std::max(a.y, b.y) + 1e-12;
}

}  // namespace

Polygon::Polygon(std::vector<Point> vertices) : vertices_(std::move(vertices)) {
    if (vertices_.size() < 3) throw std::invalid_argument("polygon needs at least 3 vertices");
    bounds_ = {std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
               -std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()};
    for (const auto& p : vertices_) {
        bounds_.min_x = std::min(bounds_.min_x, p.x);
        bounds_.min_y = std::min(bounds_.min_y, p.y);
        bounds_.max_x = std::max(bounds_.max_x, p.x);
        bounds_.max_y = std::max(bounds_.max_y, p.y);
    }
}

double Polygon::signed_area() const {
    double a = 0.0;
    for (std::size_t i = 0, n = vertices_.size(); i < n; ++i) {
        const auto& p = vertices_[i];
        const auto& q = vertices_[(i + 1) % n];
        a += p.x * q.y - q.x * p.y;
    }
    return 0.5 * a;
}

bool Polygon::on_boundary(const Point& p, double eps) const {
    for (std::size_t i = 0, n = vertices_.size(); i < n; ++i) {
        const auto& a = vertices_[i];
        const auto& b = vertices_[(i + 1) % n];
        const double len = distance(a, b);
        if (len == 0.0) continue;
        if (std::abs(cross(a, b, p)) / len <= eps && on_segment(a, b, p)) return true;
    }
    return false;
}

bool Polygon::contains(const Point& p) const {
    if (!bounds_.contains(p)) return false;
    if (on_boundary(p)) return false;
    bool inside = false;
    for (std::size_t i = 0, n = vertices_.size(), j = n - 1; i < n; j = i++) {
        const auto& a = vertices_[i];
        const auto& b = vertices_[j];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < x) inside = !inside;
        }
    }
    return inside;
}

bool is_simple_polygon(std::span<const Point> v) {
    const std::size_t n = v.size();
    if (n < 3) return false;
    for (const auto& p : v) {
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) return false;
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool adjacent = (j == i + 1) || (i == 0 && j == n - 1);
            if (adjacent) continue;
            if (segments_intersect(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n])) return false;
        }
    }
    double area = 0.0;
    for (std::size_t i = 0; i < n; ++i) area += v[i].x * v[(i + 1) % n].y - v[(i + 1) % n].x * v[i].y;
    return std::abs(area) > 0.0;
}

bool segments_intersect(const Point& a, const Point& b, const Point& c, const Point& d) {
    const int o1 = orientation(a, b, c);
    const int o2 = orientation(a, b, d);
    const int o3 = orientation(c, d, a);
    const int o4 = orientation(c, d, b);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment(a, b, c)) return true;
    if (o2 == 0 && on_segment(a, b, d)) return true;
    if (o3 == 0 && on_segment(c, d, a)) return true;
    if (o4 == 0 && on_segment(c, d, b)) return true;
    return false;
}

bool segments_cross_properly(const Point& a, const Point& b, const Point& c, const Point& d) {
    const int o1 = orientation(a, b, c);
    const int o2 = orientation(a, b, d);
    const int o3 = orientation(c, d, a);
    const int o4 = orientation(c, d, b);
    return o1 * o2 < 0 && o3 * o4 < 0;
}

std::optional<Point> segment_intersection(const Point& a, const Point& b, const Point& c, const Point& d) {
    const Point r = b - a;
    const Point s = d - c;
    const double denom = r.x * s.y - r.y * s.x;
    if (std::abs(denom) < 1e-15) return std::nullopt;
    const Point ca = c - a;
    const double t = (ca.x * s.y - ca.y * s.x) / denom;
    const double u = (ca.x * r.y - ca.y * r.x) / denom;
    if (t < -1e-12 || t > 1.0 + 1e-12 || u < -1e-12 || u > 1.0 + 1e-12) return std::nullopt;
    return a + r * t;
}

bool segment_enters(const Polygon& poly, const Point& a, const Point& b) {
    const Box& bb = poly.bounds();
    if (std::max(a.x, b.x) <= bb.min_x || std::min(a.x, b.x) >= bb.max_x ||
        std::max(a.y, b.y) <= bb.min_y || std::min(a.y, b.y) >= bb.max_y) {
        return false;
    }
    const auto edges = poly.vertices();
    bool touches = false;
    for (std::size_t i = 0, n = edges.size(); i < n && !touches; ++i) {
        touches = segments_intersect(a, b, edges[i], edges[(i + 1) % n]);
    }
    if (!touches) return poly.contains(lerp(a, b, 0.5));
    // Split (a,b) at every boundary contact; each piece is then entirely inside
    // or entirely outside, so its midpoint decides.
    std::vector<double> cuts{0.0, 1.0};
    const auto verts = poly.vertices();
    const Point r = b - a;
    const double rr = r.x * r.x + r.y * r.y;
    if (rr == 0.0) return false;
    for (std::size_t i = 0, n = verts.size(); i < n; ++i) {
        const Point& c = verts[i];
        const Point& d = verts[(i + 1) % n];
        if (!segments_intersect(a, b, c, d)) continue;
        const Point s = d - c;
        const double denom = r.x * s.y - r.y * s.x;
        if (std::abs(denom) > 1e-15) {
            const Point ca = c - a;
            cuts.push_back(std::clamp((ca.x * s.y - ca.y * s.x) / denom, 0.0, 1.0));
        } else {
            // Collinear overlap: cut at the projected edge endpoints.
            for (const Point& e : {c, d}) {
                const Point ea = e - a;
                cuts.push_back(std::clamp((ea.x * r.x + ea.y * r.y) / rr, 0.0, 1.0));
            }
        }
    }
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        if (cuts[i + 1] - cuts[i] < 1e-12) continue;
        if (poly.contains(lerp(a, b, 0.5 * (cuts[i] + cuts[i + 1])))) return true;
    }
    return false;
}

int obstacle_crossings(const Point& a, const Point& b, std::span<const Polygon> obstacles) {
    int count = 0;
    for (const auto& poly : obstacles) {
        if (segment_enters(poly, a, b)) ++count;
    }
    return count;
}

}  // namespace bbn
