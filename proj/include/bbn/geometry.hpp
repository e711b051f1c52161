#ifndef BBN_GEOMETRY_HPP
#define BBN_GEOMETRY_HPP

#include <cmath>
#include <optional>
#include <span>
#include <vector>

namespace bbn {

/// Planar position in meters.
struct Point {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point&, const Point&) = default;
    Point operator+(const Point& o) const { return {x + o.x, y + o.y}; }
    Point operator-(const Point& o) const { return {x - o.x, y - o.y}; }
    Point operator*(double s) const { return {x * s, y * s}; }
};

inline double distance(const Point& a, const Point& b) { return std::hypot(a.x - b.x, a.y - b.y); }
inline double distance_sq(const Point& a, const Point& b) {
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}
inline double cross(const Point& o, const Point& a, const Point& b) {
    return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
}
inline Point lerp(const Point& a, const Point& b, double f) { return {a.x + (b.x - a.x) * f, a.y + (b.y - a.y) * f}; }

struct Box {
    double min_x = 0.0, min_y = 0.0, max_x = 0.0, max_y = 0.0;
    bool contains(const Point& p) const { return p.x >= min_x && p.x <= max_x && p.y >= min_y && p.y <= max_y; }
};

/// Simple polygon given by its vertices in order (either orientation).
class Polygon {
public:
    Polygon() = default;
    explicit Polygon(std::vector<Point> vertices);

    std::span<const Point> vertices() const { return vertices_; }
    std::size_t size() const { return vertices_.size(); }
    const Box& bounds() const { return bounds_; }
    double signed_area() const;

    /// Strict interior test; points on the boundary are outside.
    bool contains(const Point& p) const;
    bool on_boundary(const Point& p, double eps = 1e-9) const;

private:
    std::vector<Point> vertices_;
    Box bounds_;
};

/// True when the polygon has >= 3 vertices, finite coordinates and no pair of
/// non-adjacent edges that touch.
bool is_simple_polygon(std::span<const Point> vertices);

/// Closed-segment intersection test (touching counts).
bool segments_intersect(const Point& a, const Point& b, const Point& c, const Point& d);

/// Proper crossing: the segments intersect in a single point interior to both.
bool segments_cross_properly(const Point& a, const Point& b, const Point& c, const Point& d);

/// Intersection point of segments ab and cd if they intersect in exactly one
/// point.
std::optional<Point> segment_intersection(const Point& a, const Point& b, const Point& c, const Point& d);

/// Whether the open segment (a,b) passes through the interior of the polygon.
bool segment_enters(const Polygon& poly, const Point& a, const Point& b);

/// Number of distinct polygons whose interior the open segment (a,b) enters.
/// A segment that only grazes a vertex or runs along an edge is not counted.
int obstacle_crossings(const Point& a, const Point& b, std::span<const Polygon> obstacles);

}  // namespace bbn

#endif
