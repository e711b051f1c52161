#ifndef BBN_MOBILITY_HPP
#define BBN_MOBILITY_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "bbn/engine.hpp"
#include "bbn/geometry.hpp"

namespace bbn {

using NodeId = std::uint32_t;

enum class AreaKind { incident_site, casualties_treatment, transport_zone, command_center };

std::string_view to_string(AreaKind kind);
AreaKind parse_area_kind(std::string_view text);

struct SubArea {
    std::string name;
    AreaKind kind = AreaKind::incident_site;
    Polygon polygon;
    int capacity = 0;  ///< 0 = unlimited
};

/// A team of rescuers sharing a home sub-area and movement parameters.
struct NodeGroup {
    std::string label;
    int count = 0;
    std::string home_area;
    double speed_min = 0.5, speed_max = 2.0;  // m/s
    double pause_min = 0.0, pause_max = 10.0;  // s
    /// Fraction of members that shuttle between the home area and the
    /// transport zone.
    double transport_fraction = 0.0;
};

/// Geometry and population of a disaster-area scenario.
struct DisasterArea {
    double width = 400.0;
    double height = 200.0;
    std::vector<SubArea> areas;
    std::vector<Polygon> obstacles;
    Point sink{200.0, 4.0};
    std::vector<NodeGroup> groups;
    double obstacle_margin = 0.5;

    const SubArea* find_area(std::string_view name) const;
    const SubArea* first_of_kind(AreaKind kind) const;
    int mobile_nodes() const;
    Box bounds() const { return {0.0, 0.0, width, height}; }
};

/// Throws GeometryError describing the first problem found.
void validate(const DisasterArea& area);

class GeometryError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Waypoint {
    double t = 0.0;
    Point p;
    friend bool operator==(const Waypoint&, const Waypoint&) = default;
};

/// Per-node piecewise-linear movement. Node ids index the outer vector.
class MobilityTrace {
public:
    MobilityTrace() = default;
    explicit MobilityTrace(std::vector<std::vector<Waypoint>> nodes);

    std::size_t node_count() const { return nodes_.size(); }
    const std::vector<Waypoint>& waypoints(NodeId node) const { return nodes_.at(node); }

    /// Linear interpolation between bracketing waypoints; holds the last
    /// waypoint after the end of the trace and the first before t=0.
    Point position_at(NodeId node, double t) const;

    /// Smallest final waypoint time over all nodes with more than one waypoint.
    double horizon() const;

    friend bool operator==(const MobilityTrace&, const MobilityTrace&) = default;

private:
    std::vector<std::vector<Waypoint>> nodes_;
};

class TraceFormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Parses the waypoint trace format: one line per node in ascending id
/// order, whitespace-separated `t x y` triples. Blank lines and lines
/// starting with '#' are skipped.
MobilityTrace parse_trace(std::string_view text);

/// Writes a trace in the same format, numbers in shortest round-trip form.
std::string write_trace(const MobilityTrace& trace);

/// Shortest obstacle-avoiding paths over a visibility graph whose nodes are
/// obstacle vertices pushed outward by the margin.
class PathPlanner {
public:
    PathPlanner(const std::vector<Polygon>& obstacles, Box bounds, double margin);

    /// Returns the polyline from a to b excluding a and including b. Empty
    /// when b cannot be reached.
    std::vector<Point> route(const Point& a, const Point& b) const;

    bool clear(const Point& a, const Point& b) const;
    bool blocked(const Point& p) const;
    const std::vector<Point>& corners() const { return corners_; }

private:
    const std::vector<Polygon>& obstacles_;
    Box bounds_;
    std::vector<Point> corners_;
    std::vector<std::vector<std::pair<std::size_t, double>>> corner_edges_;
};

/// Disaster-area movement: node 0 is the stationary sink; every other node
/// performs random-waypoint movement restricted to its home sub-area, with
/// transport members shuttling to the transport zone and back. Every leg
/// avoids obstacle interiors.
MobilityTrace generate_trace(const DisasterArea& area, double horizon, std::uint64_t seed);

}  // namespace bbn

#endif
