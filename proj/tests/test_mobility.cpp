#include <gtest/gtest.h>

#include <algorithm>
#include <map>

#include "bbn/mobility.hpp"
#include "bbn/scenario.hpp"

namespace bbn {
namespace {

Polygon rect(double x0, double y0, double x1, double y1) {
    return Polygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

TEST(Trace, ParseSpecExample) {
    const auto t = parse_trace("0.0 10.0 20.0 50.0 30.0 20.0\n");
    ASSERT_EQ(t.node_count(), 1u);
    EXPECT_EQ(t.waypoints(0), (std::vector<Waypoint>{{0.0, {10, 20}}, {50.0, {30, 20}}}));
}

TEST(Trace, ParseErrors) {
    EXPECT_THROW(parse_trace(""), TraceFormatError);
    EXPECT_THROW(parse_trace("# only a comment\n"), TraceFormatError);
    try {
        parse_trace("0 0 0\n0 1 1 5 2 2 3 3 3\n");
        FAIL() << "non-monotone times accepted";
    } catch (const TraceFormatError& e) {
        EXPECT_NE(std::string(e.what()).find("node 1"), std::string::npos) << e.what();
    }
    try {
        parse_trace("0 0 0\n0 1 x\n");
        FAIL() << "bad token accepted";
    } catch (const TraceFormatError& e) {
        EXPECT_NE(std::string(e.what()).find("line 2"), std::string::npos) << e.what();
        EXPECT_NE(std::string(e.what()).find("'x'"), std::string::npos) << e.what();
    }
    EXPECT_THROW(parse_trace("0 1 2 3\n"), TraceFormatError);
}

TEST(Trace, WriteParseRoundTrip) {
    const auto t = parse_trace("# header\n0   0 0\n\n0 1.5 2.25   10 3.125 4\n");
    const auto text = write_trace(t);
    EXPECT_EQ(parse_trace(text), t);
    EXPECT_EQ(write_trace(parse_trace(text)), text);
}

TEST(Trace, PositionInterpolatesAndClamps) {
    const MobilityTrace t(std::vector<std::vector<Waypoint>>{{Waypoint{0.0, {0, 0}}, Waypoint{10.0, {10, 0}}}});
    EXPECT_EQ(t.position_at(0, 5.0), (Point{5, 0}));
    EXPECT_EQ(t.position_at(0, 10.0), (Point{10, 0}));
    EXPECT_EQ(t.position_at(0, 0.0), (Point{0, 0}));
    EXPECT_EQ(t.position_at(0, 99.0), (Point{10, 0}));
    EXPECT_EQ(t.position_at(0, -1.0), (Point{0, 0}));
}

TEST(PathPlanner, DetoursAroundObstacle) {
    const std::vector<Polygon> obstacles{rect(40, 40, 60, 60)};
    PathPlanner planner(obstacles, Box{0, 0, 100, 100}, 0.5);
    const Point a{10, 50}, b{90, 50};
    EXPECT_FALSE(planner.clear(a, b));
    const auto path = planner.route(a, b);
    ASSERT_FALSE(path.empty());
    EXPECT_EQ(path.back(), b);
    Point prev = a;
    double length = 0.0;
    for (const Point& p : path) {
        EXPECT_EQ(obstacle_crossings(prev, p, obstacles), 0);
        length += distance(prev, p);
        prev = p;
    }
    // Around the 20 m square: 80 m straight line plus the detour.
    EXPECT_GT(length, 80.0);
    EXPECT_LT(length, 90.0);
}

TEST(PathPlanner, StraightWhenClear) {
    const std::vector<Polygon> obstacles{rect(40, 40, 60, 60)};
    PathPlanner planner(obstacles, Box{0, 0, 100, 100}, 0.5);
    const auto path = planner.route({10, 10}, {90, 10});
    ASSERT_EQ(path.size(), 1u);
    EXPECT_EQ(path[0], (Point{90, 10}));
}

DisasterArea small_area() {
    DisasterArea a;
    a.width = 100;
    a.height = 100;
    a.sink = {50, 2};
    a.areas = {{"site", AreaKind::incident_site, rect(0, 50, 100, 100), 0},
               {"gate", AreaKind::transport_zone, rect(30, 5, 70, 20), 0},
               {"cmd", AreaKind::command_center, rect(45, 0, 55, 4), 0}};
    a.obstacles = {rect(40, 60, 60, 80)};
    a.groups = {{"walkers", 5, "site", 1.0, 1.0, 0.0, 0.0, 0.4}};
    return a;
}

TEST(Generate, SinkIsStationaryAtCommandPoint) {
    const auto area = default_disaster_area();
    const auto t = generate_trace(area, 100.0, 3);
    ASSERT_EQ(t.node_count(), 100u);
    ASSERT_EQ(t.waypoints(0).size(), 1u);
    for (double s : {0.0, 37.5, 100.0}) EXPECT_EQ(t.position_at(0, s), area.sink);
}

TEST(Generate, ConstantSpeedWithoutPauses) {
    const auto t = generate_trace(small_area(), 200.0, 1);
    for (NodeId n = 1; n < t.node_count(); ++n) {
        const auto& w = t.waypoints(n);
        for (std::size_t i = 1; i < w.size(); ++i) {
            const double dt = w[i].t - w[i - 1].t;
            const double d = distance(w[i].p, w[i - 1].p);
            // Speed range [1,1] and no pauses: time equals distance.
            if (d > 0) {
                EXPECT_NEAR(dt, d, 1e-6);
            }
        }
    }
}

TEST(Generate, InvariantsOnDefaultScenario) {
    const auto area = default_disaster_area();
    const double horizon = 100.0;
    const auto t = generate_trace(area, horizon, 9);
    std::map<std::string, double> max_speed;
    for (const auto& g : area.groups) max_speed[g.label] = g.speed_max;
    std::vector<double> node_max(t.node_count(), 0.0);
    NodeId next = 1;
    for (const auto& g : area.groups) {
        for (int k = 0; k < g.count; ++k) node_max[next++] = g.speed_max;
    }
    ASSERT_EQ(next, t.node_count());
    for (NodeId n = 0; n < t.node_count(); ++n) {
        const auto& w = t.waypoints(n);
        EXPECT_EQ(w.front().t, 0.0);
        for (std::size_t i = 1; i < w.size(); ++i) EXPECT_GT(w[i].t, w[i - 1].t);
        if (n > 0) {
            EXPECT_GE(w.back().t, horizon);
        }
        Point prev = t.position_at(n, 0.0);
        for (int step = 1; step <= static_cast<int>(horizon * 10); ++step) {
            const Point p = t.position_at(n, step / 10.0);
            for (const auto& o : area.obstacles) ASSERT_FALSE(o.contains(p)) << "node " << n << " t " << step / 10.0;
            if (n > 0) {
                ASSERT_LE(distance(prev, p) / 0.1, node_max[n] * 1.01) << "node " << n;
            }
            prev = p;
        }
    }
}

TEST(Generate, DeterministicPerSeed) {
    const auto area = default_disaster_area();
    EXPECT_EQ(write_trace(generate_trace(area, 50.0, 4)), write_trace(generate_trace(area, 50.0, 4)));
    EXPECT_NE(write_trace(generate_trace(area, 50.0, 4)), write_trace(generate_trace(area, 50.0, 5)));
}

TEST(Generate, TransportMembersReachTheTransportZone) {
    auto area = small_area();
    area.groups[0].transport_fraction = 1.0;
    const auto t = generate_trace(area, 600.0, 2);
    const Polygon& gate = area.areas[1].polygon;
    for (NodeId n = 1; n < t.node_count(); ++n) {
        bool visited = false;
        for (const auto& w : t.waypoints(n)) visited |= gate.contains(w.p) || gate.on_boundary(w.p);
        EXPECT_TRUE(visited) << "node " << n;
    }
}

TEST(Validate, RejectsBrokenGeometry) {
    auto a = small_area();
    a.groups[0].home_area = "nowhere";
    EXPECT_THROW(validate(a), GeometryError);
    a = small_area();
    a.sink = {500, 500};
    EXPECT_THROW(validate(a), GeometryError);
    a = small_area();
    a.groups[0].speed_min = 3.0;
    EXPECT_THROW(validate(a), GeometryError);
    a = small_area();
    a.obstacles.push_back(rect(-10, -10, 110, 110));
    EXPECT_THROW(generate_trace(a, 10.0, 1), GeometryError);
}

}  // namespace
}  // namespace bbn
