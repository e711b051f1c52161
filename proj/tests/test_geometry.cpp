#include <gtest/gtest.h>

#include <vector>

#include "bbn/engine.hpp"
#include "bbn/geometry.hpp"

namespace bbn {
namespace {

Polygon square(double x0, double y0, double x1, double y1) {
    return Polygon({{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}});
}

TEST(Polygon, ContainsIsStrict) {
    const Polygon p = square(0, 0, 10, 10);
    EXPECT_TRUE(p.contains({5, 5}));
    EXPECT_FALSE(p.contains({0, 5}));
    EXPECT_FALSE(p.contains({10, 10}));
    EXPECT_FALSE(p.contains({11, 5}));
    EXPECT_TRUE(p.on_boundary({0, 5}));
    EXPECT_FALSE(p.on_boundary({5, 5}));
    EXPECT_DOUBLE_EQ(std::abs(p.signed_area()), 100.0);
}

TEST(Polygon, ContainsHandlesConcaveShapes) {
    // U shape opening upward.
    const Polygon u({{0, 0}, {30, 0}, {30, 30}, {20, 30}, {20, 10}, {10, 10}, {10, 30}, {0, 30}});
    EXPECT_TRUE(u.contains({5, 20}));
    EXPECT_TRUE(u.contains({25, 20}));
    EXPECT_FALSE(u.contains({15, 20}));
    EXPECT_TRUE(u.contains({15, 5}));
}

TEST(Polygon, SimplicityCheck) {
    const std::vector<Point> ok{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
    const std::vector<Point> bowtie{{0, 0}, {1, 1}, {1, 0}, {0, 1}};
    const std::vector<Point> two{{0, 0}, {1, 1}};
    EXPECT_TRUE(is_simple_polygon(ok));
    EXPECT_FALSE(is_simple_polygon(bowtie));
    EXPECT_FALSE(is_simple_polygon(two));
    EXPECT_THROW(Polygon{two}, std::invalid_argument);
}

TEST(Segments, IntersectionCases) {
    EXPECT_TRUE(segments_intersect({0, 0}, {2, 2}, {0, 2}, {2, 0}));
    EXPECT_TRUE(segments_cross_properly({0, 0}, {2, 2}, {0, 2}, {2, 0}));
    // Touching at an endpoint intersects but does not cross properly.
    EXPECT_TRUE(segments_intersect({0, 0}, {1, 1}, {1, 1}, {2, 0}));
    EXPECT_FALSE(segments_cross_properly({0, 0}, {1, 1}, {1, 1}, {2, 0}));
    EXPECT_FALSE(segments_intersect({0, 0}, {1, 0}, {0, 1}, {1, 1}));
    // Collinear overlap.
    EXPECT_TRUE(segments_intersect({0, 0}, {2, 0}, {1, 0}, {3, 0}));
    EXPECT_FALSE(segment_intersection({0, 0}, {2, 0}, {1, 0}, {3, 0}).has_value());
    const auto x = segment_intersection({0, 0}, {2, 2}, {0, 2}, {2, 0});
    ASSERT_TRUE(x.has_value());
    EXPECT_NEAR(x->x, 1.0, 1e-12);
    EXPECT_NEAR(x->y, 1.0, 1e-12);
}

TEST(ObstacleCrossings, SpecExamples) {
    const std::vector<Polygon> obstacles{square(10, 10, 20, 20)};
    EXPECT_EQ(obstacle_crossings({0, 0}, {5, 30}, obstacles), 0);
    EXPECT_EQ(obstacle_crossings({0, 15}, {30, 15}, obstacles), 1);
    // Grazing a vertex does not enter the interior.
    EXPECT_EQ(obstacle_crossings({0, 0}, {20, 20}, std::vector<Polygon>{square(20, 20, 30, 30)}), 0);
    EXPECT_EQ(obstacle_crossings({0, 40}, {40, 0}, std::vector<Polygon>{square(20, 20, 30, 30)}), 0);
    // Running along an edge does not count either.
    EXPECT_EQ(obstacle_crossings({0, 10}, {30, 10}, obstacles), 0);
    // Two distinct polygons.
    const std::vector<Polygon> two{square(10, 10, 20, 20), square(30, 10, 40, 20)};
    EXPECT_EQ(obstacle_crossings({0, 15}, {50, 15}, two), 2);
}

TEST(ObstacleCrossings, ConcaveReentryCountsOnce) {
    const std::vector<Polygon> u{Polygon({{0, 0}, {30, 0}, {30, 30}, {20, 30}, {20, 10}, {10, 10}, {10, 30}, {0, 30}})};
    // Passes through both arms: enters the same polygon twice, counted once.
    EXPECT_EQ(obstacle_crossings({-5, 20}, {35, 20}, u), 1);
}

// Oracle: dense sampling of the open segment against the interior test.
bool enters_by_sampling(const Polygon& p, const Point& a, const Point& b) {
    for (int i = 1; i < 4000; ++i) {
        if (p.contains(lerp(a, b, i / 4000.0))) return true;
    }
    return false;
}

TEST(ObstacleCrossings, AgreesWithSamplingOracle) {
    RngStream rng(5, StreamId{});
    const Polygon p({{10, 10}, {30, 12}, {25, 30}, {18, 20}, {8, 28}});
    int entered = 0;
    for (int i = 0; i < 2000; ++i) {
        const Point a{rng.uniform(0, 40), rng.uniform(0, 40)};
        const Point b{rng.uniform(0, 40), rng.uniform(0, 40)};
        if (p.contains(a) || p.contains(b)) continue;
        const bool fast = segment_enters(p, a, b);
        ASSERT_EQ(fast, enters_by_sampling(p, a, b)) << a.x << "," << a.y << " -> " << b.x << "," << b.y;
        entered += fast;
    }
    EXPECT_GT(entered, 100);
}

}  // namespace
}  // namespace bbn
