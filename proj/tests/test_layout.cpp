#include <gtest/gtest.h>

#include <algorithm>
#include <numbers>
#include <random>

#include "oracle.hpp"
#include "wgd/error.hpp"
#include "wgd/io.hpp"
#include "wgd/layout.hpp"

using namespace wgd;

namespace {

Route straight_route(RouteId id, Point a, Point b)
{
    Route r;
    r.id = id;
    r.geometry.push_back(Segment {a, b});
    return r;
}

Layout shuffle(std::size_t n, double radius = 8.0)
{
    ShuffleSpec s;
    s.n_cards = n;
    s.bend_radius_mm = radius;
    return generate_shuffle(s, compact_board(s));
}

void expect_matches_oracle(const std::vector<Route> &routes, const CrossingCount &count, const std::string &what)
{
    const auto oracle = test::brute_force_crossings(routes);
    ASSERT_EQ(count.total(), oracle.size()) << what;
    std::vector<std::size_t> per_route(routes.size(), 0);
    for (const auto &o : oracle)
    {
        per_route[o.route_a]++;
        per_route[o.route_b]++;
        const auto hit = std::find_if(count.records.begin(), count.records.end(), [&](const CrossingRecord &r) {
            return std::hypot(r.point.x - o.x, r.point.y - o.y) < 1e-6;
        });
        EXPECT_NE(hit, count.records.end()) << what << " missing crossing at " << o.x << "," << o.y;
    }
    EXPECT_EQ(count.per_route, per_route) << what;
}

} // namespace

TEST(Intersect, PerpendicularSegments)
{
    std::vector<Route> routes {straight_route({0, 0}, {0, 0.5}, {1, 0.5}), straight_route({1, 0}, {0.5, 0}, {0.5, 1})};
    const auto c = count_crossings(routes);
    ASSERT_EQ(c.total(), 1u);
    EXPECT_NEAR(c.records[0].angle_deg, 90.0, 1e-12);
    EXPECT_EQ(c.records[0].angle_class, AngleClass::DEG90);
    EXPECT_NEAR(c.records[0].point.x, 0.5, 1e-12);
}

TEST(Intersect, ParallelDisjointSegments)
{
    std::vector<Route> routes {straight_route({0, 0}, {0, 0}, {1, 0}), straight_route({1, 0}, {0, 1}, {1, 1})};
    EXPECT_EQ(count_crossings(routes).total(), 0u);
}

TEST(Intersect, FortyFiveDegreeCrossingClassified)
{
    std::vector<Route> routes {straight_route({0, 0}, {0, 0}, {2, 0}), straight_route({1, 0}, {0, -1}, {2, 1})};
    const auto c = count_crossings(routes);
    ASSERT_EQ(c.total(), 1u);
    EXPECT_NEAR(c.records[0].angle_deg, 45.0, 1e-9);
    EXPECT_EQ(c.records[0].angle_class, AngleClass::DEG45);
}

TEST(Intersect, TerminalContactIsDegenerate)
{
    std::vector<Route> routes {straight_route({0, 0}, {0, 0}, {2, 0}), straight_route({1, 0}, {1, 0}, {1, 2})};
    const auto c = count_crossings(routes);
    EXPECT_EQ(c.total(), 0u);
    ASSERT_EQ(c.degenerate.size(), 1u);
}

TEST(Intersect, TangentArcIsDegenerate)
{
    Route arc;
    arc.id = {1, 0};
    arc.geometry.push_back(Arc {{0, 1}, 1.0, -std::numbers::pi, std::numbers::pi}); // lower half, touches y = 0
    std::vector<Route> routes {straight_route({0, 0}, {-2, 0}, {2, 0}), arc};
    const auto c = count_crossings(routes);
    EXPECT_EQ(c.total(), 0u);
    ASSERT_EQ(c.degenerate.size(), 1u);
    EXPECT_EQ(c.degenerate[0].reason, "tangential contact");
}

TEST(Intersect, DuplicateIdsRejected)
{
    std::vector<Route> routes {straight_route({0, 0}, {0, 0}, {1, 0}), straight_route({0, 0}, {0, 1}, {1, 1})};
    EXPECT_THROW(count_crossings(routes), ArgumentError);
}

TEST(Shuffle, SingleCard)
{
    const auto l = shuffle(1);
    const auto st = layout_stats(l);
    EXPECT_EQ(st.routes, 1u);
    EXPECT_EQ(st.bends, 1u);
    EXPECT_EQ(st.crossings, 0u);
}

TEST(Shuffle, TwoCardsMatchOracle)
{
    const auto l = shuffle(2);
    EXPECT_EQ(l.routes.size(), 4u);
    expect_matches_oracle(l.routes, count_crossings(l.routes), "n=2");
}

TEST(Shuffle, TenCardStatistics)
{
    const auto l = shuffle(10);
    const auto st = layout_stats(l);
    EXPECT_EQ(st.routes, 100u);
    EXPECT_EQ(st.bends, 100u);
    EXPECT_NEAR(static_cast<double>(st.crossings), 1800.0, 180.0);
    EXPECT_EQ(st.worst_route_crossings, 90u);
    EXPECT_EQ(st.worst_route_bends, 1u);
    EXPECT_EQ(st.degenerate, 0u);
    for (const auto &r : l.crossings)
        EXPECT_EQ(r.angle_class, AngleClass::DEG90);
}

TEST(Shuffle, TenCardMatchesOracle)
{
    const auto l = shuffle(10);
    expect_matches_oracle(l.routes, count_crossings(l.routes), "n=10");
}

TEST(Shuffle, CrossingSymmetry)
{
    for (std::size_t n : {2u, 3u, 5u, 10u})
    {
        const auto l = shuffle(n);
        const auto c = count_crossings(l.routes);
        std::size_t sum = 0;
        for (auto v : c.per_route)
            sum += v;
        EXPECT_EQ(sum, 2 * c.total());
        for (const auto &r : l.routes)
            EXPECT_EQ(route_stats(r).bends, 1u);
        EXPECT_EQ(l.routes.size(), n * n);
    }
}

TEST(Shuffle, DeterministicGeneration)
{
    EXPECT_EQ(layout_to_json(shuffle(10)).dump(), layout_to_json(shuffle(10)).dump());
}

TEST(Shuffle, BoardTooSmall)
{
    ShuffleSpec s;
    auto board = compact_board(s);
    board.width_mm -= 5.0;
    EXPECT_THROW(generate_shuffle(s, board), GeometryError);
}

TEST(Shuffle, EventsCoverGeometry)
{
    const auto l = shuffle(10, 12.0);
    for (const auto &r : l.routes)
    {
        double cm = 0;
        std::size_t crossings = 0, bends = 0;
        for (const auto &e : r.events)
        {
            if (auto s = std::get_if<Straight>(&e))
                cm += s->length_cm;
            else if (auto b = std::get_if<Bend>(&e))
            {
                cm += b->radius_mm * b->angle_deg * std::numbers::pi / 180.0 / 10.0;
                EXPECT_DOUBLE_EQ(b->radius_mm, 12.0);
                EXPECT_NEAR(b->angle_deg, 90.0, 1e-9);
                bends++;
            }
            else
                crossings++;
        }
        EXPECT_NEAR(cm * 10.0, r.length_mm(), 1e-9);
        EXPECT_EQ(bends, 1u);
        EXPECT_EQ(crossings, route_stats(r).crossings);
    }
}

TEST(Area, SingleSegmentWithMargin)
{
    Layout l;
    l.margin_mm = 1.0;
    l.routes.push_back(straight_route({0, 0}, {0, 0}, {10, 0}));
    const auto box = bounding_box_area(l);
    EXPECT_DOUBLE_EQ(box.width_mm, 12.0);
    EXPECT_DOUBLE_EQ(box.height_mm, 2.0);
    EXPECT_DOUBLE_EQ(box.area_mm2, 24.0);
}

TEST(Area, ScalingByTwoQuadruplesArea)
{
    Layout a;
    a.margin_mm = 0.0;
    a.routes.push_back(straight_route({0, 0}, {0, 0}, {10, 3}));
    Route arc;
    arc.id = {1, 0};
    arc.geometry.push_back(Arc {{4, 4}, 2.0, 0.0, std::numbers::pi / 2});
    a.routes.push_back(arc);
    Layout b = a;
    for (auto &r : b.routes)
        for (auto &p : r.geometry)
        {
            if (auto s = std::get_if<Segment>(&p))
                *s = {2.0 * s->a, 2.0 * s->b};
            else
            {
                auto &c = std::get<Arc>(p);
                c.center = 2.0 * c.center;
                c.radius *= 2.0;
            }
        }
    EXPECT_NEAR(bounding_box_area(b).area_mm2, 4.0 * bounding_box_area(a).area_mm2, 1e-9);
}

TEST(Area, RadiusEightVersusTwelve)
{
    const double ratio = bounding_box_area(shuffle(10, 8.0)).area_mm2 / bounding_box_area(shuffle(10, 12.0)).area_mm2;
    EXPECT_NEAR(ratio, 0.48, 0.05);
}

TEST(ValidateRoute, DisconnectedRejected)
{
    Route r;
    r.id = {0, 0};
    r.geometry = {Segment {{0, 0}, {1, 0}}, Segment {{1.1, 0}, {2, 0}}};
    EXPECT_THROW(validate_route(r), GeometryError);
}

TEST(ValidateRoute, SelfIntersectionRejected)
{
    Route r;
    r.id = {0, 0};
    r.geometry = {Segment {{0, 0}, {2, 0}}, Segment {{2, 0}, {2, 1}}, Segment {{2, 1}, {1, -1}}};
    EXPECT_THROW(validate_route(r), GeometryError);
}

TEST(LayoutProperty, CountMatchesBruteForceOracle)
{
    std::size_t total = 0;
    for (std::uint64_t seed = 1; seed <= 1000; seed++)
    {
        const auto l = random_layout(seed);
        const auto c = count_crossings(l.routes);
        expect_matches_oracle(l.routes, c, "seed " + std::to_string(seed));
        total += c.total();
        if (HasFatalFailure())
            return;
    }
    EXPECT_GT(total, 1000u); // the fixtures actually cross
}

TEST(LayoutProperty, SerialAndParallelIdentical)
{
    auto same = [](const CrossingCount &a, const CrossingCount &b) {
        if (a.records.size() != b.records.size() || a.per_route != b.per_route)
            return false;
        for (std::size_t i = 0; i < a.records.size(); i++)
            if (a.records[i].route_a != b.records[i].route_a || a.records[i].route_b != b.records[i].route_b ||
                a.records[i].position_a_mm != b.records[i].position_a_mm ||
                a.records[i].point != b.records[i].point)
                return false;
        return true;
    };
    for (std::uint64_t seed = 1; seed <= 1000; seed++)
    {
        const auto l = random_layout(seed, {30, 20.0, 3, 0.4});
        EXPECT_TRUE(same(count_crossings(l.routes), count_crossings_serial(l.routes))) << seed;
    }
    const auto l = shuffle(10);
    EXPECT_TRUE(same(count_crossings(l.routes), count_crossings_serial(l.routes)));
}

TEST(LayoutProperty, RouteOrderDoesNotChangeRecords)
{
    std::mt19937_64 rng(99);
    for (std::uint64_t seed = 1; seed <= 1000; seed++)
    {
        const auto l = random_layout(seed);
        auto routes = l.routes;
        std::shuffle(routes.begin(), routes.end(), rng);
        const auto a = count_crossings(l.routes);
        const auto b = count_crossings(routes);
        ASSERT_EQ(a.records.size(), b.records.size()) << seed;
        for (std::size_t i = 0; i < a.records.size(); i++)
        {
            EXPECT_EQ(a.records[i].route_a, b.records[i].route_a);
            EXPECT_EQ(a.records[i].route_b, b.records[i].route_b);
            EXPECT_NEAR(a.records[i].point.x, b.records[i].point.x, 1e-9);
        }
    }
}

TEST(LayoutProperty, RandomLayoutDeterministic)
{
    for (std::uint64_t seed = 1; seed <= 50; seed++)
        EXPECT_EQ(layout_to_json(random_layout(seed)).dump(), layout_to_json(random_layout(seed)).dump());
}
