#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

#include "wgd/geometry.hpp"
#include "wgd/model.hpp"

namespace wgd {

struct BoardSpec
{
    double width_mm = 100.0;
    double height_mm = 100.0;
    double card_pitch_mm = 10.0;
    double margin_mm = 1.0;

    void validate(std::size_t n_cards) const;
};

/// n x n shuffle: one waveguide per ordered (source, destination) pair,
/// self-links included, each with a single 90° bend.
struct ShuffleSpec
{
    std::size_t n_cards = 10;
    double bend_radius_mm = 8.0;
    double waveguide_pitch_mm = 0.125;
    /// Extra spacing so crossing routes never meet inside a bend.
    double clearance_mm = 0.25;

    void validate() const;
    double min_card_pitch_mm() const;
};

struct RouteId
{
    int source = 0;
    int dest = 0;

    friend auto operator<=>(const RouteId &, const RouteId &) = default;
};

std::string to_string(const RouteId &id);

struct Straight
{
    double length_cm;
};

struct Bend
{
    double radius_mm;
    double angle_deg;
};

struct Crossing
{
    AngleClass angle_class;
    double angle_deg;
    RouteId other;
};

using PathElement = std::variant<Straight, Bend, Crossing>;

struct Route
{
    RouteId id;
    std::vector<Primitive> geometry;
    std::vector<PathElement> events;

    double length_mm() const;
};

struct CrossingRecord
{
    RouteId route_a; // route_a < route_b
    RouteId route_b;
    Point point;
    double angle_deg = 90.0;
    AngleClass angle_class = AngleClass::DEG90;
    double position_a_mm = 0.0; // arc-length position along route_a
    double position_b_mm = 0.0;
};

struct Degeneracy
{
    RouteId route_a;
    RouteId route_b;
    Point point;
    std::string reason;
};

struct Layout
{
    std::vector<Route> routes;
    std::vector<CrossingRecord> crossings;
    std::vector<Degeneracy> degenerate;
    double margin_mm = 1.0;
    std::map<std::string, std::string> metadata;
};

/// Smallest board that holds the generated shuffle for this spec.
BoardSpec compact_board(const ShuffleSpec &spec, double margin_mm = 1.0);

/// Corner-crossbar shuffle: vertical drop from a top-edge source port, one 90°
/// arc of the spec radius, horizontal run to the right-edge destination port.
/// Crossings are enumerated and every route's event list derived.
Layout generate_shuffle(const ShuffleSpec &spec, const BoardSpec &board);

struct CrossingCount
{
    std::vector<CrossingRecord> records;
    std::vector<Degeneracy> degenerate;
    std::vector<std::size_t> per_route; // indexed like Layout::routes
    std::size_t total() const { return records.size(); }
};

/// Exact pairwise intersection over all primitive pairs of distinct routes,
/// parallelized over route pairs; output in canonical order.
CrossingCount count_crossings(const std::vector<Route> &routes, double tol = kGeometryTolerance);
/// Single-threaded reference implementation of count_crossings.
CrossingCount count_crossings_serial(const std::vector<Route> &routes, double tol = kGeometryTolerance);

/// Re-runs count_crossings on the layout geometry and rebuilds every route's
/// events from it.
void refresh_crossings(Layout &layout);

/// Traversal-order events for one route given the layout's crossing records.
std::vector<PathElement> derive_events(const Route &route, const std::vector<CrossingRecord> &crossings);

/// Checks connectivity and absence of self-intersection; throws GeometryError.
void validate_route(const Route &route, double tol = kGeometryTolerance);

struct BoundingBox
{
    double width_mm;
    double height_mm;
    double area_mm2;
};

BoundingBox bounding_box_area(const Layout &layout);

struct RouteStats
{
    std::size_t crossings = 0;
    std::size_t crossings_deg90 = 0;
    std::size_t crossings_deg45 = 0;
    std::size_t bends = 0;
    double length_mm = 0.0;
};

RouteStats route_stats(const Route &route);

struct LayoutStats
{
    std::size_t routes = 0;
    std::size_t bends = 0;
    std::size_t crossings = 0;
    std::size_t worst_route_crossings = 0;
    RouteId worst_route;
    std::size_t worst_route_bends = 0;
    std::size_t degenerate = 0;
};

LayoutStats layout_stats(const Layout &layout);

/// Fixture generator: tangent-continuous routes of random segments and arcs
/// in a square, each route valid on its own, ids (i, 0).
struct RandomLayoutSpec
{
    std::size_t routes = 20;
    double extent_mm = 20.0;
    std::size_t max_primitives = 3;
    double arc_probability = 0.4;
};

Layout random_layout(std::uint64_t seed, const RandomLayoutSpec &spec = {});

} // namespace wgd
