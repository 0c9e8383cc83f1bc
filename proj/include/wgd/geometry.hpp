#pragma once

#include <variant>
#include <vector>

namespace wgd {

/// Planar coordinates in mm.
struct Point
{
    double x = 0.0;
    double y = 0.0;

    friend Point operator+(Point a, Point b) { return {a.x + b.x, a.y + b.y}; }
    friend Point operator-(Point a, Point b) { return {a.x - b.x, a.y - b.y}; }
    friend Point operator*(double s, Point a) { return {s * a.x, s * a.y}; }
    friend bool operator==(const Point &, const Point &) = default;
};

double dot(Point a, Point b);
double cross(Point a, Point b);
double norm(Point a);
double distance(Point a, Point b);

struct Segment
{
    Point a;
    Point b;
};

/// Circular arc; angles in radians, sweep signed (positive = counter-clockwise).
struct Arc
{
    Point center;
    double radius = 0.0;
    double start_angle = 0.0;
    double sweep = 0.0;
};

using Primitive = std::variant<Segment, Arc>;

Point start_point(const Primitive &p);
Point end_point(const Primitive &p);
double length(const Primitive &p);
/// Unit direction of travel at local arc-length position s.
Point tangent_at(const Primitive &p, double s);

struct Box
{
    double min_x, min_y, max_x, max_y;

    bool overlaps(const Box &o, double tol) const
    {
        return min_x <= o.max_x + tol && o.min_x <= max_x + tol && min_y <= o.max_y + tol && o.min_y <= max_y + tol;
    }
    void expand(const Box &o);
};

Box bounding_box(const Primitive &p);

inline constexpr double kGeometryTolerance = 1e-9;

struct Hit
{
    Point point;
    double s_first = 0.0;  // local arc-length position on the first primitive
    double s_second = 0.0; // ... and on the second
    double angle_deg = 0.0; // acute angle between tangents, in [0, 90]
    bool tangential = false; // touching or overlapping, not a transversal crossing
};

/// All contact points between two primitives. Tangencies and collinear or
/// concentric overlaps come back with `tangential` set.
std::vector<Hit> intersect(const Primitive &first, const Primitive &second, double tol = kGeometryTolerance);

/// Acute angle between two directions, degrees in [0, 90].
double acute_angle_deg(Point u, Point v);

} // namespace wgd
