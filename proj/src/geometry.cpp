#include "wgd/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

namespace wgd {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

Point perp(Point a) { return {-a.y, a.x}; }

Point arc_point(const Arc &arc, double theta)
{
    return {arc.center.x + arc.radius * std::cos(theta), arc.center.y + arc.radius * std::sin(theta)};
}

// Local arc-length position of a point known to lie on the arc's circle, or
// nullopt when it is outside the swept range.
std::optional<double> arc_position(const Arc &arc, Point p, double tol)
{
    const double phi = std::atan2(p.y - arc.center.y, p.x - arc.center.x);
    double delta = arc.sweep >= 0.0 ? phi - arc.start_angle : arc.start_angle - phi;
    delta = std::fmod(delta, kTwoPi);
    if (delta < 0.0)
        delta += kTwoPi;
    const double span = std::abs(arc.sweep);
    const double eps = tol / arc.radius;
    if (delta <= span + eps)
        return std::min(delta, span) * arc.radius;
    if (delta >= kTwoPi - eps)
        return 0.0;
    return std::nullopt;
}

std::optional<double> segment_position(const Segment &seg, double t, double tol)
{
    const double len = distance(seg.a, seg.b);
    const double eps = len > 0.0 ? tol / len : 0.0;
    if (t < -eps || t > 1.0 + eps)
        return std::nullopt;
    return std::clamp(t, 0.0, 1.0) * len;
}

std::vector<Hit> segment_segment(const Segment &s1, const Segment &s2, double tol)
{
    std::vector<Hit> hits;
    const Point d1 = s1.b - s1.a;
    const Point d2 = s2.b - s2.a;
    const double l1 = norm(d1), l2 = norm(d2);
    if (l1 == 0.0 || l2 == 0.0)
        return hits;

    const double denom = cross(d1, d2);
    const Point w = s2.a - s1.a;
    if (std::abs(denom) <= tol * l1 * l2 * 1e-3)
    {
        // parallel: only collinear overlap or end-to-end contact matters
        if (std::abs(cross(w, d1)) / l1 > tol)
            return hits;
        const double t0 = dot(w, d1) / (l1 * l1);
        const double t1 = dot(s2.b - s1.a, d1) / (l1 * l1);
        const double lo = std::max(0.0, std::min(t0, t1));
        const double hi = std::min(1.0, std::max(t0, t1));
        if (hi < lo - tol / l1)
            return hits;
        const double t = 0.5 * (lo + hi);
        Hit h;
        h.point = s1.a + t * d1;
        h.s_first = std::clamp(t, 0.0, 1.0) * l1;
        h.s_second = std::clamp(dot(h.point - s2.a, d2) / (l2 * l2), 0.0, 1.0) * l2;
        h.angle_deg = 0.0;
        h.tangential = true;
        hits.push_back(h);
        return hits;
    }

    const double t = cross(w, d2) / denom;
    const double u = cross(w, d1) / denom;
    auto p1 = segment_position(s1, t, tol);
    auto p2 = segment_position(s2, u, tol);
    if (!p1 || !p2)
        return hits;
    Hit h;
    h.point = s1.a + t * d1;
    h.s_first = *p1;
    h.s_second = *p2;
    h.angle_deg = acute_angle_deg(d1, d2);
    hits.push_back(h);
    return hits;
}

std::vector<Hit> segment_arc(const Segment &seg, const Arc &arc, double tol)
{
    std::vector<Hit> hits;
    const Point d = seg.b - seg.a;
    const double len = norm(d);
    if (len == 0.0)
        return hits;
    const Point u = (1.0 / len) * d;
    const Point to_center = arc.center - seg.a;
    const double along = dot(to_center, u);          // foot of the perpendicular, in mm
    const double offset = cross(u, to_center);       // signed distance of center from the line
    const double h = std::abs(offset);

    auto emit = [&](double s_on_line, bool tangential) {
        auto ps = segment_position(seg, s_on_line / len, tol);
        if (!ps)
            return;
        const Point p = seg.a + s_on_line * u;
        auto pa = arc_position(arc, p, tol);
        if (!pa)
            return;
        Hit hit;
        hit.point = p;
        hit.s_first = *ps;
        hit.s_second = *pa;
        hit.angle_deg = tangential ? 0.0 : acute_angle_deg(u, tangent_at(arc, *pa));
        hit.tangential = tangential;
        hits.push_back(hit);
    };

    if (std::abs(h - arc.radius) <= tol)
    {
        emit(along, true);
        return hits;
    }
    if (h > arc.radius)
        return hits;
    const double half_chord = std::sqrt(arc.radius * arc.radius - h * h);
    emit(along - half_chord, false);
    emit(along + half_chord, false);
    return hits;
}

std::vector<Hit> arc_arc(const Arc &a1, const Arc &a2, double tol)
{
    std::vector<Hit> hits;
    const Point dc = a2.center - a1.center;
    const double d = norm(dc);
    const double r1 = a1.radius, r2 = a2.radius;

    auto emit = [&](Point p, bool tangential) {
        auto s1 = arc_position(a1, p, tol);
        auto s2 = arc_position(a2, p, tol);
        if (!s1 || !s2)
            return;
        Hit hit;
        hit.point = p;
        hit.s_first = *s1;
        hit.s_second = *s2;
        hit.angle_deg = tangential ? 0.0 : acute_angle_deg(tangent_at(a1, *s1), tangent_at(a2, *s2));
        hit.tangential = tangential;
        hits.push_back(hit);
    };

    if (d <= tol)
    {
        if (std::abs(r1 - r2) > tol)
            return hits;
        // same circle: any shared angular range is an overlap
        for (const Point p : {arc_point(a2, a2.start_angle), arc_point(a2, a2.start_angle + a2.sweep)})
        {
            emit(p, true);
            if (!hits.empty())
                return hits;
        }
        for (const Point p : {arc_point(a1, a1.start_angle), arc_point(a1, a1.start_angle + a1.sweep)})
        {
            emit(p, true);
            if (!hits.empty())
                return hits;
        }
        return hits;
    }

    const Point u = (1.0 / d) * dc;
    if (d > r1 + r2 + tol || d < std::abs(r1 - r2) - tol)
        return hits;
    if (std::abs(d - (r1 + r2)) <= tol)
    {
        emit(a1.center + r1 * u, true);
        return hits;
    }
    if (std::abs(d - std::abs(r1 - r2)) <= tol)
    {
        emit(r1 >= r2 ? a1.center + r1 * u : a1.center - r1 * u, true);
        return hits;
    }
    const double along = (r1 * r1 - r2 * r2 + d * d) / (2.0 * d);
    const double h = std::sqrt(std::max(r1 * r1 - along * along, 0.0));
    const Point base = a1.center + along * u;
    emit(base + h * perp(u), false);
    emit(base - h * perp(u), false);
    return hits;
}

std::vector<Hit> swapped(std::vector<Hit> hits)
{
    for (auto &h : hits)
        std::swap(h.s_first, h.s_second);
    return hits;
}

} // namespace

double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
double cross(Point a, Point b) { return a.x * b.y - a.y * b.x; }
double norm(Point a) { return std::hypot(a.x, a.y); }
double distance(Point a, Point b) { return norm(b - a); }

Point start_point(const Primitive &p)
{
    if (const auto *s = std::get_if<Segment>(&p))
        return s->a;
    const auto &a = std::get<Arc>(p);
    return arc_point(a, a.start_angle);
}

Point end_point(const Primitive &p)
{
    if (const auto *s = std::get_if<Segment>(&p))
        return s->b;
    const auto &a = std::get<Arc>(p);
    return arc_point(a, a.start_angle + a.sweep);
}

double length(const Primitive &p)
{
    if (const auto *s = std::get_if<Segment>(&p))
        return distance(s->a, s->b);
    const auto &a = std::get<Arc>(p);
    return a.radius * std::abs(a.sweep);
}

Point tangent_at(const Primitive &p, double s)
{
    if (const auto *seg = std::get_if<Segment>(&p))
    {
        const Point d = seg->b - seg->a;
        return (1.0 / norm(d)) * d;
    }
    const auto &a = std::get<Arc>(p);
    const double dir = a.sweep >= 0.0 ? 1.0 : -1.0;
    const double theta = a.start_angle + dir * s / a.radius;
    return {-dir * std::sin(theta), dir * std::cos(theta)};
}

void Box::expand(const Box &o)
{
    min_x = std::min(min_x, o.min_x);
    min_y = std::min(min_y, o.min_y);
    max_x = std::max(max_x, o.max_x);
    max_y = std::max(max_y, o.max_y);
}

Box bounding_box(const Primitive &p)
{
    const Point a = start_point(p), b = end_point(p);
    Box box {std::min(a.x, b.x), std::min(a.y, b.y), std::max(a.x, b.x), std::max(a.y, b.y)};
    if (const auto *arc = std::get_if<Arc>(&p))
    {
        // axis extremes reached inside the sweep
        for (int q = 0; q < 4; q++)
        {
            const double theta = q * std::numbers::pi / 2.0;
            const Point e = arc_point(*arc, theta);
            if (arc_position(*arc, e, 0.0))
                box.expand({e.x, e.y, e.x, e.y});
        }
    }
    return box;
}

std::vector<Hit> intersect(const Primitive &first, const Primitive &second, double tol)
{
    if (const auto *s1 = std::get_if<Segment>(&first))
    {
        if (const auto *s2 = std::get_if<Segment>(&second))
            return segment_segment(*s1, *s2, tol);
        return segment_arc(*s1, std::get<Arc>(second), tol);
    }
    const auto &a1 = std::get<Arc>(first);
    if (const auto *s2 = std::get_if<Segment>(&second))
        return swapped(segment_arc(*s2, a1, tol));
    return arc_arc(a1, std::get<Arc>(second), tol);
}

double acute_angle_deg(Point u, Point v)
{
    const double c = std::abs(dot(u, v)) / (norm(u) * norm(v));
    return std::acos(std::clamp(c, 0.0, 1.0)) * 180.0 / std::numbers::pi;
}

} // namespace wgd
