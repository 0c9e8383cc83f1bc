#pragma once

// Brute-force crossing counter used as a test oracle. It works from the raw
// primitive coordinates with its own closed-form intersection code and does
// not call the library's geometry kernel.

#include <cmath>
#include <numbers>
#include <vector>

#include "wgd/layout.hpp"

namespace wgd::test {

struct OraclePoint
{
    double x, y;
    bool tangential;
};

inline bool angle_in_sweep(const Arc &a, double theta)
{
    const double two_pi = 2 * std::numbers::pi;
    double rel = theta - a.start_angle;
    if (a.sweep < 0)
        rel = -rel;
    rel = std::fmod(rel, two_pi);
    if (rel < 0)
        rel += two_pi;
    const double span = std::abs(a.sweep);
    const double eps = 1e-12;
    return rel <= span + eps || rel >= two_pi - eps;
}

inline bool on_arc(const Arc &a, double x, double y)
{
    return angle_in_sweep(a, std::atan2(y - a.center.y, x - a.center.x));
}

inline void seg_seg(const Segment &s, const Segment &t, std::vector<OraclePoint> &out)
{
    const double rx = s.b.x - s.a.x, ry = s.b.y - s.a.y;
    const double qx = t.b.x - t.a.x, qy = t.b.y - t.a.y;
    const double den = rx * qy - ry * qx;
    const double wx = t.a.x - s.a.x, wy = t.a.y - s.a.y;
    if (std::abs(den) < 1e-12 * std::hypot(rx, ry) * std::hypot(qx, qy))
    {
        // parallel: only a collinear overlap can touch
        if (std::abs(wx * ry - wy * rx) < 1e-9 * std::hypot(rx, ry))
        {
            const double len2 = rx * rx + ry * ry;
            const double t0 = (wx * rx + wy * ry) / len2;
            const double t1 = ((t.b.x - s.a.x) * rx + (t.b.y - s.a.y) * ry) / len2;
            const double lo = std::max(0.0, std::min(t0, t1)), hi = std::min(1.0, std::max(t0, t1));
            if (lo <= hi + 1e-12)
                out.push_back({s.a.x + lo * rx, s.a.y + lo * ry, true});
        }
        return;
    }
    const double u = (wx * qy - wy * qx) / den;
    const double v = (wx * ry - wy * rx) / den;
    const double e = 1e-12;
    if (u >= -e && u <= 1 + e && v >= -e && v <= 1 + e)
        out.push_back({s.a.x + u * rx, s.a.y + u * ry, false});
}

inline void seg_arc(const Segment &s, const Arc &a, std::vector<OraclePoint> &out)
{
    const double dx = s.b.x - s.a.x, dy = s.b.y - s.a.y;
    const double fx = s.a.x - a.center.x, fy = s.a.y - a.center.y;
    const double A = dx * dx + dy * dy;
    const double B = 2 * (fx * dx + fy * dy);
    const double C = fx * fx + fy * fy - a.radius * a.radius;
    const double disc = B * B - 4 * A * C;
    // distance from centre to the carrier line, for a scale-free tangency test
    const double dist = std::abs(fx * dy - fy * dx) / std::sqrt(A);
    if (std::abs(dist - a.radius) < 1e-9)
    {
        const double u = -B / (2 * A);
        if (u >= -1e-12 && u <= 1 + 1e-12)
        {
            const double x = s.a.x + u * dx, y = s.a.y + u * dy;
            if (on_arc(a, x, y))
                out.push_back({x, y, true});
        }
        return;
    }
    if (disc < 0)
        return;
    const double r = std::sqrt(disc);
    for (double u : {(-B - r) / (2 * A), (-B + r) / (2 * A)})
    {
        if (u < -1e-12 || u > 1 + 1e-12)
            continue;
        const double x = s.a.x + u * dx, y = s.a.y + u * dy;
        if (on_arc(a, x, y))
            out.push_back({x, y, false});
    }
}

inline void arc_arc(const Arc &p, const Arc &q, std::vector<OraclePoint> &out)
{
    const double dx = q.center.x - p.center.x, dy = q.center.y - p.center.y;
    const double d = std::hypot(dx, dy);
    if (d < 1e-12)
    {
        if (std::abs(p.radius - q.radius) < 1e-9)
            out.push_back({p.center.x + p.radius, p.center.y, true}); // concentric overlap, flagged only
        return;
    }
    if (d > p.radius + q.radius + 1e-9 || d < std::abs(p.radius - q.radius) - 1e-9)
        return;
    const bool touching = std::abs(d - (p.radius + q.radius)) < 1e-9 || std::abs(d - std::abs(p.radius - q.radius)) < 1e-9;
    const double a = (p.radius * p.radius - q.radius * q.radius + d * d) / (2 * d);
    const double h = std::sqrt(std::max(0.0, p.radius * p.radius - a * a));
    const double mx = p.center.x + a * dx / d, my = p.center.y + a * dy / d;
    if (touching)
    {
        if (on_arc(p, mx, my) && on_arc(q, mx, my))
            out.push_back({mx, my, true});
        return;
    }
    for (double sgn : {-1.0, 1.0})
    {
        const double x = mx + sgn * h * (-dy) / d, y = my + sgn * h * dx / d;
        if (on_arc(p, x, y) && on_arc(q, x, y))
            out.push_back({x, y, false});
    }
}

inline void contacts(const Primitive &p, const Primitive &q, std::vector<OraclePoint> &out)
{
    if (auto s = std::get_if<Segment>(&p))
    {
        if (auto t = std::get_if<Segment>(&q))
            seg_seg(*s, *t, out);
        else
            seg_arc(*s, std::get<Arc>(q), out);
    }
    else if (auto t = std::get_if<Segment>(&q))
        seg_arc(*t, std::get<Arc>(p), out);
    else
        arc_arc(std::get<Arc>(p), std::get<Arc>(q), out);
}

inline OraclePoint route_start(const Route &r)
{
    const auto &p = r.geometry.front();
    if (auto s = std::get_if<Segment>(&p))
        return {s->a.x, s->a.y, false};
    const auto &a = std::get<Arc>(p);
    return {a.center.x + a.radius * std::cos(a.start_angle), a.center.y + a.radius * std::sin(a.start_angle), false};
}

inline OraclePoint route_end(const Route &r)
{
    const auto &p = r.geometry.back();
    if (auto s = std::get_if<Segment>(&p))
        return {s->b.x, s->b.y, false};
    const auto &a = std::get<Arc>(p);
    const double t = a.start_angle + a.sweep;
    return {a.center.x + a.radius * std::cos(t), a.center.y + a.radius * std::sin(t), false};
}

struct OracleCrossing
{
    std::size_t route_a, route_b; // indices into the route vector
    double x, y;
};

/// Transversal crossings between distinct routes, one per geometric point;
/// tangencies and contacts at route end points are left out.
inline std::vector<OracleCrossing> brute_force_crossings(const std::vector<Route> &routes)
{
    const double same = 1e-6;
    std::vector<OracleCrossing> out;
    for (std::size_t i = 0; i < routes.size(); i++)
        for (std::size_t j = i + 1; j < routes.size(); j++)
        {
            std::vector<OraclePoint> pts;
            for (const auto &p : routes[i].geometry)
                for (const auto &q : routes[j].geometry)
                    contacts(p, q, pts);
            std::vector<OraclePoint> merged;
            for (const auto &c : pts)
            {
                bool dup = false;
                for (auto &m : merged)
                    if (std::hypot(m.x - c.x, m.y - c.y) <= same)
                    {
                        m.tangential = m.tangential || c.tangential;
                        dup = true;
                    }
                if (!dup)
                    merged.push_back(c);
            }
            const OraclePoint ends[] {route_start(routes[i]), route_end(routes[i]), route_start(routes[j]),
                                      route_end(routes[j])};
            for (const auto &m : merged)
            {
                if (m.tangential)
                    continue;
                bool at_end = false;
                for (const auto &e : ends)
                    at_end = at_end || std::hypot(e.x - m.x, e.y - m.y) <= same;
                if (!at_end)
                    out.push_back({i, j, m.x, m.y});
            }
        }
    return out;
}

} // namespace wgd::test
