#include "wgd/layout.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <tuple>

#include "wgd/error.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace wgd {

namespace {

// Hits closer than this on the same route pair are one geometric point
// (a crossing exactly on a primitive joint shows up once per primitive).
constexpr double kSamePointMm = 1e-6;
constexpr double kJointToleranceMm = 1e-5;

struct RouteIndex
{
    std::vector<double> offsets; // arc-length at the start of each primitive
    std::vector<Box> boxes;
    Box box {0, 0, 0, 0};
    double total = 0.0;
};

RouteIndex index_route(const Route &route)
{
    RouteIndex idx;
    double offset = 0.0;
    for (size_t k = 0; k < route.geometry.size(); k++)
    {
        const auto &p = route.geometry[k];
        idx.offsets.push_back(offset);
        idx.boxes.push_back(bounding_box(p));
        if (k == 0)
            idx.box = idx.boxes.back();
        else
            idx.box.expand(idx.boxes.back());
        offset += length(p);
    }
    idx.total = offset;
    return idx;
}

struct PairResult
{
    std::vector<CrossingRecord> records;
    std::vector<Degeneracy> degenerate;
};

// All contacts between two distinct routes, deduplicated per geometric point.
void intersect_routes(const Route &ra, const RouteIndex &ia, const Route &rb, const RouteIndex &ib, double tol,
                      PairResult &out)
{
    if (!ia.box.overlaps(ib.box, tol))
        return;

    const bool a_first = ra.id < rb.id;
    struct Contact
    {
        Point point;
        double pos_a, pos_b, angle;
        bool tangential;
    };
    std::vector<Contact> contacts;
    for (size_t p = 0; p < ra.geometry.size(); p++)
    {
        for (size_t q = 0; q < rb.geometry.size(); q++)
        {
            if (!ia.boxes[p].overlaps(ib.boxes[q], tol))
                continue;
            for (const auto &h : intersect(ra.geometry[p], rb.geometry[q], tol))
            {
                const Contact c {h.point, ia.offsets[p] + h.s_first, ib.offsets[q] + h.s_second, h.angle_deg,
                                 h.tangential};
                auto dup = std::find_if(contacts.begin(), contacts.end(), [&](const Contact &o) {
                    return distance(o.point, c.point) <= kSamePointMm;
                });
                if (dup == contacts.end())
                    contacts.push_back(c);
                else
                    dup->tangential = dup->tangential || c.tangential;
            }
        }
    }

    for (const auto &c : contacts)
    {
        const RouteId lo = a_first ? ra.id : rb.id;
        const RouteId hi = a_first ? rb.id : ra.id;
        const bool at_end_a = c.pos_a <= kSamePointMm || c.pos_a >= ia.total - kSamePointMm;
        const bool at_end_b = c.pos_b <= kSamePointMm || c.pos_b >= ib.total - kSamePointMm;
        if (c.tangential || at_end_a || at_end_b)
        {
            out.degenerate.push_back(
                {lo, hi, c.point, c.tangential ? "tangential contact" : "contact at a route terminal"});
            continue;
        }
        CrossingRecord r;
        r.route_a = lo;
        r.route_b = hi;
        r.point = c.point;
        r.angle_deg = c.angle;
        r.angle_class = classify_crossing_angle(c.angle);
        r.position_a_mm = a_first ? c.pos_a : c.pos_b;
        r.position_b_mm = a_first ? c.pos_b : c.pos_a;
        out.records.push_back(r);
    }
}

auto record_key(const CrossingRecord &r)
{
    return std::tie(r.route_a, r.route_b, r.position_a_mm, r.position_b_mm);
}

CrossingCount finish(const std::vector<Route> &routes, std::vector<PairResult> &parts)
{
    CrossingCount out;
    for (auto &p : parts)
    {
        out.records.insert(out.records.end(), p.records.begin(), p.records.end());
        out.degenerate.insert(out.degenerate.end(), p.degenerate.begin(), p.degenerate.end());
    }
    std::sort(out.records.begin(), out.records.end(),
              [](const CrossingRecord &a, const CrossingRecord &b) { return record_key(a) < record_key(b); });
    std::sort(out.degenerate.begin(), out.degenerate.end(), [](const Degeneracy &a, const Degeneracy &b) {
        return std::tie(a.route_a, a.route_b, a.point.x, a.point.y) <
               std::tie(b.route_a, b.route_b, b.point.x, b.point.y);
    });

    std::map<RouteId, size_t> slot;
    for (size_t i = 0; i < routes.size(); i++)
        slot[routes[i].id] = i;
    out.per_route.assign(routes.size(), 0);
    for (const auto &r : out.records)
    {
        out.per_route[slot.at(r.route_a)]++;
        out.per_route[slot.at(r.route_b)]++;
    }
    return out;
}

void check_unique_ids(const std::vector<Route> &routes)
{
    std::vector<RouteId> ids;
    for (const auto &r : routes)
        ids.push_back(r.id);
    std::sort(ids.begin(), ids.end());
    if (std::adjacent_find(ids.begin(), ids.end()) != ids.end())
        throw ArgumentError("duplicate route id in layout");
}

} // namespace

std::string to_string(const RouteId &id)
{
    return std::to_string(id.source) + "->" + std::to_string(id.dest);
}

double Route::length_mm() const
{
    double total = 0.0;
    for (const auto &p : geometry)
        total += length(p);
    return total;
}

void BoardSpec::validate(std::size_t n_cards) const
{
    if (!(width_mm > 0.0) || !(height_mm > 0.0) || !(card_pitch_mm > 0.0) || !(margin_mm > 0.0))
        throw ArgumentError("board dimensions, card pitch and margin must be positive");
    if (static_cast<double>(n_cards) * card_pitch_mm + 2.0 * margin_mm > width_mm + 1e-9)
        throw GeometryError("board width " + std::to_string(width_mm) + " mm cannot hold " +
                            std::to_string(n_cards) + " cards at pitch " + std::to_string(card_pitch_mm) +
                            " mm plus margins");
}

void ShuffleSpec::validate() const
{
    if (n_cards < 1)
        throw ArgumentError("shuffle needs at least one card");
    if (!(bend_radius_mm > 0.0) || !(waveguide_pitch_mm > 0.0) || !(clearance_mm > 0.0))
        throw ArgumentError("bend radius, waveguide pitch and clearance must be positive");
}

double ShuffleSpec::min_card_pitch_mm() const
{
    return bend_radius_mm + static_cast<double>(n_cards - 1) * waveguide_pitch_mm + clearance_mm;
}

namespace {

// Port ordering of the generated shuffle.
//
// Card s owns ports at x = margin + s*pitch + j*wg_pitch with j = destination.
// The port for destination d sits at nesting depth k = n-1-d: the rightmost
// port turns highest. Depth k of card s turns in row k + shift(s) where the
// right half of the cards is lifted by one row; the card 0 -> card n-1 route
// gets a row of its own above all others, so it crosses every route of every
// other card. Within a row, lower-numbered cards turn lower.
struct ShufflePlan
{
    size_t n;
    std::vector<int> row; // normalized row per (s, d), s*n + d
    int rows;
};

ShufflePlan plan_shuffle(size_t n)
{
    ShufflePlan plan {n, std::vector<int>(n * n), 0};
    const size_t lifted_from = n - n / 2;
    const int own_row = -2;
    int lo = own_row, hi = own_row;
    std::vector<int> raw(n * n);
    for (size_t s = 0; s < n; s++)
    {
        for (size_t d = 0; d < n; d++)
        {
            const int depth = static_cast<int>(n - 1 - d);
            int r = depth - (s >= lifted_from && n > 1 ? 1 : 0);
            if (s == 0 && depth == 0)
                r = own_row;
            raw[s * n + d] = r;
            lo = std::min(lo, r);
            hi = std::max(hi, r);
        }
    }
    // compress to consecutive row indices, top row = 0
    std::vector<int> used;
    for (int r : raw)
        used.push_back(r);
    std::sort(used.begin(), used.end());
    used.erase(std::unique(used.begin(), used.end()), used.end());
    for (size_t i = 0; i < raw.size(); i++)
        plan.row[i] = static_cast<int>(std::lower_bound(used.begin(), used.end(), raw[i]) - used.begin());
    plan.rows = static_cast<int>(used.size());
    return plan;
}

double row_pitch(const ShuffleSpec &spec)
{
    return spec.bend_radius_mm + static_cast<double>(spec.n_cards - 1) * spec.waveguide_pitch_mm +
           spec.clearance_mm;
}

double geometry_height(const ShuffleSpec &spec, int rows)
{
    return spec.bend_radius_mm + spec.clearance_mm + (rows - 1) * row_pitch(spec) +
           static_cast<double>(spec.n_cards - 1) * spec.waveguide_pitch_mm;
}

double geometry_width(const ShuffleSpec &spec, double card_pitch)
{
    const auto n = static_cast<double>(spec.n_cards);
    return (n - 1) * card_pitch + (n - 1) * spec.waveguide_pitch_mm + spec.bend_radius_mm + spec.clearance_mm;
}

} // namespace

BoardSpec compact_board(const ShuffleSpec &spec, double margin_mm)
{
    spec.validate();
    const auto plan = plan_shuffle(spec.n_cards);
    BoardSpec board;
    board.margin_mm = margin_mm;
    board.card_pitch_mm = spec.min_card_pitch_mm();
    board.width_mm = geometry_width(spec, board.card_pitch_mm) + 2.0 * margin_mm;
    board.height_mm = geometry_height(spec, plan.rows) + 2.0 * margin_mm;
    return board;
}

Layout generate_shuffle(const ShuffleSpec &spec, const BoardSpec &board)
{
    spec.validate();
    board.validate(spec.n_cards);
    const size_t n = spec.n_cards;
    const double R = spec.bend_radius_mm;
    const double p = spec.waveguide_pitch_mm;
    const double m = board.margin_mm;

    if (n > 1 && board.card_pitch_mm < spec.min_card_pitch_mm() - 1e-9)
        throw GeometryError("bend radius " + std::to_string(R) + " mm too large for card pitch " +
                            std::to_string(board.card_pitch_mm) + " mm: crossing routes need card pitch >= " +
                            std::to_string(spec.min_card_pitch_mm()) + " mm");

    const auto plan = plan_shuffle(n);
    const double width = geometry_width(spec, board.card_pitch_mm) + 2.0 * m;
    const double height = geometry_height(spec, plan.rows) + 2.0 * m;
    if (width > board.width_mm + 1e-9)
        throw GeometryError("layout width " + std::to_string(width) + " mm exceeds board width " +
                            std::to_string(board.width_mm) + " mm at bend radius " + std::to_string(R) + " mm");
    if (height > board.height_mm + 1e-9)
        throw GeometryError("layout height " + std::to_string(height) + " mm exceeds board height " +
                            std::to_string(board.height_mm) + " mm at bend radius " + std::to_string(R) + " mm");

    const double top = height - m;
    const double x_end = m + geometry_width(spec, board.card_pitch_mm);
    const double pitch_rows = row_pitch(spec);

    Layout layout;
    layout.margin_mm = m;
    for (size_t s = 0; s < n; s++)
    {
        for (size_t d = 0; d < n; d++)
        {
            const double x = m + static_cast<double>(s) * board.card_pitch_mm + static_cast<double>(d) * p;
            const double y = top - R - spec.clearance_mm - plan.row[s * n + d] * pitch_rows -
                             static_cast<double>(n - 1 - s) * p;
            Route route;
            route.id = {static_cast<int>(s), static_cast<int>(d)};
            route.geometry.push_back(Segment {{x, top}, {x, y + R}});
            route.geometry.push_back(Arc {{x + R, y + R}, R, std::numbers::pi, std::numbers::pi / 2.0});
            route.geometry.push_back(Segment {{x + R, y}, {x_end, y}});
            layout.routes.push_back(std::move(route));
        }
    }

    layout.metadata["topology"] = "corner-crossbar";
    layout.metadata["port_order"] =
        "source cards left to right on the top edge; within a card ports ascend by destination";
    layout.metadata["row_tuning"] =
        "route (s,d) turns in row (n-1-d) - [s >= n - n/2]; route 0->n-1 has its own top row";
    layout.metadata["rows"] = std::to_string(plan.rows);
    layout.metadata["bend_radius_mm"] = std::to_string(R);
    layout.metadata["card_pitch_mm"] = std::to_string(board.card_pitch_mm);
    layout.metadata["waveguide_pitch_mm"] = std::to_string(p);

    refresh_crossings(layout);
    return layout;
}

CrossingCount count_crossings_serial(const std::vector<Route> &routes, double tol)
{
    check_unique_ids(routes);
    std::vector<RouteIndex> idx;
    for (const auto &r : routes)
        idx.push_back(index_route(r));
    std::vector<PairResult> parts(routes.size());
    for (size_t i = 0; i < routes.size(); i++)
        for (size_t j = i + 1; j < routes.size(); j++)
            intersect_routes(routes[i], idx[i], routes[j], idx[j], tol, parts[i]);
    return finish(routes, parts);
}

CrossingCount count_crossings(const std::vector<Route> &routes, double tol)
{
    check_unique_ids(routes);
    const auto n = static_cast<std::ptrdiff_t>(routes.size());
    std::vector<RouteIndex> idx(routes.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; i++)
        idx[i] = index_route(routes[i]);

    // one bucket per outer route keeps the merge order schedule-independent
    std::vector<PairResult> parts(routes.size());
#pragma omp parallel for schedule(dynamic, 4)
    for (std::ptrdiff_t i = 0; i < n; i++)
        for (std::ptrdiff_t j = i + 1; j < n; j++)
            intersect_routes(routes[i], idx[i], routes[j], idx[j], tol, parts[i]);
    return finish(routes, parts);
}

std::vector<PathElement> derive_events(const Route &route, const std::vector<CrossingRecord> &crossings)
{
    struct Mark
    {
        double pos;
        Crossing crossing;
    };
    std::vector<Mark> marks;
    for (const auto &r : crossings)
    {
        if (r.route_a == route.id)
            marks.push_back({r.position_a_mm, {r.angle_class, r.angle_deg, r.route_b}});
        else if (r.route_b == route.id)
            marks.push_back({r.position_b_mm, {r.angle_class, r.angle_deg, r.route_a}});
    }
    std::stable_sort(marks.begin(), marks.end(), [](const Mark &a, const Mark &b) { return a.pos < b.pos; });

    std::vector<PathElement> events;
    size_t next = 0;
    double offset = 0.0;
    for (size_t k = 0; k < route.geometry.size(); k++)
    {
        const auto &prim = route.geometry[k];
        const double len = length(prim);
        const bool last = k + 1 == route.geometry.size();
        auto inside = [&](double pos) { return last ? pos <= offset + len + kSamePointMm : pos < offset + len; };

        if (const auto *arc = std::get_if<Arc>(&prim))
        {
            events.emplace_back(Bend {arc->radius, std::abs(arc->sweep) * 180.0 / std::numbers::pi});
            while (next < marks.size() && inside(marks[next].pos))
                events.emplace_back(marks[next++].crossing);
        }
        else
        {
            double cursor = offset;
            while (next < marks.size() && inside(marks[next].pos))
            {
                if (marks[next].pos - cursor > kSamePointMm)
                    events.emplace_back(Straight {(marks[next].pos - cursor) / 10.0});
                cursor = std::max(cursor, marks[next].pos);
                events.emplace_back(marks[next++].crossing);
            }
            if (offset + len - cursor > kSamePointMm)
                events.emplace_back(Straight {(offset + len - cursor) / 10.0});
        }
        offset += len;
    }
    return events;
}

void refresh_crossings(Layout &layout)
{
    auto count = count_crossings(layout.routes);
    layout.crossings = std::move(count.records);
    layout.degenerate = std::move(count.degenerate);
    for (auto &r : layout.routes)
        r.events = derive_events(r, layout.crossings);
}

void validate_route(const Route &route, double tol)
{
    const auto name = to_string(route.id);
    if (route.geometry.empty())
        throw GeometryError("route " + name + " has no geometry");
    for (size_t k = 0; k < route.geometry.size(); k++)
    {
        const auto &p = route.geometry[k];
        if (!(length(p) > 0.0))
            throw GeometryError("route " + name + ": zero-length primitive " + std::to_string(k));
        if (const auto *arc = std::get_if<Arc>(&p); arc && !(arc->radius > 0.0))
            throw GeometryError("route " + name + ": arc radius must be positive");
        if (k > 0 && distance(end_point(route.geometry[k - 1]), start_point(p)) > kJointToleranceMm)
            throw GeometryError("route " + name + ": primitive " + std::to_string(k) +
                                " does not start where the previous one ends");
    }
    for (size_t a = 0; a < route.geometry.size(); a++)
    {
        for (size_t b = a + 1; b < route.geometry.size(); b++)
        {
            for (const auto &h : intersect(route.geometry[a], route.geometry[b], tol))
            {
                const bool joint = b == a + 1 && distance(h.point, end_point(route.geometry[a])) <= kJointToleranceMm;
                if (!joint)
                    throw GeometryError("route " + name + " intersects itself");
            }
        }
    }
}

BoundingBox bounding_box_area(const Layout &layout)
{
    bool any = false;
    Box box {0, 0, 0, 0};
    for (const auto &r : layout.routes)
    {
        for (const auto &p : r.geometry)
        {
            if (!any)
                box = bounding_box(p);
            else
                box.expand(bounding_box(p));
            any = true;
        }
    }
    if (!any)
        throw ArgumentError("bounding box of an empty layout");
    const double w = box.max_x - box.min_x + 2.0 * layout.margin_mm;
    const double h = box.max_y - box.min_y + 2.0 * layout.margin_mm;
    return {w, h, w * h};
}

RouteStats route_stats(const Route &route)
{
    RouteStats s;
    for (const auto &e : route.events)
    {
        if (const auto *c = std::get_if<Crossing>(&e))
        {
            s.crossings++;
            (c->angle_class == AngleClass::DEG90 ? s.crossings_deg90 : s.crossings_deg45)++;
        }
        else if (std::holds_alternative<Bend>(e))
            s.bends++;
    }
    s.length_mm = route.length_mm();
    return s;
}

LayoutStats layout_stats(const Layout &layout)
{
    LayoutStats st;
    st.routes = layout.routes.size();
    st.crossings = layout.crossings.size();
    st.degenerate = layout.degenerate.size();
    bool first = true;
    for (const auto &r : layout.routes)
    {
        const auto rs = route_stats(r);
        st.bends += rs.bends;
        if (first || rs.crossings > st.worst_route_crossings)
        {
            st.worst_route_crossings = rs.crossings;
            st.worst_route = r.id;
            st.worst_route_bends = rs.bends;
            first = false;
        }
    }
    return st;
}

Layout random_layout(std::uint64_t seed, const RandomLayoutSpec &spec)
{
    if (spec.routes == 0 || spec.max_primitives == 0 || !(spec.extent_mm > 0.0))
        throw ArgumentError("random layout needs routes, primitives and a positive extent");
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double e = spec.extent_mm;

    Layout layout;
    layout.margin_mm = 1.0;
    layout.metadata["generator"] = "random";
    layout.metadata["seed"] = std::to_string(seed);
    for (size_t i = 0; i < spec.routes; i++)
    {
        Route r;
        r.id = {static_cast<int>(i), 0};
        while (true)
        {
            r.geometry.clear();
            Point at {unit(rng) * e, unit(rng) * e};
            double heading = unit(rng) * 2.0 * std::numbers::pi;
            const auto count = 1 + static_cast<size_t>(unit(rng) * static_cast<double>(spec.max_primitives)) %
                                       spec.max_primitives;
            for (size_t k = 0; k < count; k++)
            {
                if (unit(rng) < spec.arc_probability)
                {
                    const double radius = 0.05 * e + unit(rng) * 0.2 * e;
                    const double turn = (unit(rng) < 0.5 ? -1.0 : 1.0) * (0.25 + unit(rng) * 1.75);
                    const double side = turn > 0.0 ? 1.0 : -1.0; // centre to the left for counter-clockwise
                    const Point centre {at.x - side * radius * std::sin(heading), at.y + side * radius * std::cos(heading)};
                    const double start = std::atan2(at.y - centre.y, at.x - centre.x);
                    r.geometry.push_back(Arc {centre, radius, start, turn});
                    at = end_point(r.geometry.back());
                    heading += turn;
                }
                else
                {
                    const double len = 0.05 * e + unit(rng) * 0.4 * e;
                    const Point next {at.x + len * std::cos(heading), at.y + len * std::sin(heading)};
                    r.geometry.push_back(Segment {at, next});
                    at = next;
                }
            }
            try
            {
                validate_route(r);
                break;
            }
            catch (const GeometryError &)
            {
                // self-intersecting draw, try again from the same stream
            }
        }
        layout.routes.push_back(std::move(r));
    }
    refresh_crossings(layout);
    return layout;
}

} // namespace wgd
