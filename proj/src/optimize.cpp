#include "wgd/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <set>

#include "wgd/error.hpp"

namespace wgd {

void Constraints::validate() const
{
    if (max_board_side_mm && !(*max_board_side_mm > 0.0))
        throw ArgumentError("max_board_side_mm must be positive");
    if (bitrate_gbps && !(*bitrate_gbps > 0.0))
        throw ArgumentError("bitrate_gbps must be positive");
    if (!(bandwidth_factor > 0.0))
        throw ArgumentError("bandwidth_factor must be positive");
    if (!(bend_loss_budget_db > 0.0))
        throw ArgumentError("bend_loss_budget_db must be positive");
}

std::string_view to_string(Reason reason)
{
    switch (reason)
    {
    case Reason::bend_budget: return "bend-budget";
    case Reason::below_radius_floor: return "below-radius-floor";
    case Reason::radius_out_of_range: return "radius-out-of-range";
    case Reason::bandwidth: return "bandwidth";
    case Reason::bandwidth_unknown: return "bandwidth-unknown";
    case Reason::board_size: return "board-size";
    case Reason::geometry: return "geometry";
    }
    return "unknown";
}

std::string_view to_string(SelectionPolicy policy)
{
    return policy == SelectionPolicy::all_feasible ? "all-feasible" : "minimal-radius-per-profile";
}

SelectionPolicy parse_selection_policy(std::string_view name)
{
    if (name == "all-feasible")
        return SelectionPolicy::all_feasible;
    if (name == "minimal-radius-per-profile")
        return SelectionPolicy::minimal_radius_per_profile;
    throw ArgumentError("unknown selection policy '" + std::string(name) +
                        "' (expected minimal-radius-per-profile or all-feasible)");
}

namespace {

struct Geometry
{
    std::optional<Layout> layout;
    BoundingBox box {0, 0, 0};
    std::string error;
};

void mark(DesignPoint &p, Reason r, std::string detail)
{
    p.reasons.push_back(r);
    p.details.push_back(std::move(detail));
}

DesignPoint evaluate(const WaveguideProfile &profile, double radius, const Geometry &geo,
                     const Constraints &c, const ModeFilterTable *filter)
{
    DesignPoint p;
    p.profile = profile.name;
    p.bend_radius_mm = radius;
    p.launch = c.launch;

    const auto &curve = profile.curve(c.launch);
    (void)profile.coupling(c.launch); // missing coefficients are an input error, not infeasibility

    const bool in_range = radius >= curve.min_radius() - 1e-12 && radius <= curve.max_radius() + 1e-12;
    if (!in_range)
        mark(p, Reason::radius_out_of_range,
             "radius " + std::to_string(radius) + " mm outside the bend curve [" + std::to_string(curve.min_radius()) +
                 ", " + std::to_string(curve.max_radius()) + "] mm");

    try
    {
        const double rule = min_bend_radius(curve, c.bend_loss_budget_db);
        if (radius <= rule + 1e-9)
            mark(p, Reason::bend_budget,
                 "bend loss budget " + std::to_string(c.bend_loss_budget_db) + " dB needs radius > " +
                     std::to_string(rule) + " mm");
    }
    catch (const InfeasibleError &e)
    {
        mark(p, Reason::bend_budget, e.what());
    }

    if (radius < profile.radius_floor_mm - 1e-12)
        mark(p, Reason::below_radius_floor,
             "profile floor is " + std::to_string(profile.radius_floor_mm) + " mm");

    if (!geo.layout)
    {
        mark(p, Reason::geometry, geo.error);
    }
    else
    {
        p.board_width_mm = geo.box.width_mm;
        p.board_height_mm = geo.box.height_mm;
        p.board_area_mm2 = geo.box.area_mm2;
        if (c.max_board_side_mm && std::max(p.board_width_mm, p.board_height_mm) > *c.max_board_side_mm + 1e-9)
            mark(p, Reason::board_size,
                 "board side " + std::to_string(std::max(p.board_width_mm, p.board_height_mm)) + " mm exceeds cap " +
                     std::to_string(*c.max_board_side_mm) + " mm");

        if (in_range)
        {
            auto wc = worst_case_path(*geo.layout, profile, c.launch, filter);
            p.worst_case_loss_db = wc.budget.total_db;
            for (const auto &b : wc.ranking)
                if (b.bandwidth_ghz)
                    p.worst_case_bandwidth_ghz = std::min(p.worst_case_bandwidth_ghz.value_or(*b.bandwidth_ghz),
                                                          *b.bandwidth_ghz);
            p.worst_case = std::move(wc.budget);
        }
    }

    if (c.bitrate_gbps && p.worst_case_loss_db)
    {
        const double need = required_bandwidth_ghz(*c.bitrate_gbps, c.bandwidth_factor);
        if (!p.worst_case_bandwidth_ghz)
            mark(p, Reason::bandwidth_unknown,
                 "no bandwidth-length product for launch " + std::string(to_string(c.launch)));
        else if (*p.worst_case_bandwidth_ghz < need)
            mark(p, Reason::bandwidth,
                 "worst-case bandwidth " + std::to_string(*p.worst_case_bandwidth_ghz) + " GHz below required " +
                     std::to_string(need) + " GHz");
    }

    p.feasible = p.reasons.empty();
    return p;
}

} // namespace

std::vector<DesignPoint> enumerate_designs(const DesignSpace &space, const std::vector<WaveguideProfile> &profiles,
                                           const Constraints &constraints)
{
    constraints.validate();
    if (space.radii_mm.empty())
        throw ArgumentError("empty bend-radius grid");
    if (profiles.empty())
        throw ArgumentError("no waveguide profiles to evaluate");
    for (double r : space.radii_mm)
        if (!(r > 0.0))
            throw ArgumentError("bend radii must be positive");

    std::vector<double> radii = space.radii_mm;
    std::sort(radii.begin(), radii.end());
    radii.erase(std::unique(radii.begin(), radii.end()), radii.end());

    std::vector<const WaveguideProfile *> order;
    std::set<std::string> names;
    for (const auto &p : profiles)
    {
        if (!names.insert(p.name).second)
            throw ArgumentError("duplicate profile name '" + p.name + "'");
        order.push_back(&p);
    }
    std::sort(order.begin(), order.end(), [](auto *a, auto *b) { return a->name < b->name; });

    const auto nr = static_cast<std::ptrdiff_t>(radii.size());
    std::vector<Geometry> geos(radii.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t i = 0; i < nr; i++)
    {
        ShuffleSpec spec = space.shuffle;
        spec.bend_radius_mm = radii[i];
        try
        {
            geos[i].layout = generate_shuffle(spec, compact_board(spec, space.margin_mm));
            geos[i].box = bounding_box_area(*geos[i].layout);
        }
        catch (const GeometryError &e)
        {
            geos[i].error = e.what();
        }
    }

    const auto np = static_cast<std::ptrdiff_t>(order.size());
    std::vector<DesignPoint> points(order.size() * radii.size());
    std::vector<std::exception_ptr> errors(points.size());
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t k = 0; k < np * nr; k++)
    {
        try
        {
            points[k] = evaluate(*order[k / nr], radii[k % nr], geos[k % nr], constraints, space.filter);
        }
        catch (...)
        {
            errors[k] = std::current_exception();
        }
    }
    for (auto &e : errors)
        if (e)
            std::rethrow_exception(e);
    return points;
}

bool better_design(const DesignPoint &a, const DesignPoint &b)
{
    const double la = a.worst_case_loss_db.value_or(INFINITY);
    const double lb = b.worst_case_loss_db.value_or(INFINITY);
    if (la != lb)
        return la < lb;
    if (a.board_area_mm2 != b.board_area_mm2)
        return a.board_area_mm2 < b.board_area_mm2;
    const double ba = a.worst_case_bandwidth_ghz.value_or(-INFINITY);
    const double bb = b.worst_case_bandwidth_ghz.value_or(-INFINITY);
    if (ba != bb)
        return ba > bb;
    return a.profile < b.profile;
}

OptimizeResult optimize(const std::vector<DesignPoint> &points, SelectionPolicy policy)
{
    if (points.empty())
        throw ArgumentError("optimize needs at least one design point");

    OptimizeResult out;
    out.points = points.size();
    std::vector<const DesignPoint *> feasible;
    for (const auto &p : points)
    {
        if (p.feasible)
            feasible.push_back(&p);
        else
            for (auto r : p.reasons)
                out.infeasible_by_reason[r]++;
    }
    // canonical order makes the result independent of input order
    std::stable_sort(feasible.begin(), feasible.end(), [](auto *a, auto *b) {
        return std::tie(a->profile, a->bend_radius_mm) < std::tie(b->profile, b->bend_radius_mm);
    });

    for (size_t i = 0; i < feasible.size(); i++)
    {
        const bool first_of_profile = i == 0 || feasible[i - 1]->profile != feasible[i]->profile;
        if (policy == SelectionPolicy::all_feasible || first_of_profile)
            out.candidates.push_back(*feasible[i]);
    }

    for (const auto &c : out.candidates)
        if (!out.best || better_design(c, *out.best))
            out.best = c;
    return out;
}

AreaSavings area_savings(const DesignPoint &a, const DesignPoint &b)
{
    if (!(a.board_area_mm2 > 0.0) || !(b.board_area_mm2 > 0.0) || !(a.board_width_mm > 0.0) ||
        !(a.board_height_mm > 0.0))
        throw ArgumentError("area savings need two designs with non-zero board area");
    return {1.0 - b.board_width_mm / a.board_width_mm, 1.0 - b.board_height_mm / a.board_height_mm,
            1.0 - b.board_area_mm2 / a.board_area_mm2};
}

} // namespace wgd
