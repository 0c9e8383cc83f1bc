#include "wgd/budget.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <numbers>
#include <tuple>

#include "wgd/error.hpp"

namespace wgd {

double LossBreakdown::path_dependent_db() const
{
    return propagation_db + bend_excess_db + crossing_deg90_db + crossing_deg45_db;
}

double LossBreakdown::total_db() const { return coupling_db + path_dependent_db(); }

void ModeFilterTable::set(Launch launch, Grid grid)
{
    const auto nr = grid.radius_upper_mm.size();
    const auto nc = grid.crossings_from.size();
    if (nr == 0 || nc == 0 || grid.factor.size() != nr)
        throw ArgumentError("mode-filter table needs at least one radius and one crossing bucket");
    if (!std::is_sorted(grid.radius_upper_mm.begin(), grid.radius_upper_mm.end()) ||
        std::adjacent_find(grid.radius_upper_mm.begin(), grid.radius_upper_mm.end()) != grid.radius_upper_mm.end())
        throw ArgumentError("mode-filter radius buckets must be strictly ascending");
    if (!std::is_sorted(grid.crossings_from.begin(), grid.crossings_from.end()) ||
        std::adjacent_find(grid.crossings_from.begin(), grid.crossings_from.end()) != grid.crossings_from.end())
        throw ArgumentError("mode-filter crossing buckets must be strictly ascending");
    for (size_t i = 0; i < nr; i++)
    {
        if (grid.factor[i].size() != nc)
            throw ArgumentError("mode-filter factor row " + std::to_string(i) + " has the wrong length");
        for (size_t j = 0; j < nc; j++)
        {
            const double f = grid.factor[i][j];
            if (!(f >= 1.0))
                throw ArgumentError("mode-filter factors must be >= 1");
            if (j > 0 && f < grid.factor[i][j - 1])
                throw ArgumentError("mode-filter factors must not decrease with crossing count");
            if (i > 0 && grid.factor[i - 1][j] < f)
                throw ArgumentError("mode-filter factors must not decrease as radius decreases");
        }
    }
    grids_[launch] = std::move(grid);
}

double ModeFilterTable::factor(Launch launch, std::optional<double> min_bend_radius_mm, std::size_t crossings) const
{
    auto it = grids_.find(launch);
    if (it == grids_.end())
        return 1.0;
    const auto &g = it->second;
    const double r = min_bend_radius_mm.value_or(std::numeric_limits<double>::infinity());
    auto ri = std::find_if(g.radius_upper_mm.begin(), g.radius_upper_mm.end(), [&](double ub) { return r <= ub; });
    if (ri == g.radius_upper_mm.end())
        return 1.0;
    auto ci = std::upper_bound(g.crossings_from.begin(), g.crossings_from.end(), crossings);
    if (ci == g.crossings_from.begin())
        return 1.0;
    return g.factor[ri - g.radius_upper_mm.begin()][(ci - g.crossings_from.begin()) - 1];
}

double event_length_cm(const std::vector<PathElement> &events)
{
    double cm = 0.0;
    for (const auto &e : events)
    {
        if (const auto *s = std::get_if<Straight>(&e))
            cm += s->length_cm;
        else if (const auto *b = std::get_if<Bend>(&e))
            cm += b->radius_mm * b->angle_deg * std::numbers::pi / 180.0 / 10.0;
    }
    return cm;
}

double bend_event_loss(const BendLossCurve &curve, const Bend &bend)
{
    return bend_excess_loss(curve, bend.radius_mm) * std::max(1.0, bend.angle_deg / 90.0);
}

namespace {

struct PathCounts
{
    std::size_t bends = 0;
    std::size_t deg90 = 0;
    std::size_t deg45 = 0;
    std::optional<double> min_radius;
};

PathCounts count_events(const std::vector<PathElement> &events)
{
    PathCounts c;
    for (const auto &e : events)
    {
        if (const auto *b = std::get_if<Bend>(&e))
        {
            c.bends++;
            c.min_radius = std::min(c.min_radius.value_or(b->radius_mm), b->radius_mm);
        }
        else if (const auto *x = std::get_if<Crossing>(&e))
            (x->angle_class == AngleClass::DEG90 ? c.deg90 : c.deg45)++;
    }
    return c;
}

void add_provenance_flags(const WaveguideProfile &profile, Launch launch, std::vector<std::string> &flags)
{
    for (const char *field : {"coupling_loss_db", "reference_insertion_loss_db", "bend_curve", "blp_ghz_m"})
    {
        auto it = profile.provenance.find(std::string(field) + "." + std::string(to_string(launch)));
        if (it == profile.provenance.end())
            it = profile.provenance.find(field);
        if (it != profile.provenance.end() && it->second.find("figure") != std::string::npos)
            flags.push_back(std::string("figure-derived input: ") + field);
    }
}

double filtered_bandwidth(double blp, double length_m, Launch launch, const PathCounts &counts,
                          const ModeFilterTable *filter)
{
    double bw = path_bandwidth_ghz(blp, length_m);
    if (filter)
        bw *= filter->factor(launch, counts.min_radius, counts.deg90 + counts.deg45);
    return bw;
}

} // namespace

PathBudget path_insertion_loss(const Route &route, const WaveguideProfile &profile, Launch launch,
                               const ModeFilterTable *filter)
{
    PathBudget b;
    b.route = route.id;
    b.profile = profile.name;
    b.launch = launch;

    const auto counts = count_events(route.events);
    b.bends = counts.bends;
    b.crossings_deg90 = counts.deg90;
    b.crossings_deg45 = counts.deg45;

    const double length_cm = event_length_cm(route.events);
    b.length_m = length_cm / 100.0;

    b.breakdown.coupling_db = profile.coupling(launch);
    b.breakdown.propagation_db = profile.propagation_loss_db_per_cm * length_cm;
    for (const auto &e : route.events)
        if (const auto *bend = std::get_if<Bend>(&e))
            b.breakdown.bend_excess_db += bend_event_loss(profile.curve(launch), *bend);
    if (counts.deg90 > 0)
        b.breakdown.crossing_deg90_db = crossing_excess_loss(profile.slopes(launch, AngleClass::DEG90), counts.deg90);
    if (counts.deg45 > 0)
        b.breakdown.crossing_deg45_db = crossing_excess_loss(profile.slopes(launch, AngleClass::DEG45), counts.deg45);
    b.total_db = b.breakdown.total_db();

    add_provenance_flags(profile, launch, b.flags);
    const auto blp = profile.blp(launch);
    if (!blp)
        b.flags.push_back("no bandwidth-length product calibrated for launch " + std::string(to_string(launch)));
    else if (!(b.length_m > 0.0))
        b.flags.push_back("zero-length path has no bandwidth");
    else
        b.bandwidth_ghz = filtered_bandwidth(*blp, b.length_m, launch, counts, filter);
    return b;
}

double path_bandwidth(const Route &route, const WaveguideProfile &profile, Launch launch,
                      const ModeFilterTable *filter)
{
    const double length_m = event_length_cm(route.events) / 100.0;
    if (!(length_m > 0.0))
        throw ArgumentError("route " + to_string(route.id) + " has zero length");
    const auto blp = profile.blp(launch);
    if (!blp)
        throw BudgetError("profile " + profile.name + " has no bandwidth-length product for launch " +
                          std::string(to_string(launch)));
    return filtered_bandwidth(*blp, length_m, launch, count_events(route.events), filter);
}

bool worse_path(const PathBudget &a, const PathBudget &b)
{
    // Within one profile and launch the coupling term is shared, so ranking on
    // the path-dependent part keeps the order exact under a coupling offset.
    const bool shared = a.breakdown.coupling_db == b.breakdown.coupling_db;
    const double la = shared ? a.breakdown.path_dependent_db() : a.total_db;
    const double lb = shared ? b.breakdown.path_dependent_db() : b.total_db;
    if (la != lb)
        return la > lb;
    if (a.crossings() != b.crossings())
        return a.crossings() > b.crossings();
    if (a.length_m != b.length_m)
        return a.length_m > b.length_m;
    return a.route < b.route;
}

WorstCase worst_case_path(const Layout &layout, const WaveguideProfile &profile, Launch launch,
                          const ModeFilterTable *filter)
{
    if (layout.routes.empty())
        throw ArgumentError("worst-case search on an empty layout");
    const auto n = static_cast<std::ptrdiff_t>(layout.routes.size());
    std::vector<PathBudget> budgets(layout.routes.size());
    std::vector<std::exception_ptr> errors(layout.routes.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; i++)
    {
        try
        {
            budgets[i] = path_insertion_loss(layout.routes[i], profile, launch, filter);
        }
        catch (...)
        {
            errors[i] = std::current_exception();
        }
    }
    for (std::ptrdiff_t i = 0; i < n; i++)
    {
        if (!errors[i])
            continue;
        try
        {
            std::rethrow_exception(errors[i]);
        }
        catch (const RangeError &e)
        {
            throw e.prefixed("route " + to_string(layout.routes[i].id) + ": ");
        }
        catch (const BudgetError &e)
        {
            throw BudgetError("route " + to_string(layout.routes[i].id) + ": " + e.what());
        }
    }

    WorstCase wc;
    wc.ranking = std::move(budgets);
    std::sort(wc.ranking.begin(), wc.ranking.end(), worse_path);
    wc.budget = wc.ranking.front();
    wc.route = wc.budget.route;
    return wc;
}

} // namespace wgd
