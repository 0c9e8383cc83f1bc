#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wgd/layout.hpp"
#include "wgd/model.hpp"

namespace wgd {

struct LossBreakdown
{
    double coupling_db = 0.0;
    double propagation_db = 0.0;
    double bend_excess_db = 0.0;
    double crossing_deg90_db = 0.0;
    double crossing_deg45_db = 0.0;

    /// Everything except coupling, summed in a fixed order.
    double path_dependent_db() const;
    double total_db() const;
};

struct PathBudget
{
    RouteId route;
    std::string profile;
    Launch launch = Launch::MMF50;
    LossBreakdown breakdown;
    double total_db = 0.0;
    double length_m = 0.0;
    std::size_t bends = 0;
    std::size_t crossings_deg90 = 0;
    std::size_t crossings_deg45 = 0;
    /// Absent for zero-length paths and launches without a calibrated BLP.
    std::optional<double> bandwidth_ghz;
    std::vector<std::string> flags;

    std::size_t crossings() const { return crossings_deg90 + crossings_deg45; }
};

/// Bandwidth enhancement from mode filtering, per launch. Rows are radius
/// buckets (a bend radius r falls into the first bucket with r <= upper
/// bound), columns are crossing-count buckets (count c falls into the last
/// bucket with c >= lower bound). Paths outside every bucket get factor 1.
class ModeFilterTable
{
public:
    struct Grid
    {
        std::vector<double> radius_upper_mm;     // ascending
        std::vector<std::size_t> crossings_from; // ascending
        std::vector<std::vector<double>> factor; // [radius bucket][crossing bucket]
    };

    void set(Launch launch, Grid grid);
    bool empty() const { return grids_.empty(); }
    /// min_bend_radius_mm is nullopt for paths without bends.
    double factor(Launch launch, std::optional<double> min_bend_radius_mm, std::size_t crossings) const;

    const std::map<Launch, Grid> &grids() const { return grids_; }

private:
    std::map<Launch, Grid> grids_;
};

/// Arc-length of a route from its events (straights plus bend arcs), cm.
double event_length_cm(const std::vector<PathElement> &events);

/// Loss of one 90° bend is the curve value; other angles scale with
/// max(1, angle/90), so short arcs are charged like a full bend.
double bend_event_loss(const BendLossCurve &curve, const Bend &bend);

PathBudget path_insertion_loss(const Route &route, const WaveguideProfile &profile, Launch launch,
                               const ModeFilterTable *filter = nullptr);

double path_bandwidth(const Route &route, const WaveguideProfile &profile, Launch launch,
                      const ModeFilterTable *filter = nullptr);

struct WorstCase
{
    RouteId route;
    PathBudget budget;
    /// Every route, worst first.
    std::vector<PathBudget> ranking;
};

/// True when a ranks as a worse path than b: higher loss, then more
/// crossings, then longer, then lexicographically smaller id.
bool worse_path(const PathBudget &a, const PathBudget &b);

WorstCase worst_case_path(const Layout &layout, const WaveguideProfile &profile, Launch launch,
                          const ModeFilterTable *filter = nullptr);

inline constexpr const char *kFlagAmbiguousBandwidthUnit =
    "bandwidth compared against the '> 45 GHz*mm' worst-case figure, whose unit is ambiguous";

} // namespace wgd
