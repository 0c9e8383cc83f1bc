#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wgd/budget.hpp"
#include "wgd/layout.hpp"
#include "wgd/model.hpp"

namespace wgd {

struct Constraints
{
    std::optional<double> max_board_side_mm;
    /// Bandwidth is only checked when a bitrate is given.
    std::optional<double> bitrate_gbps;
    double bandwidth_factor = kDefaultBandwidthFactor;
    double bend_loss_budget_db = 1.0;
    Launch launch = Launch::MMF50;

    void validate() const;
};

enum class Reason
{
    bend_budget,          // R not above the launch's minimum bend radius
    below_radius_floor,   // R below the profile's designer floor
    radius_out_of_range,  // R outside the sampled bend curve
    bandwidth,            // worst-case bandwidth below the requirement
    bandwidth_unknown,    // bitrate given but no BLP for the launch
    board_size,           // bounding box side above the size cap
    geometry,             // layout cannot be generated at this radius
};

std::string_view to_string(Reason reason);

struct DesignPoint
{
    std::string profile;
    double bend_radius_mm = 0.0;
    Launch launch = Launch::MMF50;
    /// Absent when the budget cannot be evaluated (radius outside the curve,
    /// geometry failure).
    std::optional<double> worst_case_loss_db;
    std::optional<double> worst_case_bandwidth_ghz;
    std::optional<PathBudget> worst_case;
    double board_width_mm = 0.0;
    double board_height_mm = 0.0;
    double board_area_mm2 = 0.0;
    bool feasible = false;
    std::vector<Reason> reasons;
    std::vector<std::string> details;
};

struct DesignSpace
{
    ShuffleSpec shuffle;       // bend_radius_mm is replaced by each grid value
    double margin_mm = 1.0;    // the board is the compact board at each radius
    std::vector<double> radii_mm;
    const ModeFilterTable *filter = nullptr;
};

/// Evaluates every (profile, radius) pair; output ordered by profile name then
/// radius.
std::vector<DesignPoint> enumerate_designs(const DesignSpace &space, const std::vector<WaveguideProfile> &profiles,
                                           const Constraints &constraints);

enum class SelectionPolicy
{
    /// Each profile is considered at its smallest feasible radius only, the
    /// way a designer picks "the minimum radius required"; then argmin loss.
    minimal_radius_per_profile,
    /// Argmin loss over every feasible point.
    all_feasible,
};

std::string_view to_string(SelectionPolicy policy);
SelectionPolicy parse_selection_policy(std::string_view name);

struct OptimizeResult
{
    std::optional<DesignPoint> best;
    /// Points that entered the final argmin, in canonical order.
    std::vector<DesignPoint> candidates;
    std::map<Reason, std::size_t> infeasible_by_reason;
    std::size_t points = 0;
};

/// Ties: smaller area, then larger bandwidth, then profile name, then the
/// earlier point.
bool better_design(const DesignPoint &a, const DesignPoint &b);

OptimizeResult optimize(const std::vector<DesignPoint> &points,
                        SelectionPolicy policy = SelectionPolicy::minimal_radius_per_profile);

struct AreaSavings
{
    double width_reduction = 0.0;
    double height_reduction = 0.0;
    double area_reduction = 0.0;
};

/// Savings of b relative to a.
AreaSavings area_savings(const DesignPoint &a, const DesignPoint &b);

} // namespace wgd
