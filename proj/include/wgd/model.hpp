#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace wgd {

/// Input excitation used for a measurement or a budget.
enum class Launch
{
    SMF9,     // 9/125 um single-mode fibre, restricted launch
    MMF50,    // 50/125 um GI multimode fibre, medium launch
    MMF100MM, // 100/140 um GI multimode fibre with mode mixer, overfilled launch
    LENS10x,  // 10x microscope objective, restricted launch (bandwidth studies only)
};

enum class ModalFill
{
    restricted = 0,
    medium = 1,
    overfilled = 2,
};

struct LaunchCondition
{
    Launch name;
    double numerical_aperture;
    double core_diameter_um;
    ModalFill fill;
};

/// Shipped descriptors for the four launches. NA values are the far-field
/// 5% points; LENS10x carries the objective NA.
LaunchCondition launch_condition(Launch launch);

std::string_view to_string(Launch launch);
/// Accepts the canonical names plus "MMF100" as an alias of MMF100MM.
Launch parse_launch(std::string_view name);
const std::vector<Launch> &all_launches();
/// Launches with power-transmission data, ordered restricted -> overfilled.
const std::vector<Launch> &loss_launches();

enum class AngleClass
{
    DEG90,
    DEG45,
};

std::string_view to_string(AngleClass angle);
AngleClass parse_angle_class(std::string_view name);
/// Nearest class for a measured crossing angle in (0, 90] degrees.
AngleClass classify_crossing_angle(double angle_deg);

struct CrossingSlopeSet
{
    double k1_db_per_crossing = 0.0;
    double k2_db_per_crossing = 0.0;
    std::size_t knee = 10;

    void validate() const;
};

/// Two-slope crossing model: k1 per crossing up to the knee, k2 afterwards.
double crossing_excess_loss(const CrossingSlopeSet &slopes, std::size_t crossings);

struct BendSample
{
    double radius_mm;
    double excess_loss_db;
};

/// Sampled excess-loss-versus-radius curve, linearly interpolated.
class BendLossCurve
{
public:
    BendLossCurve() = default;
    explicit BendLossCurve(std::vector<BendSample> samples);

    const std::vector<BendSample> &samples() const noexcept { return samples_; }
    double min_radius() const { return samples_.front().radius_mm; }
    double max_radius() const { return samples_.back().radius_mm; }
    bool empty() const noexcept { return samples_.empty(); }

    /// Copy with losses made non-increasing in radius (pool-adjacent-violators).
    BendLossCurve monotone_repaired() const;

private:
    std::vector<BendSample> samples_;
};

/// Weighted isotonic regression, non-increasing order.
std::vector<double> isotonic_non_increasing(std::span<const double> values,
                                            std::span<const double> weights = {});

double bend_excess_loss(const BendLossCurve &curve, double radius_mm);

/// Exact radius where the repaired curve falls to budget_db. Returns the
/// smallest sampled radius when the whole curve is within budget.
double bend_budget_crossing_radius(const BendLossCurve &curve, double budget_db);

/// bend_budget_crossing_radius rounded up to `granularity_mm` (1 mm reproduces
/// the "> N mm" design-rule tables).
double min_bend_radius(const BendLossCurve &curve, double budget_db, double granularity_mm = 1.0);

double path_bandwidth_ghz(double blp_ghz_m, double length_m);

inline constexpr double kDefaultBandwidthFactor = 0.7;
double required_bandwidth_ghz(double bitrate_gbps, double bandwidth_factor = kDefaultBandwidthFactor);

/// One fabricated waveguide type with its calibrated per-launch coefficients.
struct WaveguideProfile
{
    std::string name;
    double width_um = 0.0;
    double height_um = 0.0;
    double delta_n = 0.0;
    double propagation_loss_db_per_cm = 0.0;

    std::map<Launch, double> coupling_loss_db;
    std::map<Launch, double> reference_insertion_loss_db;
    std::map<std::pair<Launch, AngleClass>, CrossingSlopeSet> crossing_slopes;
    std::map<Launch, BendLossCurve> bend_curve;
    std::map<Launch, double> blp_ghz_m;
    std::map<Launch, double> numerical_aperture;

    /// Smallest radius the designer accepts for this profile regardless of
    /// launch; 0 means no floor.
    double radius_floor_mm = 0.0;

    /// Field name -> data origin ("table-authoritative", "figure-digitized", ...).
    std::map<std::string, std::string> provenance;

    void validate() const;

    double coupling(Launch launch) const;
    const CrossingSlopeSet &slopes(Launch launch, AngleClass angle) const;
    const BendLossCurve &curve(Launch launch) const;
    std::optional<double> blp(Launch launch) const;
};

inline constexpr double kReferenceLengthCm = 16.25;

} // namespace wgd
