#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "wgd/model.hpp"

namespace wgd {

struct CrossingPoint
{
    std::size_t crossings;
    double loss_db;
};

struct CrossingLossSeries
{
    std::string profile;
    Launch launch = Launch::MMF50;
    AngleClass angle = AngleClass::DEG90;
    std::vector<CrossingPoint> points;
    std::string origin; // data provenance, copied into the fitted profile

    void validate() const;
};

struct BendLossSeries
{
    std::string profile;
    Launch launch = Launch::MMF50;
    std::vector<BendSample> points;
    std::string origin;

    void validate() const;
};

struct FarFieldPoint
{
    double angle_deg;
    double intensity;
};

struct FarFieldScan
{
    std::string label;
    std::vector<FarFieldPoint> points;

    void validate() const;
};

struct PulsePair
{
    double fwhm_back_to_back_ps;
    double fwhm_through_dut_ps;
    double dut_length_m;

    void validate() const;
};

struct CalibrationWarning
{
    std::size_t index;
    std::string message;
};

struct NormalizedLosses
{
    std::vector<double> excess_db;
    std::vector<CalibrationWarning> warnings;
};

/// Subtracts the reference-waveguide insertion loss measured under the same
/// launch. Negative excess (measurement noise) is clamped to zero and noted.
NormalizedLosses normalize_excess(std::span<const double> totals_db, std::optional<double> reference_db);

struct CrossingFitOptions
{
    std::size_t knee = 10;
    /// First crossing count used for the k2 segment.
    std::size_t second_segment_start = 20;
};

/// Through-origin least squares for k1 on x <= knee, then for k2 on the
/// residual above the knee value for x >= second_segment_start.
CrossingSlopeSet fit_crossing_slopes(const CrossingLossSeries &excess, const CrossingFitOptions &options = {});

struct BendCurveFit
{
    BendLossCurve curve;
    std::optional<double> crossing_radius_mm; // exact 1 dB (budget) crossing
    std::optional<double> min_radius_mm;      // design-rule value at 1 mm granularity
    bool repaired = false;                    // the repair changed at least one sample
};

BendCurveFit fit_bend_curve(const BendLossSeries &excess, double budget_db = 1.0);

inline constexpr double kFarFieldThreshold = 0.05;

/// NA = sin(half-angle) at the threshold fraction of peak intensity; the
/// half-angle is the mean of the two sides.
double na_from_far_field(const FarFieldScan &scan, double threshold_fraction = kFarFieldThreshold);

/// Time-bandwidth product of a Gaussian pulse.
inline constexpr double kGaussianTimeBandwidth = 0.4413;

struct BandwidthEstimate
{
    bool above_measurement_limit = false;
    double dut_fwhm_ps = 0.0;
    double bandwidth_ghz = 0.0;
    double blp_ghz_m = 0.0;
};

/// Gaussian deconvolution of the back-to-back and through-device pulse widths.
BandwidthEstimate bandwidth_from_pulses(const PulsePair &pair, double time_bandwidth = kGaussianTimeBandwidth);

/// Inverse of bandwidth_from_pulses for fixture construction and round-trip checks.
PulsePair pulse_pair_for_blp(double blp_ghz_m, double dut_length_m, double fwhm_back_to_back_ps,
                             double time_bandwidth = kGaussianTimeBandwidth);

// ---------------------------------------------------------------------------
// Whole-dataset calibration

struct ProfileParameters
{
    std::string profile;
    double width_um;
    double height_um;
    double delta_n;
    double propagation_loss_db_per_cm;
    double radius_floor_mm = 0.0;
    std::string origin;
};

struct ReferenceLoss
{
    std::string profile;
    Launch launch;
    double insertion_loss_db;
    std::string origin;
};

struct LabeledPulsePair
{
    std::string profile;
    Launch launch;
    PulsePair pair;
    std::string origin;
};

struct LabeledFarFieldScan
{
    Launch launch;
    FarFieldScan scan;
    std::string origin;
};

/// Raw or pre-normalized measurement tables gathered from input files.
struct MeasurementSet
{
    std::vector<ProfileParameters> profiles;
    std::vector<ReferenceLoss> references;
    std::vector<CrossingLossSeries> crossing_totals;
    std::vector<CrossingLossSeries> crossing_excess;
    std::vector<BendLossSeries> bend_totals;
    std::vector<BendLossSeries> bend_excess;
    std::vector<LabeledFarFieldScan> far_field;
    std::vector<LabeledPulsePair> pulses;

    bool empty() const;
};

struct CalibrationOptions
{
    double bend_budget_db = 1.0;
    CrossingFitOptions crossing;
    double far_field_threshold = kFarFieldThreshold;
    double time_bandwidth = kGaussianTimeBandwidth;
    double reference_length_cm = kReferenceLengthCm;
    /// The reference guides carry two 90° bends and a 180° bend; modeled as
    /// this many measured bend structures at reference_bend_radius_mm.
    double reference_bend_equivalents = 2.0;
    double reference_bend_radius_mm = 20.0;
};

struct SeriesOutcome
{
    std::string series; // e.g. "crossing WG01/MMF50/DEG90"
    bool ok;
    std::string message;
};

struct CalibrationResult
{
    std::vector<WaveguideProfile> profiles;
    std::map<Launch, double> launch_na;
    std::vector<SeriesOutcome> outcomes;
    std::vector<std::string> warnings;

    std::size_t failures() const;
};

/// Fits every series independently; a failing series is reported in
/// `outcomes` and does not abort the others.
CalibrationResult calibrate(const MeasurementSet &data, const CalibrationOptions &options = {});

} // namespace wgd
