#include "wgd/calibrate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>

#include "wgd/error.hpp"

namespace wgd {

namespace {

std::string series_label(const std::string &kind, const std::string &profile, Launch launch)
{
    return kind + " " + profile + "/" + std::string(to_string(launch));
}

} // namespace

void CrossingLossSeries::validate() const
{
    for (size_t i = 0; i < points.size(); i++)
    {
        if (!(points[i].loss_db >= 0.0))
            throw CalibrationError("crossing series " + profile + ": negative loss");
        if (i > 0 && points[i].crossings <= points[i - 1].crossings)
            throw CalibrationError("crossing series " + profile + ": counts must be strictly increasing");
    }
}

void BendLossSeries::validate() const
{
    for (size_t i = 0; i < points.size(); i++)
    {
        if (!(points[i].radius_mm > 0.0))
            throw CalibrationError("bend series " + profile + ": radius must be positive");
        if (i > 0 && !(points[i].radius_mm > points[i - 1].radius_mm))
            throw CalibrationError("bend series " + profile + ": radii must be strictly increasing");
    }
}

void FarFieldScan::validate() const
{
    if (points.size() < 3)
        throw CalibrationError("far-field scan " + label + ": needs at least 3 samples");
    double peak = 0.0;
    for (size_t i = 0; i < points.size(); i++)
    {
        if (i > 0 && !(points[i].angle_deg > points[i - 1].angle_deg))
            throw CalibrationError("far-field scan " + label + ": angles must be strictly increasing");
        peak = std::max(peak, points[i].intensity);
    }
    if (!(peak > 0.0))
        throw CalibrationError("far-field scan " + label + ": no positive intensity");
}

void PulsePair::validate() const
{
    if (!(fwhm_back_to_back_ps > 0.0) || !(fwhm_through_dut_ps > 0.0))
        throw CalibrationError("pulse widths must be positive");
    if (!(dut_length_m > 0.0))
        throw CalibrationError("device length must be positive");
}

NormalizedLosses normalize_excess(std::span<const double> totals_db, std::optional<double> reference_db)
{
    if (!reference_db)
        throw CalibrationError("no reference insertion loss for this profile/launch");
    NormalizedLosses out;
    out.excess_db.reserve(totals_db.size());
    for (size_t i = 0; i < totals_db.size(); i++)
    {
        double e = totals_db[i] - *reference_db;
        if (e < 0.0)
        {
            out.warnings.push_back({i, "total " + std::to_string(totals_db[i]) + " dB below reference " +
                                           std::to_string(*reference_db) + " dB; excess clamped to 0"});
            e = 0.0;
        }
        out.excess_db.push_back(e);
    }
    return out;
}

CrossingSlopeSet fit_crossing_slopes(const CrossingLossSeries &excess, const CrossingFitOptions &options)
{
    excess.validate();
    const auto knee = static_cast<double>(options.knee);

    double sxy = 0.0, sxx = 0.0;
    size_t n_first = 0;
    for (const auto &p : excess.points)
    {
        if (p.crossings > options.knee)
            continue;
        const auto x = static_cast<double>(p.crossings);
        sxy += x * p.loss_db;
        sxx += x * x;
        n_first++;
    }
    if (n_first < 2 || sxx == 0.0)
        throw CalibrationError("crossing series " + excess.profile + ": first segment (x <= " +
                               std::to_string(options.knee) + ") needs at least 2 points");
    const double k1 = sxy / sxx;

    double suv = 0.0, suu = 0.0;
    size_t n_second = 0;
    for (const auto &p : excess.points)
    {
        if (p.crossings < options.second_segment_start)
            continue;
        const double u = static_cast<double>(p.crossings) - knee;
        suv += u * (p.loss_db - k1 * knee);
        suu += u * u;
        n_second++;
    }
    if (n_second < 2)
        throw CalibrationError("crossing series " + excess.profile + ": second segment (x >= " +
                               std::to_string(options.second_segment_start) + ") needs at least 2 points");
    const double k2 = suv / suu;

    // noise on near-zero slopes can push the estimate negative
    return {std::max(k1, 0.0), std::max(k2, 0.0), options.knee};
}

BendCurveFit fit_bend_curve(const BendLossSeries &excess, double budget_db)
{
    excess.validate();
    if (excess.points.size() < 2)
        throw CalibrationError("bend series " + excess.profile + ": needs at least 2 radii");

    std::vector<BendSample> clamped = excess.points;
    for (auto &s : clamped)
        s.excess_loss_db = std::max(s.excess_loss_db, 0.0);

    BendCurveFit fit;
    const BendLossCurve raw(std::move(clamped));
    fit.curve = raw.monotone_repaired();
    for (size_t i = 0; i < raw.samples().size(); i++)
        if (raw.samples()[i].excess_loss_db != fit.curve.samples()[i].excess_loss_db)
            fit.repaired = true;

    try
    {
        fit.crossing_radius_mm = bend_budget_crossing_radius(fit.curve, budget_db);
        fit.min_radius_mm = min_bend_radius(fit.curve, budget_db);
    }
    catch (const InfeasibleError &)
    {
        // reported as "no radius in range"; the curve is still usable
    }
    return fit;
}

double na_from_far_field(const FarFieldScan &scan, double threshold_fraction)
{
    scan.validate();
    if (!(threshold_fraction > 0.0 && threshold_fraction < 1.0))
        throw ArgumentError("far-field threshold must be in (0, 1)");

    const auto &pts = scan.points;
    size_t peak = 0;
    for (size_t i = 1; i < pts.size(); i++)
        if (pts[i].intensity > pts[peak].intensity)
            peak = i;
    const double level = threshold_fraction * pts[peak].intensity;

    // linear interpolation of the angle where intensity passes `level`
    auto cross = [&](size_t inside, size_t outside) {
        const auto &a = pts[inside];
        const auto &b = pts[outside];
        const double t = (a.intensity - level) / (a.intensity - b.intensity);
        return a.angle_deg + t * (b.angle_deg - a.angle_deg);
    };

    std::optional<double> left, right;
    size_t above = 1;
    for (size_t i = peak; i > 0; i--)
    {
        if (pts[i - 1].intensity < level)
        {
            left = cross(i, i - 1);
            break;
        }
        above++;
    }
    for (size_t i = peak; i + 1 < pts.size(); i++)
    {
        if (pts[i + 1].intensity < level)
        {
            right = cross(i, i + 1);
            break;
        }
        above++;
    }
    if (!left || !right)
        throw CalibrationError("far-field scan " + scan.label + ": scan truncated, intensity never falls below " +
                               std::to_string(threshold_fraction) + " of peak on both sides");
    if (above < 2)
        throw CalibrationError("far-field scan " + scan.label +
                               ": beam narrower than one sample spacing, cannot resolve the threshold angle");

    const double half_angle_deg = 0.5 * (*right - *left);
    return std::sin(half_angle_deg * std::numbers::pi / 180.0);
}

BandwidthEstimate bandwidth_from_pulses(const PulsePair &pair, double time_bandwidth)
{
    pair.validate();
    if (!(time_bandwidth > 0.0))
        throw ArgumentError("time-bandwidth constant must be positive");

    BandwidthEstimate est;
    if (pair.fwhm_through_dut_ps <= pair.fwhm_back_to_back_ps)
    {
        est.above_measurement_limit = true;
        return est;
    }
    est.dut_fwhm_ps = std::sqrt(pair.fwhm_through_dut_ps * pair.fwhm_through_dut_ps -
                                pair.fwhm_back_to_back_ps * pair.fwhm_back_to_back_ps);
    // K / (FWHM in ps) is in THz
    est.bandwidth_ghz = time_bandwidth / est.dut_fwhm_ps * 1e3;
    est.blp_ghz_m = est.bandwidth_ghz * pair.dut_length_m;
    return est;
}

PulsePair pulse_pair_for_blp(double blp_ghz_m, double dut_length_m, double fwhm_back_to_back_ps,
                             double time_bandwidth)
{
    if (!(blp_ghz_m > 0.0) || !(dut_length_m > 0.0) || !(fwhm_back_to_back_ps > 0.0))
        throw ArgumentError("pulse pair construction needs positive inputs");
    const double f_ghz = blp_ghz_m / dut_length_m;
    const double dut_ps = time_bandwidth / f_ghz * 1e3;
    return {fwhm_back_to_back_ps, std::hypot(fwhm_back_to_back_ps, dut_ps), dut_length_m};
}

bool MeasurementSet::empty() const
{
    return references.empty() && crossing_totals.empty() && crossing_excess.empty() && bend_totals.empty() &&
           bend_excess.empty() && far_field.empty() && pulses.empty();
}

size_t CalibrationResult::failures() const
{
    return static_cast<size_t>(std::count_if(outcomes.begin(), outcomes.end(),
                                             [](const SeriesOutcome &o) { return !o.ok; }));
}

CalibrationResult calibrate(const MeasurementSet &data, const CalibrationOptions &options)
{
    CalibrationResult result;

    std::map<std::string, WaveguideProfile> profiles;
    for (const auto &p : data.profiles)
    {
        WaveguideProfile wp;
        wp.name = p.profile;
        wp.width_um = p.width_um;
        wp.height_um = p.height_um;
        wp.delta_n = p.delta_n;
        wp.propagation_loss_db_per_cm = p.propagation_loss_db_per_cm;
        wp.radius_floor_mm = p.radius_floor_mm;
        if (!p.origin.empty())
            wp.provenance["parameters"] = p.origin;
        profiles[p.profile] = std::move(wp);
    }
    auto profile_for = [&](const std::string &name) -> WaveguideProfile & {
        auto it = profiles.find(name);
        if (it == profiles.end())
            throw CalibrationError("profile " + name + " has no parameter record");
        return it->second;
    };

    std::map<std::pair<std::string, Launch>, double> reference;
    for (const auto &r : data.references)
        reference[{r.profile, r.launch}] = r.insertion_loss_db;
    auto reference_for = [&](const std::string &profile, Launch launch) -> std::optional<double> {
        auto it = reference.find({profile, launch});
        if (it == reference.end())
            return std::nullopt;
        return it->second;
    };

    auto record = [&](const std::string &label, auto &&fn) {
        try
        {
            fn();
            result.outcomes.push_back({label, true, {}});
        }
        catch (const Error &e)
        {
            result.outcomes.push_back({label, false, e.what()});
        }
    };

    // bends first: the reference-bend correction of the baseline needs them
    auto fit_bend = [&](const BendLossSeries &excess) {
        auto &wp = profile_for(excess.profile);
        auto fit = fit_bend_curve(excess, options.bend_budget_db);
        if (fit.repaired)
            result.warnings.push_back(series_label("bend", excess.profile, excess.launch) +
                                      ": non-monotone samples repaired");
        wp.bend_curve[excess.launch] = std::move(fit.curve);
        if (!excess.origin.empty())
            wp.provenance["bend_curve." + std::string(to_string(excess.launch))] = excess.origin;
    };
    for (const auto &s : data.bend_excess)
        record(series_label("bend", s.profile, s.launch), [&] { fit_bend(s); });
    for (const auto &s : data.bend_totals)
        record(series_label("bend", s.profile, s.launch), [&] {
            std::vector<double> totals;
            for (const auto &p : s.points)
                totals.push_back(p.excess_loss_db);
            auto norm = normalize_excess(totals, reference_for(s.profile, s.launch));
            for (const auto &w : norm.warnings)
                result.warnings.push_back(series_label("bend", s.profile, s.launch) + ": " + w.message);
            BendLossSeries excess = s;
            for (size_t i = 0; i < excess.points.size(); i++)
                excess.points[i].excess_loss_db = norm.excess_db[i];
            fit_bend(excess);
        });

    for (const auto &r : data.references)
        record(series_label("reference", r.profile, r.launch), [&] {
            auto &wp = profile_for(r.profile);
            wp.reference_insertion_loss_db[r.launch] = r.insertion_loss_db;
            const std::string launch(to_string(r.launch));
            if (!r.origin.empty())
                wp.provenance["reference_insertion_loss_db." + launch] = r.origin;
            double correction = 0.0;
            auto curve = wp.bend_curve.find(r.launch);
            if (curve != wp.bend_curve.end() && options.reference_bend_equivalents > 0.0)
                correction = options.reference_bend_equivalents *
                             bend_excess_loss(curve->second, options.reference_bend_radius_mm);
            wp.provenance["coupling_loss_db." + launch] =
                "reference loss" + (r.origin.empty() ? std::string() : " (" + r.origin + ")") +
                " minus propagation minus modeled reference-bend excess (" + std::to_string(correction) + " dB)";
            double coupling = r.insertion_loss_db - wp.propagation_loss_db_per_cm * options.reference_length_cm -
                              correction;
            if (coupling < 0.0)
            {
                result.warnings.push_back(series_label("reference", r.profile, r.launch) +
                                          ": derived coupling loss negative, clamped to 0");
                coupling = 0.0;
            }
            wp.coupling_loss_db[r.launch] = coupling;
        });

    auto fit_crossing = [&](const CrossingLossSeries &excess) {
        auto &wp = profile_for(excess.profile);
        wp.crossing_slopes[{excess.launch, excess.angle}] = fit_crossing_slopes(excess, options.crossing);
        if (!excess.origin.empty())
            wp.provenance["crossing_slopes." + std::string(to_string(excess.launch)) + "." +
                          std::string(to_string(excess.angle))] = excess.origin;
    };
    auto crossing_label = [](const CrossingLossSeries &s) {
        return series_label("crossing", s.profile, s.launch) + "/" + std::string(to_string(s.angle));
    };
    for (const auto &s : data.crossing_excess)
        record(crossing_label(s), [&] { fit_crossing(s); });
    for (const auto &s : data.crossing_totals)
        record(crossing_label(s), [&] {
            std::vector<double> totals;
            for (const auto &p : s.points)
                totals.push_back(p.loss_db);
            auto norm = normalize_excess(totals, reference_for(s.profile, s.launch));
            for (const auto &w : norm.warnings)
                result.warnings.push_back(crossing_label(s) + ": " + w.message);
            CrossingLossSeries excess = s;
            for (size_t i = 0; i < excess.points.size(); i++)
                excess.points[i].loss_db = norm.excess_db[i];
            fit_crossing(excess);
        });

    for (const auto &ff : data.far_field)
        record("far-field " + std::string(to_string(ff.launch)),
               [&] { result.launch_na[ff.launch] = na_from_far_field(ff.scan, options.far_field_threshold); });

    for (const auto &p : data.pulses)
        record(series_label("pulses", p.profile, p.launch), [&] {
            auto &wp = profile_for(p.profile);
            auto est = bandwidth_from_pulses(p.pair, options.time_bandwidth);
            if (est.above_measurement_limit)
                throw CalibrationError("bandwidth above measurement limit (through-DUT pulse not broadened)");
            wp.blp_ghz_m[p.launch] = est.blp_ghz_m;
            if (!p.origin.empty())
                wp.provenance["blp_ghz_m." + std::string(to_string(p.launch))] = p.origin;
        });

    for (auto &[name, wp] : profiles)
    {
        for (const auto &[launch, na] : result.launch_na)
            wp.numerical_aperture[launch] = na;
        for (const auto &ff : data.far_field)
            if (!ff.origin.empty() && result.launch_na.count(ff.launch))
                wp.provenance["numerical_aperture." + std::string(to_string(ff.launch))] = ff.origin;
        record("profile " + name, [&] { wp.validate(); });
        result.profiles.push_back(std::move(wp));
    }
    return result;
}

} // namespace wgd
