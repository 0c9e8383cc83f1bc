#include "wgd/model.hpp"

#include <algorithm>
#include <cmath>

#include "wgd/error.hpp"

namespace wgd {

LaunchCondition launch_condition(Launch launch)
{
    switch (launch)
    {
    case Launch::SMF9:
        return {Launch::SMF9, 0.13, 9.0, ModalFill::restricted};
    case Launch::MMF50:
        return {Launch::MMF50, 0.18, 50.0, ModalFill::medium};
    case Launch::MMF100MM:
        return {Launch::MMF100MM, 0.26, 100.0, ModalFill::overfilled};
    case Launch::LENS10x:
        return {Launch::LENS10x, 0.25, 5.0, ModalFill::restricted};
    }
    throw ArgumentError("unknown launch");
}

std::string_view to_string(Launch launch)
{
    switch (launch)
    {
    case Launch::SMF9: return "SMF9";
    case Launch::MMF50: return "MMF50";
    case Launch::MMF100MM: return "MMF100MM";
    case Launch::LENS10x: return "LENS10x";
    }
    return "?";
}

Launch parse_launch(std::string_view name)
{
    if (name == "SMF9")
        return Launch::SMF9;
    if (name == "MMF50")
        return Launch::MMF50;
    if (name == "MMF100MM" || name == "MMF100")
        return Launch::MMF100MM;
    if (name == "LENS10x")
        return Launch::LENS10x;
    throw ArgumentError("unknown launch '" + std::string(name) + "'");
}

const std::vector<Launch> &all_launches()
{
    static const std::vector<Launch> v {Launch::SMF9, Launch::MMF50, Launch::MMF100MM, Launch::LENS10x};
    return v;
}

const std::vector<Launch> &loss_launches()
{
    static const std::vector<Launch> v {Launch::SMF9, Launch::MMF50, Launch::MMF100MM};
    return v;
}

std::string_view to_string(AngleClass angle)
{
    return angle == AngleClass::DEG90 ? "DEG90" : "DEG45";
}

AngleClass parse_angle_class(std::string_view name)
{
    if (name == "DEG90" || name == "90")
        return AngleClass::DEG90;
    if (name == "DEG45" || name == "45")
        return AngleClass::DEG45;
    throw ArgumentError("unknown angle class '" + std::string(name) + "'");
}

AngleClass classify_crossing_angle(double angle_deg)
{
    // midpoint between the two measured classes
    return angle_deg >= 67.5 ? AngleClass::DEG90 : AngleClass::DEG45;
}

void CrossingSlopeSet::validate() const
{
    if (!(k1_db_per_crossing >= 0.0) || !(k2_db_per_crossing >= 0.0))
        throw ArgumentError("crossing slopes must be non-negative");
    if (knee < 1)
        throw ArgumentError("crossing knee must be >= 1");
}

double crossing_excess_loss(const CrossingSlopeSet &slopes, std::size_t crossings)
{
    slopes.validate();
    const auto x = static_cast<double>(crossings);
    if (crossings <= slopes.knee)
        return slopes.k1_db_per_crossing * x;
    const auto knee = static_cast<double>(slopes.knee);
    return slopes.k1_db_per_crossing * knee + slopes.k2_db_per_crossing * (x - knee);
}

BendLossCurve::BendLossCurve(std::vector<BendSample> samples)
    : samples_(std::move(samples))
{
    if (samples_.size() < 2)
        throw ArgumentError("bend loss curve needs at least 2 samples");
    for (size_t i = 0; i < samples_.size(); i++)
    {
        const auto &s = samples_[i];
        if (!(s.radius_mm > 0.0) || !std::isfinite(s.radius_mm))
            throw ArgumentError("bend radius must be positive");
        if (!(s.excess_loss_db >= 0.0) || !std::isfinite(s.excess_loss_db))
            throw ArgumentError("bend excess loss must be non-negative");
        if (i > 0 && !(s.radius_mm > samples_[i - 1].radius_mm))
            throw ArgumentError("bend radii must be strictly increasing");
    }
}

BendLossCurve BendLossCurve::monotone_repaired() const
{
    std::vector<double> losses;
    losses.reserve(samples_.size());
    for (const auto &s : samples_)
        losses.push_back(s.excess_loss_db);
    auto fitted = isotonic_non_increasing(losses);
    auto out = samples_;
    for (size_t i = 0; i < out.size(); i++)
        out[i].excess_loss_db = fitted[i];
    return BendLossCurve(std::move(out));
}

std::vector<double> isotonic_non_increasing(std::span<const double> values, std::span<const double> weights)
{
    if (!weights.empty() && weights.size() != values.size())
        throw ArgumentError("isotonic regression: weight count mismatch");

    struct Block
    {
        double weighted_sum;
        double weight;
        size_t count;
        double mean() const { return weighted_sum / weight; }
    };

    std::vector<Block> blocks;
    blocks.reserve(values.size());
    for (size_t i = 0; i < values.size(); i++)
    {
        const double w = weights.empty() ? 1.0 : weights[i];
        if (!(w > 0.0))
            throw ArgumentError("isotonic regression: weights must be positive");
        blocks.push_back({values[i] * w, w, 1});
        // pool while the sequence would increase
        while (blocks.size() > 1 && blocks[blocks.size() - 2].mean() < blocks.back().mean())
        {
            auto last = blocks.back();
            blocks.pop_back();
            auto &prev = blocks.back();
            prev.weighted_sum += last.weighted_sum;
            prev.weight += last.weight;
            prev.count += last.count;
        }
    }

    std::vector<double> out;
    out.reserve(values.size());
    for (const auto &b : blocks)
        out.insert(out.end(), b.count, b.mean());
    return out;
}

double bend_excess_loss(const BendLossCurve &curve, double radius_mm)
{
    if (curve.empty())
        throw ArgumentError("empty bend loss curve");
    const auto &s = curve.samples();
    if (!(radius_mm >= curve.min_radius()) || !(radius_mm <= curve.max_radius()))
        throw RangeError("bend radius " + std::to_string(radius_mm) + " mm outside sampled curve",
                         curve.min_radius(), curve.max_radius());

    auto hi = std::lower_bound(s.begin(), s.end(), radius_mm,
                               [](const BendSample &a, double r) { return a.radius_mm < r; });
    if (hi->radius_mm == radius_mm)
        return hi->excess_loss_db;
    auto lo = hi - 1;
    const double t = (radius_mm - lo->radius_mm) / (hi->radius_mm - lo->radius_mm);
    return lo->excess_loss_db + t * (hi->excess_loss_db - lo->excess_loss_db);
}

double bend_budget_crossing_radius(const BendLossCurve &curve, double budget_db)
{
    if (!(budget_db > 0.0))
        throw ArgumentError("bend loss budget must be positive");
    if (curve.empty())
        throw ArgumentError("empty bend loss curve");

    const auto repaired = curve.monotone_repaired();
    const auto &s = repaired.samples();
    if (s.front().excess_loss_db <= budget_db)
        return s.front().radius_mm;
    for (size_t i = 0; i + 1 < s.size(); i++)
    {
        const auto &a = s[i];
        const auto &b = s[i + 1];
        if (a.excess_loss_db > budget_db && b.excess_loss_db <= budget_db)
        {
            const double t = (a.excess_loss_db - budget_db) / (a.excess_loss_db - b.excess_loss_db);
            return a.radius_mm + t * (b.radius_mm - a.radius_mm);
        }
    }
    throw InfeasibleError("bend loss exceeds " + std::to_string(budget_db) +
                          " dB over the whole sampled radius range");
}

double min_bend_radius(const BendLossCurve &curve, double budget_db, double granularity_mm)
{
    if (!(granularity_mm > 0.0))
        throw ArgumentError("radius granularity must be positive");
    const double r = bend_budget_crossing_radius(curve, budget_db);
    if (r == curve.min_radius())
        return r;
    // tolerance keeps an exact grid hit (e.g. 7.0000000001) on its own step
    return std::ceil(r / granularity_mm - 1e-9) * granularity_mm;
}

double path_bandwidth_ghz(double blp_ghz_m, double length_m)
{
    if (!(length_m > 0.0))
        throw ArgumentError("path length must be positive");
    return blp_ghz_m / length_m;
}

double required_bandwidth_ghz(double bitrate_gbps, double bandwidth_factor)
{
    if (!(bitrate_gbps > 0.0))
        throw ArgumentError("bitrate must be positive");
    if (!(bandwidth_factor > 0.0))
        throw ArgumentError("bandwidth factor must be positive");
    return bandwidth_factor * bitrate_gbps;
}

void WaveguideProfile::validate() const
{
    if (name.empty())
        throw ArgumentError("waveguide profile needs a name");
    if (!(width_um > 0.0) || !(height_um > 0.0))
        throw ArgumentError(name + ": waveguide dimensions must be positive");
    if (!(delta_n > 0.0))
        throw ArgumentError(name + ": delta_n must be positive");
    if (!(propagation_loss_db_per_cm >= 0.0))
        throw ArgumentError(name + ": propagation loss must be non-negative");
    for (const auto &[l, v] : coupling_loss_db)
        if (!(v >= 0.0))
            throw ArgumentError(name + ": negative coupling loss for " + std::string(to_string(l)));
    for (const auto &[l, v] : reference_insertion_loss_db)
        if (!(v >= 0.0))
            throw ArgumentError(name + ": negative reference loss for " + std::string(to_string(l)));
    for (const auto &[key, s] : crossing_slopes)
        s.validate();
    for (const auto &[l, v] : blp_ghz_m)
        if (!(v > 0.0))
            throw ArgumentError(name + ": BLP must be positive for " + std::string(to_string(l)));
    if (!(radius_floor_mm >= 0.0))
        throw ArgumentError(name + ": radius floor must be non-negative");
}

double WaveguideProfile::coupling(Launch launch) const
{
    auto it = coupling_loss_db.find(launch);
    if (it == coupling_loss_db.end())
        throw BudgetError(name + ": no coupling loss for launch " + std::string(to_string(launch)));
    return it->second;
}

const CrossingSlopeSet &WaveguideProfile::slopes(Launch launch, AngleClass angle) const
{
    auto it = crossing_slopes.find({launch, angle});
    if (it == crossing_slopes.end())
        throw BudgetError(name + ": no crossing slopes for launch " + std::string(to_string(launch)) +
                          " / " + std::string(to_string(angle)));
    return it->second;
}

const BendLossCurve &WaveguideProfile::curve(Launch launch) const
{
    auto it = bend_curve.find(launch);
    if (it == bend_curve.end())
        throw BudgetError(name + ": no bend curve for launch " + std::string(to_string(launch)));
    return it->second;
}

std::optional<double> WaveguideProfile::blp(Launch launch) const
{
    auto it = blp_ghz_m.find(launch);
    if (it == blp_ghz_m.end())
        return std::nullopt;
    return it->second;
}

} // namespace wgd
