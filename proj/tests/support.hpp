#pragma once

#include <array>
#include <filesystem>
#include <string>
#include <vector>

#include "wgd/io.hpp"
#include "wgd/model.hpp"

namespace wgd::test {

inline std::filesystem::path source_dir() { return WGD_SOURCE_DIR; }
inline std::filesystem::path data_dir() { return source_dir() / "data"; }

inline const std::array<Launch, 3> kLossLaunches {Launch::SMF9, Launch::MMF50, Launch::MMF100MM};
inline const std::array<std::string, 3> kProfiles {"WG01", "WG02", "WG03"};

struct SlopeRow
{
    std::string profile;
    AngleClass angle;
    std::array<std::pair<double, double>, 3> k; // (k1, k2) for SMF9, MMF50, MMF100MM
};

// Loss-per-crossing coefficient table, typed in by hand.
inline const std::vector<SlopeRow> &reference_slopes()
{
    static const std::vector<SlopeRow> rows {
        {"WG01", AngleClass::DEG90, {{{0.098, 0.092}, {0.122, 0.096}, {0.155, 0.101}}}},
        {"WG02", AngleClass::DEG90, {{{0.008, 0.006}, {0.027, 0.017}, {0.046, 0.022}}}},
        {"WG03", AngleClass::DEG90, {{{0.042, 0.031}, {0.070, 0.040}, {0.092, 0.050}}}},
        {"WG01", AngleClass::DEG45, {{{0.243, 0.261}, {0.292, 0.259}, {0.296, 0.256}}}},
        {"WG02", AngleClass::DEG45, {{{0.114, 0.053}, {0.119, 0.065}, {0.125, 0.067}}}},
        {"WG03", AngleClass::DEG45, {{{0.143, 0.068}, {0.210, 0.089}, {0.239, 0.100}}}},
    };
    return rows;
}

// Required radius for < 1 dB bend loss, "> N mm", per launch.
inline const std::vector<std::pair<std::string, std::array<double, 3>>> &reference_bend_thresholds()
{
    static const std::vector<std::pair<std::string, std::array<double, 3>>> rows {
        {"WG01", {6, 6, 8}},
        {"WG02", {10, 11, 15}},
        {"WG03", {5, 6, 8}},
    };
    return rows;
}

// Hand-written piecewise oracle, deliberately not calling the library.
inline double piecewise_oracle(double k1, double k2, long x)
{
    if (x <= 10)
        return k1 * static_cast<double>(x);
    return k1 * 10.0 + k2 * static_cast<double>(x - 10);
}

inline std::vector<WaveguideProfile> shipped_cards() { return load_model_cards(data_dir() / "model-cards"); }

inline const WaveguideProfile &card(const std::vector<WaveguideProfile> &cards, const std::string &name)
{
    for (const auto &c : cards)
        if (c.name == name)
            return c;
    throw std::runtime_error("no card " + name);
}

} // namespace wgd::test
