#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wgd/budget.hpp"
#include "wgd/calibrate.hpp"
#include "wgd/io.hpp"
#include "wgd/layout.hpp"
#include "wgd/optimize.hpp"

namespace wgd {

// Reports are built as JSON documents (full precision) and the text form is
// rendered from the document alone, so `report` can re-render a saved run.

Json budget_to_json(const PathBudget &b);
Json design_to_json(const DesignPoint &p);

Json gen_report(const Layout &layout, const RunManifest &manifest);

/// bend_radius_mm is absent for layouts read from a file.
Json budget_report(const WorstCase &wc, const RunManifest &manifest, std::optional<double> bend_radius_mm);

struct ScenarioResult
{
    std::string name;
    Constraints constraints;
    std::vector<DesignPoint> points;
    OptimizeResult result;
};

struct SavingsResult
{
    std::string baseline_scenario;
    std::string compare_scenario;
    DesignPoint baseline;
    DesignPoint compare;
    AreaSavings savings;
};

Json optimize_report(const std::vector<ScenarioResult> &scenarios, SelectionPolicy policy,
                     const std::optional<SavingsResult> &savings, const RunManifest &manifest);

Json fit_report(const CalibrationResult &result, const std::vector<std::string> &cards_written,
                const RunManifest &manifest);

/// Error document written next to the outputs when a run fails.
Json error_report(const std::string &error_class, const std::string &message, const RunManifest &manifest);

/// Text rendering keyed on the document's "kind".
std::string render_text(const Json &report);

/// Single statistics line for `gen`.
std::string gen_summary_line(const Json &report);

} // namespace wgd
