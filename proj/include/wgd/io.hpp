#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "wgd/budget.hpp"
#include "wgd/calibrate.hpp"
#include "wgd/layout.hpp"
#include "wgd/model.hpp"
#include "wgd/optimize.hpp"

namespace wgd {

using Json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Delimited text

struct CsvField
{
    std::string text;
    std::size_t column; // 1-based character column
};

struct CsvRow
{
    std::size_t line; // 1-based
    std::vector<CsvField> fields;
};

struct CsvTable
{
    std::string source;
    std::vector<std::string> header;
    std::vector<CsvRow> rows;
};

/// Comma-separated, first non-comment line is the header, '#' starts a
/// comment line, blank lines skipped, fields trimmed.
CsvTable parse_csv(const std::string &text, const std::string &source);

enum class TableKind
{
    profiles,
    reference_loss,
    crossing_total,
    crossing_excess,
    bend_total,
    bend_excess,
    far_field,
    pulses,
    mode_filter,
};

/// Recognizes a table by its header columns; throws ParseError otherwise.
TableKind detect_table_kind(const CsvTable &table);

/// Adds the rows of one table to `set`. Series are keyed by (profile, launch
/// [, angle]) in first-appearance order.
void append_measurements(const CsvTable &table, const std::string &origin, MeasurementSet &set);

/// Files and directories (searched recursively for *.csv, in sorted order).
/// Origin tags name the data class ("figure-digitized", "table-authoritative")
/// when the path contains such a directory. Mode-filter tables are skipped.
MeasurementSet load_measurements(const std::vector<std::filesystem::path> &inputs,
                                 std::vector<std::filesystem::path> *files_read = nullptr);

ModeFilterTable load_mode_filter(const std::filesystem::path &path);

std::string read_file(const std::filesystem::path &path);
void write_file(const std::filesystem::path &path, const std::string &text);
/// JSON syntax errors become ParseError with line and column.
Json parse_json_text(const std::string &text, const std::string &source);

// ---------------------------------------------------------------------------
// Model cards

double round_to(double value, int decimals);

Json model_card_to_json(const WaveguideProfile &profile);
WaveguideProfile model_card_from_json(const Json &doc, const std::string &source);

/// Every *.json in the directory, sorted by profile name.
std::vector<WaveguideProfile> load_model_cards(const std::filesystem::path &dir,
                                               std::vector<std::filesystem::path> *files_read = nullptr);

// ---------------------------------------------------------------------------
// Layouts

Json layout_to_json(const Layout &layout);
/// Geometry is re-validated and crossings recomputed; records in the file are
/// ignored.
Layout layout_from_json(const Json &doc, const std::string &source);

// ---------------------------------------------------------------------------
// Run configuration

struct ScenarioConfig
{
    std::string name;
    std::optional<double> max_board_side_mm;
};

struct RunConfig
{
    std::filesystem::path base_dir; // relative paths resolve against this
    std::filesystem::path model_cards = "data/model-cards";
    std::optional<std::filesystem::path> layout_file;
    std::optional<std::filesystem::path> mode_filter_file;
    std::vector<std::filesystem::path> measurements;

    Launch launch = Launch::MMF50;
    std::vector<std::string> profiles; // empty = every card

    ShuffleSpec shuffle;
    double margin_mm = 1.0;
    std::optional<BoardSpec> board; // default: compact board for the radius

    Constraints constraints;
    std::vector<double> radii_mm;
    SelectionPolicy policy = SelectionPolicy::minimal_radius_per_profile;
    std::vector<ScenarioConfig> scenarios;
    std::optional<std::pair<std::string, std::string>> savings; // (baseline scenario, compared scenario)

    std::optional<std::size_t> random_routes; // `gen` emits a random fixture instead of the shuffle
    CalibrationOptions calibration;

    std::filesystem::path resolve(const std::filesystem::path &p) const;
};

RunConfig parse_config(const Json &doc, const std::filesystem::path &base_dir, const std::string &source);
RunConfig load_config(const std::filesystem::path &path);
/// Configuration snapshot embedded in manifests.
Json config_to_json(const RunConfig &config);

// ---------------------------------------------------------------------------
// Manifests

inline constexpr const char *kToolVersion = "1.0.0";

std::string sha256_hex(const std::string &bytes);

struct RunManifest
{
    std::string command;
    std::vector<std::pair<std::string, std::string>> inputs; // (path, sha256)
    std::string tool_version = kToolVersion;
    Json configuration = Json::object();
    std::string timestamp;

    void add_input(const std::filesystem::path &path);
    Json to_json() const;
};

/// UTC ISO-8601 from SOURCE_DATE_EPOCH, the Unix epoch when unset, so that
/// identical runs produce identical bytes.
std::string manifest_timestamp();

} // namespace wgd
