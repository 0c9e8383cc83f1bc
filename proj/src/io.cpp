#include "wgd/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <openssl/evp.h>

#include "wgd/error.hpp"

namespace fs = std::filesystem;

namespace wgd {

// ---------------------------------------------------------------------------
// Delimited text

CsvTable parse_csv(const std::string &text, const std::string &source)
{
    CsvTable table;
    table.source = source;
    std::istringstream in(text);
    std::string raw;
    size_t line_no = 0;
    bool have_header = false;
    while (std::getline(in, raw))
    {
        line_no++;
        if (!raw.empty() && raw.back() == '\r')
            raw.pop_back();
        const auto first = raw.find_first_not_of(" \t");
        if (first == std::string::npos || raw[first] == '#')
            continue;

        CsvRow row;
        row.line = line_no;
        size_t start = 0;
        while (true)
        {
            const size_t end = std::min(raw.find(',', start), raw.size());
            size_t b = start, e = end;
            while (b < e && (raw[b] == ' ' || raw[b] == '\t'))
                b++;
            while (e > b && (raw[e - 1] == ' ' || raw[e - 1] == '\t'))
                e--;
            row.fields.push_back({raw.substr(b, e - b), b + 1});
            if (end == raw.size())
                break;
            start = end + 1;
        }

        if (!have_header)
        {
            for (const auto &f : row.fields)
            {
                if (f.text.empty())
                    throw ParseError(source, line_no, f.column, "empty column name in header");
                if (std::find(table.header.begin(), table.header.end(), f.text) != table.header.end())
                    throw ParseError(source, line_no, f.column, "duplicate column '" + f.text + "'");
                table.header.push_back(f.text);
            }
            have_header = true;
            continue;
        }
        if (row.fields.size() != table.header.size())
            throw ParseError(source, line_no, row.fields.back().column,
                             "expected " + std::to_string(table.header.size()) + " fields, found " +
                                 std::to_string(row.fields.size()));
        table.rows.push_back(std::move(row));
    }
    if (!have_header)
        throw ParseError(source, 1, 1, "no header row");
    return table;
}

namespace {

bool has(const CsvTable &t, const char *column)
{
    return std::find(t.header.begin(), t.header.end(), column) != t.header.end();
}

struct Columns
{
    const CsvTable &table;

    size_t index(const char *name) const
    {
        auto it = std::find(table.header.begin(), table.header.end(), name);
        if (it == table.header.end())
            throw ParseError(table.source, 1, 1, std::string("missing column '") + name + "'");
        return static_cast<size_t>(it - table.header.begin());
    }

    const CsvField &field(const CsvRow &row, const char *name) const { return row.fields[index(name)]; }

    std::string text(const CsvRow &row, const char *name) const
    {
        const auto &f = field(row, name);
        if (f.text.empty())
            throw ParseError(table.source, row.line, f.column, std::string("empty ") + name);
        return f.text;
    }

    double number(const CsvRow &row, const char *name) const
    {
        const auto &f = field(row, name);
        double v = 0.0;
        const char *b = f.text.data();
        const char *e = b + f.text.size();
        auto [ptr, ec] = std::from_chars(b, e, v);
        if (f.text.empty() || ec != std::errc() || ptr != e || !std::isfinite(v))
            throw ParseError(table.source, row.line, f.column + static_cast<size_t>(ptr - b),
                             std::string("invalid number for ") + name + ": '" + f.text + "'");
        return v;
    }

    size_t count(const CsvRow &row, const char *name) const
    {
        const auto &f = field(row, name);
        size_t v = 0;
        const char *b = f.text.data();
        const char *e = b + f.text.size();
        auto [ptr, ec] = std::from_chars(b, e, v);
        if (f.text.empty() || ec != std::errc() || ptr != e)
            throw ParseError(table.source, row.line, f.column + static_cast<size_t>(ptr - b),
                             std::string("invalid non-negative integer for ") + name + ": '" + f.text + "'");
        return v;
    }

    Launch launch(const CsvRow &row) const
    {
        const auto &f = field(row, "launch");
        try
        {
            return parse_launch(f.text);
        }
        catch (const Error &e)
        {
            throw ParseError(table.source, row.line, f.column, e.what());
        }
    }

    AngleClass angle(const CsvRow &row) const
    {
        const auto &f = field(row, "angle_class");
        try
        {
            return parse_angle_class(f.text);
        }
        catch (const Error &e)
        {
            throw ParseError(table.source, row.line, f.column, e.what());
        }
    }
};

template <class Series, class Key, class MakeKey>
Series &series_for(std::vector<Series> &all, std::map<Key, size_t> &index, const Key &key, MakeKey make)
{
    auto it = index.find(key);
    if (it != index.end())
        return all[it->second];
    index[key] = all.size();
    all.push_back(make());
    return all.back();
}

std::string origin_for(const fs::path &file)
{
    for (const auto &part : file)
    {
        if (part == "figure-digitized")
            return "figure-digitized: " + file.filename().string();
        if (part == "table-authoritative")
            return "table-authoritative: " + file.filename().string();
    }
    return "measurement: " + file.filename().string();
}

} // namespace

Json parse_json_text(const std::string &text, const std::string &source)
{
    try
    {
        return Json::parse(text);
    }
    catch (const nlohmann::json::parse_error &e)
    {
        size_t line = 1, col = 1;
        for (size_t i = 0; i + 1 < e.byte && i < text.size(); i++)
        {
            if (text[i] == '\n')
            {
                line++;
                col = 1;
            }
            else
                col++;
        }
        std::string msg = e.what();
        const auto pos = msg.find("syntax error");
        throw ParseError(source, line, col, pos == std::string::npos ? msg : msg.substr(pos));
    }
}

TableKind detect_table_kind(const CsvTable &t)
{
    if (has(t, "width_um"))
        return TableKind::profiles;
    if (has(t, "radius_upper_mm"))
        return TableKind::mode_filter;
    if (has(t, "fwhm_back_to_back_ps"))
        return TableKind::pulses;
    if (has(t, "intensity"))
        return TableKind::far_field;
    if (has(t, "x") || has(t, "radius_mm"))
    {
        const bool cross = has(t, "x");
        if (has(t, "excess_db"))
            return cross ? TableKind::crossing_excess : TableKind::bend_excess;
        if (has(t, "value"))
            return cross ? TableKind::crossing_total : TableKind::bend_total;
        throw ParseError(t.source, 1, 1, "loss table needs a 'value' (total loss) or 'excess_db' column");
    }
    if (has(t, "insertion_loss_db"))
        return TableKind::reference_loss;
    std::string cols;
    for (const auto &h : t.header)
        cols += (cols.empty() ? "" : ",") + h;
    throw ParseError(t.source, 1, 1, "unrecognized table header '" + cols + "'");
}

void append_measurements(const CsvTable &t, const std::string &origin, MeasurementSet &set)
{
    const Columns c {t};
    const auto kind = detect_table_kind(t);
    switch (kind)
    {
    case TableKind::profiles:
        for (const auto &r : t.rows)
        {
            ProfileParameters p;
            p.profile = c.text(r, "profile");
            p.width_um = c.number(r, "width_um");
            p.height_um = c.number(r, "height_um");
            p.delta_n = c.number(r, "delta_n");
            p.propagation_loss_db_per_cm = c.number(r, "propagation_loss_db_per_cm");
            if (has(t, "radius_floor_mm"))
                p.radius_floor_mm = c.number(r, "radius_floor_mm");
            p.origin = origin;
            set.profiles.push_back(p);
        }
        break;
    case TableKind::reference_loss:
        for (const auto &r : t.rows)
            set.references.push_back({c.text(r, "profile"), c.launch(r), c.number(r, "insertion_loss_db"), origin});
        break;
    case TableKind::crossing_total:
    case TableKind::crossing_excess: {
        auto &target = kind == TableKind::crossing_total ? set.crossing_totals : set.crossing_excess;
        const char *value = kind == TableKind::crossing_total ? "value" : "excess_db";
        std::map<std::tuple<std::string, Launch, AngleClass>, size_t> index;
        for (const auto &r : t.rows)
        {
            const auto profile = c.text(r, "profile");
            const auto launch = c.launch(r);
            const auto angle = c.angle(r);
            auto &s = series_for(target, index, std::tuple {profile, launch, angle}, [&] {
                CrossingLossSeries s;
                s.profile = profile;
                s.launch = launch;
                s.angle = angle;
                s.origin = origin;
                return s;
            });
            s.points.push_back({c.count(r, "x"), c.number(r, value)});
        }
        break;
    }
    case TableKind::bend_total:
    case TableKind::bend_excess: {
        auto &target = kind == TableKind::bend_total ? set.bend_totals : set.bend_excess;
        const char *value = kind == TableKind::bend_total ? "value" : "excess_db";
        std::map<std::pair<std::string, Launch>, size_t> index;
        for (const auto &r : t.rows)
        {
            const auto profile = c.text(r, "profile");
            const auto launch = c.launch(r);
            auto &s = series_for(target, index, std::pair {profile, launch}, [&] {
                BendLossSeries s;
                s.profile = profile;
                s.launch = launch;
                s.origin = origin;
                return s;
            });
            s.points.push_back({c.number(r, "radius_mm"), c.number(r, value)});
        }
        break;
    }
    case TableKind::far_field: {
        std::map<Launch, size_t> index;
        for (const auto &r : t.rows)
        {
            const auto launch = c.launch(r);
            auto &s = series_for(set.far_field, index, launch, [&] {
                LabeledFarFieldScan s;
                s.launch = launch;
                s.scan.label = std::string(to_string(launch));
                s.origin = origin;
                return s;
            });
            s.scan.points.push_back({c.number(r, "angle_deg"), c.number(r, "intensity")});
        }
        break;
    }
    case TableKind::pulses:
        for (const auto &r : t.rows)
        {
            LabeledPulsePair p;
            p.profile = c.text(r, "profile");
            p.launch = c.launch(r);
            p.pair = {c.number(r, "fwhm_back_to_back_ps"), c.number(r, "fwhm_through_dut_ps"),
                      c.number(r, "dut_length_m")};
            p.origin = origin;
            set.pulses.push_back(p);
        }
        break;
    case TableKind::mode_filter:
        break;
    }
}

std::string read_file(const fs::path &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ArgumentError("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path &path, const std::string &text)
{
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write " + path.string());
    out << text;
}

MeasurementSet load_measurements(const std::vector<fs::path> &inputs, std::vector<fs::path> *files_read)
{
    std::vector<fs::path> files;
    for (const auto &in : inputs)
    {
        if (fs::is_directory(in))
        {
            std::vector<fs::path> found;
            for (const auto &e : fs::recursive_directory_iterator(in))
                if (e.is_regular_file() && e.path().extension() == ".csv")
                    found.push_back(e.path());
            std::sort(found.begin(), found.end());
            files.insert(files.end(), found.begin(), found.end());
        }
        else if (fs::is_regular_file(in))
            files.push_back(in);
        else
            throw ArgumentError("input not found: " + in.string());
    }

    MeasurementSet set;
    for (const auto &f : files)
    {
        const auto table = parse_csv(read_file(f), f.string());
        if (detect_table_kind(table) == TableKind::mode_filter)
            continue;
        append_measurements(table, origin_for(f), set);
        if (files_read)
            files_read->push_back(f);
    }
    return set;
}

ModeFilterTable load_mode_filter(const fs::path &path)
{
    const auto t = parse_csv(read_file(path), path.string());
    if (detect_table_kind(t) != TableKind::mode_filter)
        throw ParseError(t.source, 1, 1, "not a mode-filter table (needs launch,radius_upper_mm,crossings_from,factor)");
    const Columns c {t};
    struct Cells
    {
        std::set<double> radii;
        std::set<size_t> counts;
        std::map<std::pair<double, size_t>, double> factor;
    };
    std::map<Launch, Cells> by_launch;
    for (const auto &r : t.rows)
    {
        auto &cells = by_launch[c.launch(r)];
        const double radius = c.number(r, "radius_upper_mm");
        const size_t count = c.count(r, "crossings_from");
        cells.radii.insert(radius);
        cells.counts.insert(count);
        if (!cells.factor.emplace(std::pair {radius, count}, c.number(r, "factor")).second)
            throw ParseError(t.source, r.line, 1, "duplicate mode-filter cell");
    }
    ModeFilterTable table;
    for (const auto &[launch, cells] : by_launch)
    {
        ModeFilterTable::Grid g;
        g.radius_upper_mm.assign(cells.radii.begin(), cells.radii.end());
        g.crossings_from.assign(cells.counts.begin(), cells.counts.end());
        for (double radius : g.radius_upper_mm)
        {
            g.factor.emplace_back();
            for (size_t count : g.crossings_from)
            {
                auto it = cells.factor.find({radius, count});
                if (it == cells.factor.end())
                    throw ArgumentError(path.string() + ": mode-filter grid for " + std::string(to_string(launch)) +
                                        " is missing cell (" + std::to_string(radius) + " mm, " +
                                        std::to_string(count) + " crossings)");
                g.factor.back().push_back(it->second);
            }
        }
        try
        {
            table.set(launch, std::move(g));
        }
        catch (const ArgumentError &e)
        {
            throw ArgumentError(path.string() + ": " + e.what());
        }
    }
    return table;
}

// ---------------------------------------------------------------------------
// Model cards

double round_to(double value, int decimals)
{
    const double scale = std::pow(10.0, decimals);
    const double r = std::round(value * scale) / scale;
    return r == 0.0 ? 0.0 : r; // no negative zero in documents
}

namespace {

constexpr int kLossDecimals = 3;
constexpr int kValueDecimals = 6;

std::set<Launch> launches_of(const WaveguideProfile &p)
{
    std::set<Launch> out;
    for (const auto &[l, v] : p.coupling_loss_db)
        out.insert(l);
    for (const auto &[l, v] : p.reference_insertion_loss_db)
        out.insert(l);
    for (const auto &[k, v] : p.crossing_slopes)
        out.insert(k.first);
    for (const auto &[l, v] : p.bend_curve)
        out.insert(l);
    for (const auto &[l, v] : p.blp_ghz_m)
        out.insert(l);
    for (const auto &[l, v] : p.numerical_aperture)
        out.insert(l);
    return out;
}

template <class T>
T get_required(const Json &doc, const char *key, const std::string &where)
{
    if (!doc.is_object() || !doc.contains(key))
        throw ArgumentError(where + ": missing key '" + key + "'");
    try
    {
        return doc.at(key).get<T>();
    }
    catch (const nlohmann::json::exception &)
    {
        throw ArgumentError(where + ": key '" + key + "' has the wrong type");
    }
}

} // namespace

Json model_card_to_json(const WaveguideProfile &p)
{
    Json doc;
    doc["profile"] = p.name;
    doc["width_um"] = round_to(p.width_um, kValueDecimals);
    doc["height_um"] = round_to(p.height_um, kValueDecimals);
    doc["delta_n"] = round_to(p.delta_n, kValueDecimals);
    doc["propagation_loss_db_per_cm"] = round_to(p.propagation_loss_db_per_cm, kLossDecimals);
    doc["radius_floor_mm"] = round_to(p.radius_floor_mm, kValueDecimals);

    Json launches = Json::object();
    for (Launch l : launches_of(p))
    {
        Json e = Json::object();
        if (auto it = p.coupling_loss_db.find(l); it != p.coupling_loss_db.end())
            e["coupling_loss_db"] = round_to(it->second, kLossDecimals);
        if (auto it = p.reference_insertion_loss_db.find(l); it != p.reference_insertion_loss_db.end())
            e["reference_insertion_loss_db"] = round_to(it->second, kLossDecimals);
        if (auto it = p.numerical_aperture.find(l); it != p.numerical_aperture.end())
            e["numerical_aperture"] = round_to(it->second, kValueDecimals);
        if (auto it = p.blp_ghz_m.find(l); it != p.blp_ghz_m.end())
            e["blp_ghz_m"] = round_to(it->second, kLossDecimals);
        if (auto it = p.bend_curve.find(l); it != p.bend_curve.end())
        {
            Json radii = Json::array(), losses = Json::array();
            for (const auto &s : it->second.samples())
            {
                radii.push_back(round_to(s.radius_mm, kValueDecimals));
                losses.push_back(round_to(s.excess_loss_db, kLossDecimals));
            }
            Json curve {{"radius_mm", radii}, {"excess_loss_db", losses}};
            try
            {
                curve["min_radius_mm_at_1db"] = min_bend_radius(it->second, 1.0);
            }
            catch (const InfeasibleError &)
            {
                curve["min_radius_mm_at_1db"] = nullptr;
            }
            e["bend_curve"] = curve;
        }
        Json slopes = Json::object();
        for (AngleClass a : {AngleClass::DEG90, AngleClass::DEG45})
        {
            if (auto it = p.crossing_slopes.find({l, a}); it != p.crossing_slopes.end())
                slopes[std::string(to_string(a))] = {
                    {"k1_db_per_crossing", round_to(it->second.k1_db_per_crossing, kLossDecimals)},
                    {"k2_db_per_crossing", round_to(it->second.k2_db_per_crossing, kLossDecimals)},
                    {"knee", it->second.knee}};
        }
        if (!slopes.empty())
            e["crossing_slopes"] = slopes;
        launches[std::string(to_string(l))] = e;
    }
    doc["launches"] = launches;
    Json prov = Json::object();
    for (const auto &[k, v] : p.provenance)
        prov[k] = v;
    doc["provenance"] = prov;
    return doc;
}

WaveguideProfile model_card_from_json(const Json &doc, const std::string &source)
{
    WaveguideProfile p;
    p.name = get_required<std::string>(doc, "profile", source);
    p.width_um = get_required<double>(doc, "width_um", source);
    p.height_um = get_required<double>(doc, "height_um", source);
    p.delta_n = get_required<double>(doc, "delta_n", source);
    p.propagation_loss_db_per_cm = get_required<double>(doc, "propagation_loss_db_per_cm", source);
    if (doc.contains("radius_floor_mm"))
        p.radius_floor_mm = get_required<double>(doc, "radius_floor_mm", source);

    const auto launches = get_required<Json>(doc, "launches", source);
    if (!launches.is_object())
        throw ArgumentError(source + ": 'launches' must be an object");
    for (const auto &[name, e] : launches.items())
    {
        const std::string where = source + ": launches." + name;
        Launch l;
        try
        {
            l = parse_launch(name);
        }
        catch (const Error &err)
        {
            throw ArgumentError(where + ": " + err.what());
        }
        if (e.contains("coupling_loss_db"))
            p.coupling_loss_db[l] = get_required<double>(e, "coupling_loss_db", where);
        if (e.contains("reference_insertion_loss_db"))
            p.reference_insertion_loss_db[l] = get_required<double>(e, "reference_insertion_loss_db", where);
        if (e.contains("numerical_aperture"))
            p.numerical_aperture[l] = get_required<double>(e, "numerical_aperture", where);
        if (e.contains("blp_ghz_m"))
            p.blp_ghz_m[l] = get_required<double>(e, "blp_ghz_m", where);
        if (e.contains("bend_curve"))
        {
            const auto c = e.at("bend_curve");
            const auto radii = get_required<std::vector<double>>(c, "radius_mm", where + ".bend_curve");
            const auto losses = get_required<std::vector<double>>(c, "excess_loss_db", where + ".bend_curve");
            if (radii.size() != losses.size())
                throw ArgumentError(where + ".bend_curve: radius and loss arrays differ in length");
            std::vector<BendSample> samples;
            for (size_t i = 0; i < radii.size(); i++)
                samples.push_back({radii[i], losses[i]});
            try
            {
                p.bend_curve[l] = BendLossCurve(std::move(samples));
            }
            catch (const Error &err)
            {
                throw ArgumentError(where + ".bend_curve: " + err.what());
            }
        }
        if (e.contains("crossing_slopes"))
        {
            for (const auto &[angle, s] : e.at("crossing_slopes").items())
            {
                const std::string w = where + ".crossing_slopes." + angle;
                AngleClass a;
                try
                {
                    a = parse_angle_class(angle);
                }
                catch (const Error &err)
                {
                    throw ArgumentError(w + ": " + err.what());
                }
                CrossingSlopeSet set;
                set.k1_db_per_crossing = get_required<double>(s, "k1_db_per_crossing", w);
                set.k2_db_per_crossing = get_required<double>(s, "k2_db_per_crossing", w);
                if (s.contains("knee"))
                    set.knee = get_required<size_t>(s, "knee", w);
                p.crossing_slopes[{l, a}] = set;
            }
        }
    }
    if (doc.contains("provenance"))
        for (const auto &[k, v] : doc.at("provenance").items())
            if (v.is_string())
                p.provenance[k] = v.get<std::string>();

    try
    {
        p.validate();
    }
    catch (const Error &err)
    {
        throw ArgumentError(source + ": " + err.what());
    }
    return p;
}

std::vector<WaveguideProfile> load_model_cards(const fs::path &dir, std::vector<fs::path> *files_read)
{
    if (!fs::is_directory(dir))
        throw ArgumentError("model-card directory not found: " + dir.string());
    std::vector<fs::path> files;
    for (const auto &e : fs::directory_iterator(dir))
        if (e.is_regular_file() && e.path().extension() == ".json")
            files.push_back(e.path());
    std::sort(files.begin(), files.end());
    std::vector<WaveguideProfile> out;
    for (const auto &f : files)
    {
        out.push_back(model_card_from_json(parse_json_text(read_file(f), f.string()), f.string()));
        if (files_read)
            files_read->push_back(f);
    }
    if (out.empty())
        throw ArgumentError("no model cards (*.json) in " + dir.string());
    std::sort(out.begin(), out.end(), [](const auto &a, const auto &b) { return a.name < b.name; });
    for (size_t i = 1; i < out.size(); i++)
        if (out[i].name == out[i - 1].name)
            throw ArgumentError("two model cards for profile " + out[i].name);
    return out;
}

// ---------------------------------------------------------------------------
// Layouts

namespace {

constexpr int kCoordDecimals = 6;

Json point_json(Point p) { return Json::array({round_to(p.x, kCoordDecimals), round_to(p.y, kCoordDecimals)}); }
Json id_json(const RouteId &id) { return Json::array({id.source, id.dest}); }

Point point_from(const Json &j, const std::string &where)
{
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        throw ArgumentError(where + ": expected [x, y]");
    return {j[0].get<double>(), j[1].get<double>()};
}

RouteId id_from(const Json &j, const std::string &where)
{
    if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() || !j[1].is_number_integer())
        throw ArgumentError(where + ": expected [source, dest]");
    return {j[0].get<int>(), j[1].get<int>()};
}

constexpr double kDeg = 180.0 / std::numbers::pi;

} // namespace

Json layout_to_json(const Layout &layout)
{
    Json doc;
    doc["margin_mm"] = layout.margin_mm;
    Json meta = Json::object();
    for (const auto &[k, v] : layout.metadata)
        meta[k] = v;
    doc["metadata"] = meta;

    const auto stats = layout_stats(layout);
    Json st {{"routes", stats.routes},
             {"bends", stats.bends},
             {"crossings", stats.crossings},
             {"worst_route", id_json(stats.worst_route)},
             {"worst_route_crossings", stats.worst_route_crossings},
             {"worst_route_bends", stats.worst_route_bends},
             {"degenerate", stats.degenerate}};
    if (!layout.routes.empty())
    {
        const auto box = bounding_box_area(layout);
        st["bounding_box"] = {{"width_mm", box.width_mm}, {"height_mm", box.height_mm}, {"area_mm2", box.area_mm2}};
    }
    doc["stats"] = st;

    Json routes = Json::array();
    for (const auto &r : layout.routes)
    {
        Json geo = Json::array();
        for (const auto &p : r.geometry)
        {
            if (const auto *s = std::get_if<Segment>(&p))
                geo.push_back({{"type", "segment"}, {"a", point_json(s->a)}, {"b", point_json(s->b)}});
            else
            {
                const auto &a = std::get<Arc>(p);
                geo.push_back({{"type", "arc"},
                               {"center", point_json(a.center)},
                               {"radius_mm", round_to(a.radius, kCoordDecimals)},
                               {"start_deg", round_to(a.start_angle * kDeg, kCoordDecimals)},
                               {"sweep_deg", round_to(a.sweep * kDeg, kCoordDecimals)}});
            }
        }
        const auto rs = route_stats(r);
        routes.push_back({{"id", id_json(r.id)},
                          {"length_mm", r.length_mm()},
                          {"bends", rs.bends},
                          {"crossings", rs.crossings},
                          {"geometry", geo}});
    }
    doc["routes"] = routes;

    Json crossings = Json::array();
    for (const auto &c : layout.crossings)
        crossings.push_back({{"route_a", id_json(c.route_a)},
                             {"route_b", id_json(c.route_b)},
                             {"point", point_json(c.point)},
                             {"angle_deg", c.angle_deg},
                             {"angle_class", std::string(to_string(c.angle_class))},
                             {"position_a_mm", c.position_a_mm},
                             {"position_b_mm", c.position_b_mm}});
    doc["crossings"] = crossings;

    Json degenerate = Json::array();
    for (const auto &d : layout.degenerate)
        degenerate.push_back({{"route_a", id_json(d.route_a)},
                              {"route_b", id_json(d.route_b)},
                              {"point", point_json(d.point)},
                              {"reason", d.reason}});
    doc["degenerate"] = degenerate;
    return doc;
}

Layout layout_from_json(const Json &doc, const std::string &source)
{
    Layout layout;
    if (doc.contains("margin_mm"))
        layout.margin_mm = get_required<double>(doc, "margin_mm", source);
    if (!(layout.margin_mm >= 0.0))
        throw ArgumentError(source + ": margin_mm must be non-negative");
    if (doc.contains("metadata"))
        for (const auto &[k, v] : doc.at("metadata").items())
            layout.metadata[k] = v.is_string() ? v.get<std::string>() : v.dump();

    const auto routes = get_required<Json>(doc, "routes", source);
    if (!routes.is_array() || routes.empty())
        throw ArgumentError(source + ": 'routes' must be a non-empty array");
    for (size_t i = 0; i < routes.size(); i++)
    {
        const std::string where = source + ": routes[" + std::to_string(i) + "]";
        Route r;
        r.id = id_from(get_required<Json>(routes[i], "id", where), where + ".id");
        const auto geo = get_required<Json>(routes[i], "geometry", where);
        if (!geo.is_array())
            throw ArgumentError(where + ": geometry must be an array");
        for (size_t k = 0; k < geo.size(); k++)
        {
            const std::string w = where + ".geometry[" + std::to_string(k) + "]";
            const auto type = get_required<std::string>(geo[k], "type", w);
            if (type == "segment")
                r.geometry.push_back(Segment {point_from(get_required<Json>(geo[k], "a", w), w + ".a"),
                                              point_from(get_required<Json>(geo[k], "b", w), w + ".b")});
            else if (type == "arc")
                r.geometry.push_back(Arc {point_from(get_required<Json>(geo[k], "center", w), w + ".center"),
                                          get_required<double>(geo[k], "radius_mm", w),
                                          get_required<double>(geo[k], "start_deg", w) / kDeg,
                                          get_required<double>(geo[k], "sweep_deg", w) / kDeg});
            else
                throw ArgumentError(w + ": unknown primitive type '" + type + "'");
        }
        validate_route(r);
        layout.routes.push_back(std::move(r));
    }
    try
    {
        refresh_crossings(layout);
    }
    catch (const ArgumentError &e)
    {
        throw ArgumentError(source + ": " + e.what());
    }
    return layout;
}

// ---------------------------------------------------------------------------
// Run configuration

fs::path RunConfig::resolve(const fs::path &p) const { return p.is_absolute() ? p : base_dir / p; }

namespace {

void reject_unknown(const Json &obj, std::initializer_list<const char *> known, const std::string &where)
{
    for (const auto &[k, v] : obj.items())
        if (std::none_of(known.begin(), known.end(), [&](const char *n) { return k == n; }))
            throw ArgumentError(where + ": unknown key '" + k + "'");
}

} // namespace

RunConfig parse_config(const Json &doc, const fs::path &base_dir, const std::string &source)
{
    if (!doc.is_object())
        throw ArgumentError(source + ": configuration must be an object");
    reject_unknown(doc,
                   {"model_cards", "measurements", "layout_file", "mode_filter", "launch", "profiles", "layout",
                    "constraints", "radii_mm", "policy", "scenarios", "savings", "calibration", "description"},
                   source);
    RunConfig c;
    c.base_dir = base_dir;
    try
    {
        if (doc.contains("model_cards"))
            c.model_cards = doc.at("model_cards").get<std::string>();
        if (doc.contains("measurements"))
            for (const auto &m : doc.at("measurements"))
                c.measurements.emplace_back(m.get<std::string>());
        if (doc.contains("layout_file"))
            c.layout_file = doc.at("layout_file").get<std::string>();
        if (doc.contains("mode_filter"))
            c.mode_filter_file = doc.at("mode_filter").get<std::string>();
        if (doc.contains("launch"))
            c.launch = parse_launch(doc.at("launch").get<std::string>());
        if (doc.contains("profiles"))
            c.profiles = doc.at("profiles").get<std::vector<std::string>>();

        if (doc.contains("layout"))
        {
            const auto &l = doc.at("layout");
            reject_unknown(l,
                           {"n_cards", "bend_radius_mm", "waveguide_pitch_mm", "clearance_mm", "margin_mm", "board",
                            "random_routes"},
                           source + ": layout");
            c.shuffle.n_cards = l.value("n_cards", c.shuffle.n_cards);
            c.shuffle.bend_radius_mm = l.value("bend_radius_mm", c.shuffle.bend_radius_mm);
            c.shuffle.waveguide_pitch_mm = l.value("waveguide_pitch_mm", c.shuffle.waveguide_pitch_mm);
            c.shuffle.clearance_mm = l.value("clearance_mm", c.shuffle.clearance_mm);
            c.margin_mm = l.value("margin_mm", c.margin_mm);
            if (l.contains("board"))
            {
                const auto &b = l.at("board");
                reject_unknown(b, {"width_mm", "height_mm", "card_pitch_mm"}, source + ": layout.board");
                BoardSpec board;
                board.width_mm = get_required<double>(b, "width_mm", source + ": layout.board");
                board.height_mm = get_required<double>(b, "height_mm", source + ": layout.board");
                board.card_pitch_mm = get_required<double>(b, "card_pitch_mm", source + ": layout.board");
                board.margin_mm = c.margin_mm;
                c.board = board;
            }
            if (l.contains("random_routes"))
                c.random_routes = l.at("random_routes").get<size_t>();
        }

        if (doc.contains("constraints"))
        {
            const auto &k = doc.at("constraints");
            reject_unknown(k, {"max_board_side_mm", "bitrate_gbps", "bandwidth_factor", "bend_loss_budget_db"},
                           source + ": constraints");
            if (k.contains("max_board_side_mm"))
                c.constraints.max_board_side_mm = k.at("max_board_side_mm").get<double>();
            if (k.contains("bitrate_gbps"))
                c.constraints.bitrate_gbps = k.at("bitrate_gbps").get<double>();
            c.constraints.bandwidth_factor = k.value("bandwidth_factor", c.constraints.bandwidth_factor);
            c.constraints.bend_loss_budget_db = k.value("bend_loss_budget_db", c.constraints.bend_loss_budget_db);
        }
        c.constraints.launch = c.launch;

        if (doc.contains("radii_mm"))
        {
            const auto &r = doc.at("radii_mm");
            if (r.is_array())
                c.radii_mm = r.get<std::vector<double>>();
            else
            {
                reject_unknown(r, {"from", "to", "step"}, source + ": radii_mm");
                const double from = get_required<double>(r, "from", source + ": radii_mm");
                const double to = get_required<double>(r, "to", source + ": radii_mm");
                const double step = r.value("step", 1.0);
                if (!(step > 0.0) || to < from)
                    throw ArgumentError(source + ": radii_mm range needs from <= to and step > 0");
                for (int i = 0; from + i * step <= to + 1e-9; i++)
                    c.radii_mm.push_back(from + i * step);
            }
        }
        if (doc.contains("policy"))
            c.policy = parse_selection_policy(doc.at("policy").get<std::string>());
        if (doc.contains("scenarios"))
        {
            for (const auto &s : doc.at("scenarios"))
            {
                reject_unknown(s, {"name", "max_board_side_mm"}, source + ": scenarios");
                ScenarioConfig sc;
                sc.name = get_required<std::string>(s, "name", source + ": scenarios");
                if (s.contains("max_board_side_mm"))
                    sc.max_board_side_mm = s.at("max_board_side_mm").get<double>();
                c.scenarios.push_back(sc);
            }
        }
        if (doc.contains("savings"))
        {
            const auto &s = doc.at("savings");
            reject_unknown(s, {"baseline", "compare"}, source + ": savings");
            c.savings = std::pair {get_required<std::string>(s, "baseline", source + ": savings"),
                                   get_required<std::string>(s, "compare", source + ": savings")};
        }
        if (doc.contains("calibration"))
        {
            const auto &k = doc.at("calibration");
            reject_unknown(k,
                           {"bend_budget_db", "knee", "far_field_threshold", "time_bandwidth",
                            "reference_bend_equivalents", "reference_bend_radius_mm"},
                           source + ": calibration");
            auto &o = c.calibration;
            o.bend_budget_db = k.value("bend_budget_db", o.bend_budget_db);
            o.crossing.knee = k.value("knee", o.crossing.knee);
            o.far_field_threshold = k.value("far_field_threshold", o.far_field_threshold);
            o.time_bandwidth = k.value("time_bandwidth", o.time_bandwidth);
            o.reference_bend_equivalents = k.value("reference_bend_equivalents", o.reference_bend_equivalents);
            o.reference_bend_radius_mm = k.value("reference_bend_radius_mm", o.reference_bend_radius_mm);
        }
    }
    catch (const nlohmann::json::exception &e)
    {
        throw ArgumentError(source + ": " + e.what());
    }
    catch (const ArgumentError &)
    {
        throw;
    }
    catch (const Error &e)
    {
        throw ArgumentError(source + ": " + e.what());
    }
    c.constraints.validate();
    return c;
}

RunConfig load_config(const fs::path &path)
{
    const auto doc = parse_json_text(read_file(path), path.string());
    return parse_config(doc, path.parent_path(), path.string());
}

Json config_to_json(const RunConfig &c)
{
    Json j;
    j["model_cards"] = c.model_cards.generic_string();
    if (!c.measurements.empty())
    {
        Json m = Json::array();
        for (const auto &p : c.measurements)
            m.push_back(p.generic_string());
        j["measurements"] = m;
    }
    if (c.layout_file)
        j["layout_file"] = c.layout_file->generic_string();
    if (c.mode_filter_file)
        j["mode_filter"] = c.mode_filter_file->generic_string();
    j["launch"] = std::string(to_string(c.launch));
    j["profiles"] = c.profiles;
    Json layout {{"n_cards", c.shuffle.n_cards},
                 {"bend_radius_mm", c.shuffle.bend_radius_mm},
                 {"waveguide_pitch_mm", c.shuffle.waveguide_pitch_mm},
                 {"clearance_mm", c.shuffle.clearance_mm},
                 {"margin_mm", c.margin_mm}};
    if (c.board)
        layout["board"] = {{"width_mm", c.board->width_mm},
                           {"height_mm", c.board->height_mm},
                           {"card_pitch_mm", c.board->card_pitch_mm}};
    if (c.random_routes)
        layout["random_routes"] = *c.random_routes;
    j["layout"] = layout;
    Json k {{"bend_loss_budget_db", c.constraints.bend_loss_budget_db},
            {"bandwidth_factor", c.constraints.bandwidth_factor}};
    if (c.constraints.bitrate_gbps)
        k["bitrate_gbps"] = *c.constraints.bitrate_gbps;
    if (c.constraints.max_board_side_mm)
        k["max_board_side_mm"] = *c.constraints.max_board_side_mm;
    j["constraints"] = k;
    j["radii_mm"] = c.radii_mm;
    j["policy"] = std::string(to_string(c.policy));
    Json sc = Json::array();
    for (const auto &s : c.scenarios)
    {
        Json e {{"name", s.name}};
        if (s.max_board_side_mm)
            e["max_board_side_mm"] = *s.max_board_side_mm;
        sc.push_back(e);
    }
    j["scenarios"] = sc;
    if (c.savings)
        j["savings"] = {{"baseline", c.savings->first}, {"compare", c.savings->second}};
    const auto &o = c.calibration;
    j["calibration"] = {{"bend_budget_db", o.bend_budget_db},
                        {"knee", o.crossing.knee},
                        {"far_field_threshold", o.far_field_threshold},
                        {"time_bandwidth", o.time_bandwidth},
                        {"reference_bend_equivalents", o.reference_bend_equivalents},
                        {"reference_bend_radius_mm", o.reference_bend_radius_mm}};
    j["tolerances"] = {{"geometry_mm", kGeometryTolerance}};
    return j;
}

// ---------------------------------------------------------------------------
// Manifests

std::string sha256_hex(const std::string &bytes)
{
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
        throw Error("SHA-256 digest failed");
    static const char *hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; i++)
    {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

void RunManifest::add_input(const fs::path &path)
{
    inputs.emplace_back(path.generic_string(), sha256_hex(read_file(path)));
}

Json RunManifest::to_json() const
{
    Json in = Json::array();
    for (const auto &[path, digest] : inputs)
        in.push_back({{"path", path}, {"sha256", digest}});
    return {{"command", command},
            {"tool_version", tool_version},
            {"timestamp", timestamp},
            {"inputs", in},
            {"configuration", configuration}};
}

std::string manifest_timestamp()
{
    std::time_t t = 0;
    if (const char *env = std::getenv("SOURCE_DATE_EPOCH"))
    {
        long long v = 0;
        auto [ptr, ec] = std::from_chars(env, env + std::char_traits<char>::length(env), v);
        if (ec == std::errc() && *ptr == '\0')
            t = static_cast<std::time_t>(v);
    }
    std::tm tm {};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

} // namespace wgd
