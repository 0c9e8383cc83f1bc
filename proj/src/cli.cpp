#include "wgd/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "wgd/error.hpp"
#include "wgd/io.hpp"
#include "wgd/report.hpp"

namespace fs = std::filesystem;

namespace wgd {

namespace {

struct Options
{
    std::string command;
    std::optional<std::string> config;
    std::string out_dir = "out";
    std::optional<std::string> launch;
    std::optional<std::string> profile;
    std::optional<std::uint64_t> seed;
    std::vector<std::string> inputs; // fit: measurement files; report: document
};

struct Context
{
    Options opt;
    RunConfig config;
    RunManifest manifest;
    std::ostream &out;
};

fs::path normal(const fs::path &p) { return p.lexically_normal(); }

void write_report(const Context &ctx, const std::string &stem, const Json &doc)
{
    const fs::path dir(ctx.opt.out_dir);
    write_file(dir / (stem + ".json"), doc.dump(2) + "\n");
    write_file(dir / (stem + ".txt"), render_text(doc));
}

Launch effective_launch(const Context &ctx) { return ctx.opt.launch ? parse_launch(*ctx.opt.launch) : ctx.config.launch; }

/// Cards restricted to --profile, else to the configured profile list.
std::vector<WaveguideProfile> select_profiles(Context &ctx)
{
    std::vector<fs::path> files;
    auto cards = load_model_cards(normal(ctx.config.resolve(ctx.config.model_cards)), &files);
    for (const auto &f : files)
        ctx.manifest.add_input(f);

    std::vector<std::string> wanted = ctx.config.profiles;
    if (ctx.opt.profile)
        wanted = {*ctx.opt.profile};
    if (wanted.empty())
        return cards;
    std::vector<WaveguideProfile> picked;
    for (const auto &name : wanted)
    {
        auto it = std::find_if(cards.begin(), cards.end(), [&](const auto &c) { return c.name == name; });
        if (it == cards.end())
        {
            std::string known;
            for (const auto &c : cards)
                known += (known.empty() ? "" : ", ") + c.name;
            throw ArgumentError("unknown profile '" + name + "' (model cards: " + known + ")");
        }
        picked.push_back(*it);
    }
    return picked;
}

std::optional<ModeFilterTable> mode_filter(Context &ctx)
{
    if (!ctx.config.mode_filter_file)
        return std::nullopt;
    const auto path = normal(ctx.config.resolve(*ctx.config.mode_filter_file));
    ctx.manifest.add_input(path);
    return load_mode_filter(path);
}

BoardSpec board_for(const Context &ctx, const ShuffleSpec &spec)
{
    if (!ctx.config.board)
        return compact_board(spec, ctx.config.margin_mm);
    BoardSpec b = *ctx.config.board;
    b.margin_mm = ctx.config.margin_mm;
    return b;
}

int cmd_fit(Context &ctx)
{
    std::vector<fs::path> inputs;
    for (const auto &i : ctx.opt.inputs)
        inputs.emplace_back(i);
    if (inputs.empty())
        for (const auto &m : ctx.config.measurements)
            inputs.push_back(normal(ctx.config.resolve(m)));
    if (inputs.empty())
        throw ArgumentError("fit: no measurement inputs given (positional paths or config 'measurements')");
    for (const auto &p : inputs)
        if (!fs::exists(p))
            throw ArgumentError("fit: input '" + p.generic_string() + "' does not exist");

    std::vector<fs::path> files;
    const auto data = load_measurements(inputs, &files);
    for (const auto &f : files)
        ctx.manifest.add_input(f);
    if (data.empty())
        throw ArgumentError("fit: no series found");

    const auto result = calibrate(data, ctx.config.calibration);
    std::vector<std::string> written;
    const fs::path card_dir = fs::path(ctx.opt.out_dir) / "model-cards";
    for (const auto &p : result.profiles)
    {
        if (ctx.opt.profile && p.name != *ctx.opt.profile)
            continue;
        const auto path = card_dir / (p.name + ".json");
        write_file(path, model_card_to_json(p).dump(2) + "\n");
        written.push_back(path.generic_string());
    }
    if (ctx.opt.profile && written.empty())
        throw ArgumentError("fit: unknown profile '" + *ctx.opt.profile + "'");

    const auto doc = fit_report(result, written, ctx.manifest);
    write_report(ctx, "fit_report", doc);
    ctx.out << render_text(doc);
    return result.failures() == 0 ? kExitOk : kExitInput;
}

int cmd_gen(Context &ctx)
{
    Layout layout;
    if (ctx.opt.seed || ctx.config.random_routes)
    {
        RandomLayoutSpec spec;
        if (ctx.config.random_routes)
            spec.routes = *ctx.config.random_routes;
        layout = random_layout(ctx.opt.seed.value_or(0), spec);
    }
    else
    {
        layout = generate_shuffle(ctx.config.shuffle, board_for(ctx, ctx.config.shuffle));
    }
    write_file(fs::path(ctx.opt.out_dir) / "layout.json", layout_to_json(layout).dump(2) + "\n");
    const auto doc = gen_report(layout, ctx.manifest);
    write_report(ctx, "gen_report", doc);
    ctx.out << gen_summary_line(doc) << "\n";
    return kExitOk;
}

int cmd_budget(Context &ctx)
{
    const auto profiles = select_profiles(ctx);
    if (profiles.size() != 1)
    {
        std::string names;
        for (const auto &p : profiles)
            names += (names.empty() ? "" : ", ") + p.name;
        throw ArgumentError("budget: choose one profile with --profile (candidates: " + names + ")");
    }
    const auto filter = mode_filter(ctx);

    Layout layout;
    std::optional<double> radius;
    if (ctx.config.layout_file)
    {
        const auto path = normal(ctx.config.resolve(*ctx.config.layout_file));
        ctx.manifest.add_input(path);
        layout = layout_from_json(parse_json_text(read_file(path), path.generic_string()), path.generic_string());
    }
    else
    {
        layout = generate_shuffle(ctx.config.shuffle, board_for(ctx, ctx.config.shuffle));
        radius = ctx.config.shuffle.bend_radius_mm;
    }
    const auto wc =
        worst_case_path(layout, profiles.front(), effective_launch(ctx), filter ? &*filter : nullptr);
    const auto doc = budget_report(wc, ctx.manifest, radius);
    write_report(ctx, "budget_report", doc);
    ctx.out << render_text(doc);
    return kExitOk;
}

int cmd_optimize(Context &ctx)
{
    const auto profiles = select_profiles(ctx);
    const auto filter = mode_filter(ctx);

    DesignSpace space;
    space.shuffle = ctx.config.shuffle;
    space.margin_mm = ctx.config.margin_mm;
    space.radii_mm = ctx.config.radii_mm;
    if (space.radii_mm.empty())
        for (int r = 5; r <= 20; r++)
            space.radii_mm.push_back(r);
    space.filter = filter ? &*filter : nullptr;

    std::vector<ScenarioConfig> scenarios = ctx.config.scenarios;
    if (scenarios.empty())
        scenarios.push_back({"default", ctx.config.constraints.max_board_side_mm});

    std::vector<ScenarioResult> results;
    for (const auto &s : scenarios)
    {
        ScenarioResult r;
        r.name = s.name;
        r.constraints = ctx.config.constraints;
        r.constraints.launch = effective_launch(ctx);
        if (s.max_board_side_mm)
            r.constraints.max_board_side_mm = s.max_board_side_mm;
        r.points = enumerate_designs(space, profiles, r.constraints);
        r.result = optimize(r.points, ctx.config.policy);
        results.push_back(std::move(r));
    }

    std::optional<SavingsResult> savings;
    if (ctx.config.savings)
    {
        auto find = [&](const std::string &name) -> const ScenarioResult & {
            for (const auto &r : results)
                if (r.name == name)
                    return r;
            throw ArgumentError("savings: unknown scenario '" + name + "'");
        };
        const auto &a = find(ctx.config.savings->first);
        const auto &b = find(ctx.config.savings->second);
        if (a.result.best && b.result.best)
            savings = SavingsResult {a.name, b.name, *a.result.best, *b.result.best,
                                     area_savings(*a.result.best, *b.result.best)};
    }

    const auto doc = optimize_report(results, ctx.config.policy, savings, ctx.manifest);
    write_report(ctx, "optimize_report", doc);
    ctx.out << render_text(doc);
    const bool all_feasible = std::all_of(results.begin(), results.end(), [](const auto &r) { return r.result.best; });
    return all_feasible ? kExitOk : kExitInfeasible;
}

int cmd_report(Context &ctx)
{
    if (ctx.opt.inputs.size() != 1)
        throw ArgumentError("report: expects exactly one report document");
    const auto &path = ctx.opt.inputs.front();
    ctx.out << render_text(parse_json_text(read_file(path), path));
    return kExitOk;
}

int classify(const std::exception_ptr &e, std::string &error_class, std::string &message)
{
    try
    {
        std::rethrow_exception(e);
    }
    catch (const InfeasibleError &ex)
    {
        error_class = dynamic_cast<const GeometryError *>(&ex) ? "geometry" : "infeasible";
        message = ex.what();
        return kExitInfeasible;
    }
    catch (const ParseError &ex)
    {
        error_class = "parse";
        message = ex.what();
    }
    catch (const RangeError &ex)
    {
        error_class = "range";
        message = ex.what();
    }
    catch (const CalibrationError &ex)
    {
        error_class = "calibration";
        message = ex.what();
    }
    catch (const BudgetError &ex)
    {
        error_class = "budget";
        message = ex.what();
    }
    catch (const ArgumentError &ex)
    {
        error_class = "input";
        message = ex.what();
    }
    catch (const fs::filesystem_error &ex)
    {
        error_class = "input";
        message = ex.what();
    }
    catch (const std::exception &ex)
    {
        error_class = "internal";
        message = ex.what();
        return kExitInternal;
    }
    catch (...)
    {
        error_class = "internal";
        message = "unknown exception";
        return kExitInternal;
    }
    return kExitInput;
}

} // namespace

int run_cli(int argc, const char *const *argv, std::ostream &out, std::ostream &err)
{
    Options opt;
    CLI::App app {"Design automation for multimode polymer waveguide backplanes", "wgd"};
    app.set_version_flag("--version", kToolVersion);
    app.require_subcommand(1);
    app.option_defaults()->always_capture_default();

    auto add_common = [&](CLI::App *sub) {
        sub->add_option("--config", opt.config, "Run configuration (JSON)");
        sub->add_option("--out", opt.out_dir, "Output directory");
        sub->add_option("--launch", opt.launch, "Launch condition (SMF9, MMF50, MMF100MM, LENS10x)");
        sub->add_option("--profile", opt.profile, "Waveguide profile");
        sub->add_option("--seed", opt.seed, "Seed for randomized fixture layouts");
    };
    auto *fit = app.add_subcommand("fit", "Calibrate model cards from measurement tables");
    fit->add_option("inputs", opt.inputs, "Measurement files or directories");
    auto *gen = app.add_subcommand("gen", "Generate a shuffle layout and its crossing statistics");
    auto *budget = app.add_subcommand("budget", "Per-path loss budget and worst case");
    auto *optimize_cmd = app.add_subcommand("optimize", "Search profiles and bend radii");
    auto *report = app.add_subcommand("report", "Render a saved JSON report as text");
    report->add_option("document", opt.inputs, "Report JSON")->required();
    for (auto *sub : {fit, gen, budget, optimize_cmd, report})
        add_common(sub);

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitInput;
    }
    opt.command = app.get_subcommands().front()->get_name();

    Context ctx {opt, {}, {}, out};
    ctx.manifest.command = opt.command;
    ctx.manifest.timestamp = manifest_timestamp();
    try
    {
        if (opt.config)
        {
            ctx.config = load_config(*opt.config);
            ctx.manifest.add_input(*opt.config);
        }
        else
        {
            ctx.config.base_dir = ".";
        }
        if (opt.launch)
            parse_launch(*opt.launch);
        Json cfg = config_to_json(ctx.config);
        Json overrides = Json::object();
        if (opt.launch)
            overrides["launch"] = *opt.launch;
        if (opt.profile)
            overrides["profile"] = *opt.profile;
        if (opt.seed)
            overrides["seed"] = *opt.seed;
        cfg["overrides"] = overrides;
        ctx.manifest.configuration = cfg;

        if (opt.command == "fit")
            return cmd_fit(ctx);
        if (opt.command == "gen")
            return cmd_gen(ctx);
        if (opt.command == "budget")
            return cmd_budget(ctx);
        if (opt.command == "optimize")
            return cmd_optimize(ctx);
        return cmd_report(ctx);
    }
    catch (...)
    {
        std::string error_class, message;
        const int code = classify(std::current_exception(), error_class, message);
        err << "wgd " << opt.command << ": " << error_class << " error: " << message << "\n";
        if (opt.command != "report")
        {
            try
            {
                write_file(fs::path(opt.out_dir) / "error.json",
                           error_report(error_class, message, ctx.manifest).dump(2) + "\n");
            }
            catch (const std::exception &)
            {
                // The diagnostic on stderr is all we can give.
            }
        }
        return code;
    }
}

} // namespace wgd
