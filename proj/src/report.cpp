#include "wgd/report.hpp"

#include <algorithm>
#include <map>

#include <fmt/format.h>

#include "wgd/error.hpp"

namespace wgd {

namespace {

Json id_json(const RouteId &id) { return Json::array({id.source, id.dest}); }

std::string id_text(const Json &id) { return fmt::format("{}->{}", id[0].get<int>(), id[1].get<int>()); }

Json optional_json(const std::optional<double> &v) { return v ? Json(*v) : Json(nullptr); }

std::string num(const Json &v, int decimals)
{
    if (v.is_null())
        return "-";
    return fmt::format("{:.{}f}", v.get<double>(), decimals);
}

std::string header(const Json &report)
{
    const auto &m = report.at("manifest");
    std::string out = fmt::format("# {} | tool {} | {}\n", m.at("command").get<std::string>(),
                                  m.at("tool_version").get<std::string>(), m.at("timestamp").get<std::string>());
    for (const auto &in : m.at("inputs"))
        out += fmt::format("# input {} sha256:{}\n", in.at("path").get<std::string>(),
                           in.at("sha256").get<std::string>());
    return out;
}

Json constraints_json(const Constraints &c)
{
    return {{"launch", std::string(to_string(c.launch))},
            {"bend_loss_budget_db", c.bend_loss_budget_db},
            {"max_board_side_mm", optional_json(c.max_board_side_mm)},
            {"bitrate_gbps", optional_json(c.bitrate_gbps)},
            {"bandwidth_factor", c.bandwidth_factor},
            {"required_bandwidth_ghz",
             c.bitrate_gbps ? Json(required_bandwidth_ghz(*c.bitrate_gbps, c.bandwidth_factor)) : Json(nullptr)}};
}

} // namespace

Json budget_to_json(const PathBudget &b)
{
    return {{"route", id_json(b.route)},
            {"profile", b.profile},
            {"launch", std::string(to_string(b.launch))},
            {"coupling_db", b.breakdown.coupling_db},
            {"propagation_db", b.breakdown.propagation_db},
            {"bend_excess_db", b.breakdown.bend_excess_db},
            {"crossing_deg90_db", b.breakdown.crossing_deg90_db},
            {"crossing_deg45_db", b.breakdown.crossing_deg45_db},
            {"total_db", b.total_db},
            {"length_m", b.length_m},
            {"bends", b.bends},
            {"crossings_deg90", b.crossings_deg90},
            {"crossings_deg45", b.crossings_deg45},
            {"bandwidth_ghz", optional_json(b.bandwidth_ghz)},
            {"flags", b.flags}};
}

Json design_to_json(const DesignPoint &p)
{
    Json reasons = Json::array();
    for (size_t i = 0; i < p.reasons.size(); i++)
        reasons.push_back({{"code", std::string(to_string(p.reasons[i]))}, {"detail", p.details[i]}});
    return {{"profile", p.profile},
            {"bend_radius_mm", p.bend_radius_mm},
            {"launch", std::string(to_string(p.launch))},
            {"worst_case_loss_db", optional_json(p.worst_case_loss_db)},
            {"worst_case_bandwidth_ghz", optional_json(p.worst_case_bandwidth_ghz)},
            {"worst_case_path", p.worst_case ? budget_to_json(*p.worst_case) : Json(nullptr)},
            {"board_width_mm", p.board_width_mm},
            {"board_height_mm", p.board_height_mm},
            {"board_area_mm2", p.board_area_mm2},
            {"feasible", p.feasible},
            {"reasons", reasons}};
}

Json gen_report(const Layout &layout, const RunManifest &manifest)
{
    const auto st = layout_stats(layout);
    const auto box = bounding_box_area(layout);
    Json routes = Json::array();
    for (const auto &r : layout.routes)
    {
        const auto rs = route_stats(r);
        routes.push_back({{"route", id_json(r.id)},
                          {"length_mm", rs.length_mm},
                          {"bends", rs.bends},
                          {"crossings", rs.crossings},
                          {"crossings_deg90", rs.crossings_deg90},
                          {"crossings_deg45", rs.crossings_deg45}});
    }
    Json meta = Json::object();
    for (const auto &[k, v] : layout.metadata)
        meta[k] = v;
    return {{"kind", "gen"},
            {"manifest", manifest.to_json()},
            {"stats",
             {{"routes", st.routes},
              {"bends", st.bends},
              {"crossings", st.crossings},
              {"worst_route", id_json(st.worst_route)},
              {"worst_route_crossings", st.worst_route_crossings},
              {"worst_route_bends", st.worst_route_bends},
              {"degenerate", st.degenerate}}},
            {"bounding_box", {{"width_mm", box.width_mm}, {"height_mm", box.height_mm}, {"area_mm2", box.area_mm2}}},
            {"metadata", meta},
            {"routes", routes}};
}

Json budget_report(const WorstCase &wc, const RunManifest &manifest, std::optional<double> bend_radius_mm)
{
    Json ranking = Json::array();
    for (const auto &b : wc.ranking)
        ranking.push_back(budget_to_json(b));
    Json worst = budget_to_json(wc.budget);
    worst["flags"].push_back(kFlagAmbiguousBandwidthUnit);
    return {{"kind", "budget"},
            {"manifest", manifest.to_json()},
            {"profile", wc.budget.profile},
            {"launch", std::string(to_string(wc.budget.launch))},
            {"bend_radius_mm", optional_json(bend_radius_mm)},
            {"worst_case", worst},
            {"routes", ranking}};
}

Json optimize_report(const std::vector<ScenarioResult> &scenarios, SelectionPolicy policy,
                     const std::optional<SavingsResult> &savings, const RunManifest &manifest)
{
    Json sc = Json::array();
    for (const auto &s : scenarios)
    {
        Json points = Json::array();
        for (const auto &p : s.points)
            points.push_back(design_to_json(p));
        Json candidates = Json::array();
        for (const auto &c : s.result.candidates)
            candidates.push_back({{"profile", c.profile}, {"bend_radius_mm", c.bend_radius_mm}});
        Json reasons = Json::object();
        for (const auto &[r, n] : s.result.infeasible_by_reason)
            reasons[std::string(to_string(r))] = n;
        sc.push_back({{"name", s.name},
                      {"constraints", constraints_json(s.constraints)},
                      {"best", s.result.best ? design_to_json(*s.result.best) : Json(nullptr)},
                      {"candidates", candidates},
                      {"infeasible_by_reason", reasons},
                      {"points", points}});
    }
    Json doc {{"kind", "optimize"},
              {"manifest", manifest.to_json()},
              {"policy", std::string(to_string(policy))},
              {"scenarios", sc}};
    if (savings)
        doc["savings"] = {{"baseline",
                           {{"scenario", savings->baseline_scenario},
                            {"profile", savings->baseline.profile},
                            {"bend_radius_mm", savings->baseline.bend_radius_mm}}},
                          {"compare",
                           {{"scenario", savings->compare_scenario},
                            {"profile", savings->compare.profile},
                            {"bend_radius_mm", savings->compare.bend_radius_mm}}},
                          {"width_reduction", savings->savings.width_reduction},
                          {"height_reduction", savings->savings.height_reduction},
                          {"area_reduction", savings->savings.area_reduction}};
    return doc;
}

Json fit_report(const CalibrationResult &result, const std::vector<std::string> &cards_written,
                const RunManifest &manifest)
{
    Json outcomes = Json::array();
    for (const auto &o : result.outcomes)
        outcomes.push_back({{"series", o.series}, {"ok", o.ok}, {"message", o.message}});
    Json na = Json::object();
    for (const auto &[l, v] : result.launch_na)
        na[std::string(to_string(l))] = v;
    Json profiles = Json::array();
    for (const auto &p : result.profiles)
    {
        Json launches = Json::object();
        for (Launch l : all_launches())
        {
            Json e = Json::object();
            if (auto it = p.coupling_loss_db.find(l); it != p.coupling_loss_db.end())
                e["coupling_loss_db"] = it->second;
            for (AngleClass a : {AngleClass::DEG90, AngleClass::DEG45})
                if (auto it = p.crossing_slopes.find({l, a}); it != p.crossing_slopes.end())
                    e[std::string("slopes_") + std::string(to_string(a))] = {
                        {"k1", it->second.k1_db_per_crossing}, {"k2", it->second.k2_db_per_crossing}};
            if (auto it = p.bend_curve.find(l); it != p.bend_curve.end())
            {
                try
                {
                    e["bend_crossing_radius_mm"] = bend_budget_crossing_radius(it->second, 1.0);
                    e["min_bend_radius_mm"] = min_bend_radius(it->second, 1.0);
                }
                catch (const InfeasibleError &)
                {
                    e["min_bend_radius_mm"] = nullptr;
                }
            }
            if (auto it = p.blp_ghz_m.find(l); it != p.blp_ghz_m.end())
                e["blp_ghz_m"] = it->second;
            if (!e.empty())
                launches[std::string(to_string(l))] = e;
        }
        profiles.push_back({{"profile", p.name}, {"launches", launches}});
    }
    return {{"kind", "fit"},
            {"manifest", manifest.to_json()},
            {"series", result.outcomes.size()},
            {"failures", result.failures()},
            {"outcomes", outcomes},
            {"warnings", result.warnings},
            {"launch_na", na},
            {"profiles", profiles},
            {"model_cards", cards_written},
            {"notes",
             Json::array({"bandwidths assume Gaussian pulses (time-bandwidth 0.4413); the deconvolution "
                          "used for the measurement is unknown"})}};
}

Json error_report(const std::string &error_class, const std::string &message, const RunManifest &manifest)
{
    return {{"kind", "error"}, {"manifest", manifest.to_json()}, {"error_class", error_class}, {"message", message}};
}

std::string gen_summary_line(const Json &report)
{
    const auto &s = report.at("stats");
    return fmt::format("routes={} bends={} crossings={} worst={}", s.at("routes").get<size_t>(),
                       s.at("bends").get<size_t>(), s.at("crossings").get<size_t>(),
                       s.at("worst_route_crossings").get<size_t>());
}

namespace {

std::string render_gen(const Json &r)
{
    std::string out = header(r);
    const auto &s = r.at("stats");
    const auto &b = r.at("bounding_box");
    out += gen_summary_line(r) + "\n";
    out += fmt::format("worst route {}: {} crossings, {} bend(s)\n", id_text(s.at("worst_route")),
                       s.at("worst_route_crossings").get<size_t>(), s.at("worst_route_bends").get<size_t>());
    out += fmt::format("degenerate contacts: {}\n", s.at("degenerate").get<size_t>());
    out += fmt::format("bounding box: {} x {} mm, {} mm^2\n", num(b.at("width_mm"), 2), num(b.at("height_mm"), 2),
                       num(b.at("area_mm2"), 2));
    for (const auto &[k, v] : r.at("metadata").items())
        out += fmt::format("{}: {}\n", k, v.get<std::string>());
    out += fmt::format("\n{:<8} {:>10} {:>6} {:>10} {:>6} {:>6}\n", "route", "length_mm", "bends", "crossings", "90deg",
                       "45deg");
    for (const auto &e : r.at("routes"))
        out += fmt::format("{:<8} {:>10} {:>6} {:>10} {:>6} {:>6}\n", id_text(e.at("route")), num(e.at("length_mm"), 2),
                           e.at("bends").get<size_t>(), e.at("crossings").get<size_t>(),
                           e.at("crossings_deg90").get<size_t>(), e.at("crossings_deg45").get<size_t>());
    return out;
}

std::string budget_line(const Json &e, const std::map<std::string, size_t> &legend)
{
    std::string flags;
    for (const auto &f : e.at("flags"))
        flags += (flags.empty() ? "" : ",") + std::to_string(legend.at(f.get<std::string>()));
    return fmt::format("{:<8} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8} {:>9} {:>10} {:>4} {:>4} {}\n",
                       id_text(e.at("route")), num(e.at("coupling_db"), 2), num(e.at("propagation_db"), 2),
                       num(e.at("bend_excess_db"), 2), num(e.at("crossing_deg90_db"), 2),
                       num(e.at("crossing_deg45_db"), 2), num(e.at("total_db"), 2), num(e.at("length_m"), 4),
                       num(e.at("bandwidth_ghz"), 1), e.at("crossings_deg90").get<size_t>(),
                       e.at("crossings_deg45").get<size_t>(), flags);
}

std::string render_budget(const Json &r)
{
    std::string out = header(r);
    out += fmt::format("profile {} | launch {} | bend radius {} mm\n", r.at("profile").get<std::string>(),
                       r.at("launch").get<std::string>(), num(r.at("bend_radius_mm"), 2));

    std::map<std::string, size_t> legend;
    std::vector<std::string> order;
    auto collect = [&](const Json &e) {
        for (const auto &f : e.at("flags"))
            if (legend.emplace(f.get<std::string>(), legend.size() + 1).second)
                order.push_back(f.get<std::string>());
    };
    collect(r.at("worst_case"));
    for (const auto &e : r.at("routes"))
        collect(e);

    const auto &w = r.at("worst_case");
    out += fmt::format("worst-case path {}: total {} dB = coupling {} + propagation {} + bend {} + crossings(90) {} "
                       "+ crossings(45) {}; {} x 90deg, {} x 45deg crossings, {} bend(s); bandwidth {} GHz\n",
                       id_text(w.at("route")), num(w.at("total_db"), 2), num(w.at("coupling_db"), 2),
                       num(w.at("propagation_db"), 2), num(w.at("bend_excess_db"), 2),
                       num(w.at("crossing_deg90_db"), 2), num(w.at("crossing_deg45_db"), 2),
                       w.at("crossings_deg90").get<size_t>(), w.at("crossings_deg45").get<size_t>(),
                       w.at("bends").get<size_t>(), num(w.at("bandwidth_ghz"), 1));
    out += "flags:\n";
    for (size_t i = 0; i < order.size(); i++)
        out += fmt::format("  [{}] {}\n", i + 1, order[i]);
    out += fmt::format("\n{:<8} {:>8} {:>8} {:>8} {:>8} {:>8} {:>8} {:>9} {:>10} {:>4} {:>4} {}\n", "route",
                       "coupl_dB", "prop_dB", "bend_dB", "x90_dB", "x45_dB", "total_dB", "length_m", "bw_GHz", "n90",
                       "n45", "flags");
    for (const auto &e : r.at("routes"))
        out += budget_line(e, legend);
    return out;
}

std::string render_optimize(const Json &r)
{
    std::string out = header(r);
    out += fmt::format("selection policy: {}\n", r.at("policy").get<std::string>());
    for (const auto &s : r.at("scenarios"))
    {
        const auto &c = s.at("constraints");
        out += fmt::format("\nscenario {} | launch {} | bend budget {} dB | max side {} mm | bitrate {} Gb/s\n",
                           s.at("name").get<std::string>(), c.at("launch").get<std::string>(),
                           num(c.at("bend_loss_budget_db"), 2), num(c.at("max_board_side_mm"), 1),
                           num(c.at("bitrate_gbps"), 1));
        out += fmt::format("  {:<8} {:>6} {:>9} {:>10} {:>9} {:>9} {:>11}  {}\n", "profile", "R_mm", "worst_dB",
                           "bw_GHz", "width_mm", "height_mm", "area_mm2", "status");
        const auto &best = s.at("best");
        for (const auto &p : s.at("points"))
        {
            const bool win = !best.is_null() && best.at("profile") == p.at("profile") &&
                             best.at("bend_radius_mm") == p.at("bend_radius_mm");
            std::string status = "feasible";
            if (!p.at("feasible").get<bool>())
            {
                status = "infeasible:";
                for (const auto &reason : p.at("reasons"))
                    status += " " + reason.at("code").get<std::string>();
            }
            out += fmt::format("{} {:<8} {:>6} {:>9} {:>10} {:>9} {:>9} {:>11}  {}\n", win ? "*" : " ",
                               p.at("profile").get<std::string>(), num(p.at("bend_radius_mm"), 1),
                               num(p.at("worst_case_loss_db"), 2), num(p.at("worst_case_bandwidth_ghz"), 1),
                               num(p.at("board_width_mm"), 2), num(p.at("board_height_mm"), 2),
                               num(p.at("board_area_mm2"), 1), status);
        }
        if (best.is_null())
        {
            out += "no feasible design; infeasible points by reason:";
            for (const auto &[k, v] : s.at("infeasible_by_reason").items())
                out += fmt::format(" {}={}", k, v.get<size_t>());
            out += "\n";
        }
        else
        {
            const auto &w = best.at("worst_case_path");
            out += fmt::format("winner: {} at R = {} mm, worst-case {} dB (path {}, {} crossings, bend {} dB, "
                               "crossings {} dB), area {} mm^2\n",
                               best.at("profile").get<std::string>(), num(best.at("bend_radius_mm"), 1),
                               num(best.at("worst_case_loss_db"), 2), id_text(w.at("route")),
                               w.at("crossings_deg90").get<size_t>() + w.at("crossings_deg45").get<size_t>(),
                               num(w.at("bend_excess_db"), 2), num(w.at("crossing_deg90_db"), 2),
                               num(best.at("board_area_mm2"), 1));
        }
    }
    if (r.contains("savings"))
    {
        const auto &sv = r.at("savings");
        const auto &a = sv.at("baseline");
        const auto &b = sv.at("compare");
        out += fmt::format("\nsavings of {} ({} R = {} mm) versus baseline {} ({} R = {} mm): width {}%, height {}%, "
                           "area {}%\n",
                           b.at("scenario").get<std::string>(), b.at("profile").get<std::string>(),
                           num(b.at("bend_radius_mm"), 1), a.at("scenario").get<std::string>(),
                           a.at("profile").get<std::string>(), num(a.at("bend_radius_mm"), 1),
                           fmt::format("{:.1f}", 100.0 * sv.at("width_reduction").get<double>()),
                           fmt::format("{:.1f}", 100.0 * sv.at("height_reduction").get<double>()),
                           fmt::format("{:.1f}", 100.0 * sv.at("area_reduction").get<double>()));
    }
    return out;
}

std::string render_fit(const Json &r)
{
    std::string out = header(r);
    out += fmt::format("fit: {} series, {} failure(s)\n", r.at("series").get<size_t>(),
                       r.at("failures").get<size_t>());
    for (const auto &o : r.at("outcomes"))
        out += fmt::format("  [{}] {}{}\n", o.at("ok").get<bool>() ? "ok" : "FAILED", o.at("series").get<std::string>(),
                           o.at("ok").get<bool>() ? "" : ": " + o.at("message").get<std::string>());
    for (const auto &w : r.at("warnings"))
        out += "  warning: " + w.get<std::string>() + "\n";
    out += "launch NA:";
    for (const auto &[k, v] : r.at("launch_na").items())
        out += fmt::format(" {} {}", k, num(v, 3));
    out += "\n";
    for (const auto &p : r.at("profiles"))
    {
        out += fmt::format("\nprofile {}\n  {:<9} {:>9} {:>8} {:>8} {:>8} {:>8} {:>10} {:>9}\n",
                           p.at("profile").get<std::string>(), "launch", "coupl_dB", "k1_90", "k2_90", "k1_45",
                           "k2_45", "Rmin@1dB", "BLP");
        for (const auto &[l, e] : p.at("launches").items())
        {
            auto slope = [&](const char *angle, const char *k) {
                return e.contains(angle) ? num(e.at(angle).at(k), 3) : std::string("-");
            };
            out += fmt::format("  {:<9} {:>9} {:>8} {:>8} {:>8} {:>8} {:>10} {:>9}\n", l,
                               e.contains("coupling_loss_db") ? num(e.at("coupling_loss_db"), 3) : "-",
                               slope("slopes_DEG90", "k1"), slope("slopes_DEG90", "k2"), slope("slopes_DEG45", "k1"),
                               slope("slopes_DEG45", "k2"),
                               e.contains("min_bend_radius_mm") ? num(e.at("min_bend_radius_mm"), 0) : "-",
                               e.contains("blp_ghz_m") ? num(e.at("blp_ghz_m"), 1) : "-");
        }
    }
    for (const auto &n : r.at("notes"))
        out += "note: " + n.get<std::string>() + "\n";
    for (const auto &c : r.at("model_cards"))
        out += "wrote " + c.get<std::string>() + "\n";
    return out;
}

} // namespace

std::string render_text(const Json &report)
{
    if (!report.is_object() || !report.contains("kind") || !report.contains("manifest"))
        throw ArgumentError("not a report document (missing 'kind' or 'manifest')");
    try
    {
        const auto kind = report.at("kind").get<std::string>();
        if (kind == "gen")
            return render_gen(report);
        if (kind == "budget")
            return render_budget(report);
        if (kind == "optimize")
            return render_optimize(report);
        if (kind == "fit")
            return render_fit(report);
        if (kind == "error")
            return header(report) + fmt::format("error ({}): {}\n", report.at("error_class").get<std::string>(),
                                                report.at("message").get<std::string>());
        throw ArgumentError("unknown report kind '" + kind + "'");
    }
    catch (const nlohmann::json::exception &e)
    {
        throw ArgumentError(std::string("malformed report document: ") + e.what());
    }
}

} // namespace wgd
