#include <gtest/gtest.h>

#include <fstream>
#include <sstream>

#include "support.hpp"
#include "wgd/cli.hpp"
#include "wgd/io.hpp"

using namespace wgd;
namespace fs = std::filesystem;

namespace {

struct Run
{
    int code;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args)
{
    args.insert(args.begin(), "wgd");
    std::vector<const char *> argv;
    for (const auto &a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string &name)
{
    const auto p = fs::temp_directory_path() / ("wgd_cli_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

void put(const fs::path &p, const std::string &text)
{
    std::ofstream(p) << text;
}

std::string slurp(const fs::path &p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

std::string study_config()
{
    return (test::source_dir() / "configs" / "shuffle_router.json").string();
}

} // namespace

TEST(Cli, MissingSubcommandIsInputError)
{
    EXPECT_EQ(run({}).code, kExitInput);
    EXPECT_EQ(run({"frobnicate"}).code, kExitInput);
}

TEST(Cli, FitEmptyDirectory)
{
    const auto dir = scratch("fit_empty");
    fs::create_directories(dir / "in");
    const auto r = run({"fit", (dir / "in").string(), "--out", (dir / "out").string()});
    EXPECT_EQ(r.code, kExitInput);
    EXPECT_NE(r.err.find("no series found"), std::string::npos);
    EXPECT_TRUE(fs::exists(dir / "out" / "error.json"));
}

TEST(Cli, FitReportsMalformedSeriesAndKeepsOthers)
{
    const auto dir = scratch("fit_mixed");
    fs::create_directories(dir / "in");
    put(dir / "in" / "crossings.csv", "profile,launch,angle_class,x,excess_db\n"
                                      "A,MMF50,DEG90,1,0.1\nA,MMF50,DEG90,5,0.5\nA,MMF50,DEG90,10,1.0\n"
                                      "A,MMF50,DEG90,20,1.5\nA,MMF50,DEG90,40,2.5\n"
                                      "B,MMF50,DEG90,20,1.5\nB,MMF50,DEG90,40,2.5\n");
    put(dir / "in" / "profiles.csv", "profile,width_um,height_um,delta_n,propagation_loss_db_per_cm\n"
                                     "A,50,50,0.02,0.04\nB,50,50,0.02,0.04\n");
    const auto r = run({"fit", (dir / "in").string(), "--out", (dir / "out").string()});
    EXPECT_EQ(r.code, kExitInput);
    EXPECT_TRUE(fs::exists(dir / "out" / "model-cards" / "A.json"));
    const auto report = Json::parse(slurp(dir / "out" / "fit_report.json"));
    EXPECT_EQ(report["kind"], "fit");
    EXPECT_NE(r.out.find("[FAILED] crossing B/MMF50/DEG90"), std::string::npos);
    EXPECT_EQ(r.out.find("[FAILED] crossing A"), std::string::npos);
    const auto card = model_card_from_json(Json::parse(slurp(dir / "out" / "model-cards" / "A.json")), "A");
    EXPECT_NEAR(card.slopes(Launch::MMF50, AngleClass::DEG90).k1_db_per_crossing, 0.1, 1e-9);
    EXPECT_NEAR(card.slopes(Launch::MMF50, AngleClass::DEG90).k2_db_per_crossing, 0.05, 1e-9);
}

TEST(Cli, FitShippedDataMatchesShippedCards)
{
    const auto dir = scratch("fit_shipped");
    const auto r = run({"fit", (test::data_dir() / "table-authoritative").string(),
                        (test::data_dir() / "figure-digitized").string(), "--out", dir.string()});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    for (const char *p : {"WG01", "WG02", "WG03"})
    {
        const auto name = std::string(p) + ".json";
        const auto fresh = model_card_from_json(Json::parse(slurp(dir / "model-cards" / name)), name);
        const auto shipped =
            model_card_from_json(Json::parse(slurp(test::data_dir() / "model-cards" / name)), name);
        EXPECT_EQ(model_card_to_json(fresh).dump(), model_card_to_json(shipped).dump());
    }
}

TEST(Cli, GenPrintsStatistics)
{
    const auto dir = scratch("gen");
    const auto r = run({"gen", "--config", study_config(), "--out", dir.string()});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_EQ(r.out, "routes=100 bends=100 crossings=1814 worst=90\n");
    EXPECT_TRUE(fs::exists(dir / "layout.json"));
    EXPECT_TRUE(fs::exists(dir / "gen_report.txt"));
}

TEST(Cli, BudgetSingleTrivialRouteIsCouplingOnly)
{
    const auto dir = scratch("budget_trivial");
    put(dir / "layout.json", R"({"routes": [{"id": [0, 1], "geometry": [{"type": "segment", "a": [0, 0], "b": [50, 0]}]}]})");
    put(dir / "run.json", R"({"model_cards": ")" + (test::data_dir() / "model-cards").generic_string() +
                              R"(", "layout_file": "layout.json", "launch": "MMF50"})");
    const auto r = run({"budget", "--config", (dir / "run.json").string(), "--profile", "WG02", "--out",
                        (dir / "out").string()});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    const auto doc = Json::parse(slurp(dir / "out" / "budget_report.json"));
    const auto text = doc.dump();
    EXPECT_NE(text.find("2.879"), std::string::npos);
    EXPECT_NE(r.out.find("2.88"), std::string::npos);
}

TEST(Cli, BudgetNeedsOneProfile)
{
    const auto dir = scratch("budget_many");
    const auto r = run({"budget", "--config", study_config(), "--out", dir.string()});
    EXPECT_EQ(r.code, kExitInput);
    EXPECT_NE(r.err.find("--profile"), std::string::npos);
}

TEST(Cli, UnknownProfileAndLaunchNamed)
{
    const auto dir = scratch("unknown");
    auto r = run({"budget", "--config", study_config(), "--profile", "WG09", "--out", dir.string()});
    EXPECT_EQ(r.code, kExitInput);
    EXPECT_NE(r.err.find("WG09"), std::string::npos);
    EXPECT_TRUE(fs::exists(dir / "error.json"));
    r = run({"budget", "--config", study_config(), "--profile", "WG01", "--launch", "OM3", "--out", dir.string()});
    EXPECT_EQ(r.code, kExitInput);
    EXPECT_NE(r.err.find("OM3"), std::string::npos);
}

TEST(Cli, BadConfigKeyIsInputError)
{
    const auto dir = scratch("bad_config");
    put(dir / "run.json", R"({"lanch": "MMF50"})");
    const auto r = run({"gen", "--config", (dir / "run.json").string(), "--out", dir.string()});
    EXPECT_EQ(r.code, kExitInput);
    EXPECT_NE(r.err.find("lanch"), std::string::npos);
}

TEST(Cli, BoardTooSmallIsInfeasible)
{
    const auto dir = scratch("small_board");
    put(dir / "run.json", R"({"layout": {"n_cards": 10, "board": {"width_mm": 20, "height_mm": 20, "card_pitch_mm": 2}}})");
    const auto r = run({"gen", "--config", (dir / "run.json").string(), "--out", dir.string()});
    EXPECT_EQ(r.code, kExitInfeasible) << r.err;
    const auto err = Json::parse(slurp(dir / "error.json"));
    EXPECT_EQ(err["kind"], "error");
}

TEST(Cli, OptimizeStudy)
{
    const auto dir = scratch("optimize");
    const auto r = run({"optimize", "--config", study_config(), "--out", dir.string()});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_NE(r.out.find("WG02"), std::string::npos);
    EXPECT_NE(r.out.find("WG03"), std::string::npos);
    const auto doc = Json::parse(slurp(dir / "optimize_report.json"));
    EXPECT_EQ(doc["kind"], "optimize");
}

TEST(Cli, OptimizeEverythingCappedIsInfeasible)
{
    const auto dir = scratch("optimize_capped");
    put(dir / "run.json", R"({"model_cards": ")" + (test::data_dir() / "model-cards").generic_string() +
                              R"(", "scenarios": [{"name": "tiny", "max_board_side_mm": 10}]})");
    const auto r = run({"optimize", "--config", (dir / "run.json").string(), "--out", dir.string()});
    EXPECT_EQ(r.code, kExitInfeasible);
}

TEST(Cli, OutputsAreByteIdenticalAndReportRerenders)
{
    const auto a = scratch("det_a");
    const auto b = scratch("det_b");
    ASSERT_EQ(run({"optimize", "--config", study_config(), "--out", a.string()}).code, kExitOk);
    ASSERT_EQ(run({"optimize", "--config", study_config(), "--out", b.string()}).code, kExitOk);
    for (const char *f : {"optimize_report.json", "optimize_report.txt"})
        EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
    const auto r = run({"report", (a / "optimize_report.json").string()});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_EQ(r.out, slurp(a / "optimize_report.txt"));
}

TEST(Cli, SeededGenIsRandomFixture)
{
    const auto dir = scratch("seeded");
    const auto r = run({"gen", "--seed", "7", "--out", dir.string()});
    ASSERT_EQ(r.code, kExitOk) << r.err;
    EXPECT_EQ(r.out, "routes=20 bends=20 crossings=15 worst=6\n");
}
