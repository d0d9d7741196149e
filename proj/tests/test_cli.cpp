#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>
#include <string>

#include <json.hpp>

#include "waistlab/errors.hpp"
#include "waistlab/report.hpp"

namespace fs = std::filesystem;

namespace {

struct RunResult {
    int code = -1;
    std::string out;
    std::string err;
};

fs::path scratch() {
    static const fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / ("waistlab_cli_" + std::to_string(::getpid()));
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunResult run(const std::string& args, const std::string& env = "") {
    fs::path out = scratch() / "stdout.txt", err = scratch() / "stderr.txt";
    std::string cmd = env + " '" WAISTLAB_CLI_PATH "' " + args + " > '" + out.string() + "' 2> '" + err.string() + "'";
    int status = std::system(cmd.c_str());
    RunResult r;
    r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    r.out = slurp(out);
    r.err = slurp(err);
    return r;
}

std::string data(const std::string& name) { return std::string("'") + WAISTLAB_DATA_DIR + "/" + name + "'"; }

nlohmann::json report(const RunResult& r) {
    auto j = nlohmann::json::parse(r.out);
    waistlab::validate_report(j);
    return j;
}

}  // namespace

TEST(Cli, WaistVerifyHopfDescendsToPi) {
    auto r = run("waist verify --map hopf3 --bound even-map-pi");
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = report(r);
    EXPECT_TRUE(j["passed"].get<bool>());
    ASSERT_EQ(j["records"].size(), 1u);
    const auto& rec = j["records"][0];
    EXPECT_EQ(rec["bound_ref"], "even-map-pi");
    EXPECT_NEAR(rec["values"]["measured_sup"].get<double>(), std::numbers::pi, 1e-9);
}

TEST(Cli, CroftonGreatCircle) {
    auto r = run("crofton estimate --mesh " + data("greatcircle.mesh") + " --codim 1 --samples 10000 --seed 1");
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = report(r);
    double v = j["records"][0]["values"]["estimate"]["value"].get<double>();
    EXPECT_NEAR(v, 2 * std::numbers::pi, 0.02 * 2 * std::numbers::pi);
    EXPECT_EQ(j["config"]["seed"], 1);
    EXPECT_EQ(j["config"]["samples"], 10000);
}

TEST(Cli, FillDemo) {
    auto r = run("fill demo --n 2 --k 0 --seed 7");
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = report(r);
    EXPECT_TRUE(j["passed"].get<bool>());
    bool saw_ratio = false;
    for (const auto& rec : j["records"])
        if (rec["values"].contains("ratio")) {
            saw_ratio = true;
            EXPECT_LE(rec["values"]["ratio"].get<double>(), 2.0);
        }
    EXPECT_TRUE(saw_ratio);
}

TEST(Cli, SuiteSubset) {
    auto r = run("suite --only vaaler --seed 3");
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = report(r);
    ASSERT_FALSE(j["records"].empty());
    for (const auto& rec : j["records"]) EXPECT_EQ(rec["criterion"], "vaaler");
    EXPECT_TRUE(j["timing"].contains("wall_seconds"));
}

TEST(Cli, SameSeedSameReport) {
    auto a = report(run("crofton estimate --mesh " + data("greatcircle.mesh") + " --samples 3000 --seed 5"));
    auto b = report(run("crofton estimate --mesh " + data("greatcircle.mesh") + " --samples 3000 --seed 5 --workers 3"));
    a.erase("timing");
    b.erase("timing");
    a["config"].erase("workers");
    b["config"].erase("workers");
    EXPECT_EQ(a.dump(), b.dump());
}

TEST(Cli, FailedCheckExitsOne) {
    auto r = run("crofton estimate --mesh " + data("greatcircle.mesh") + " --samples 2000 --expect 10");
    EXPECT_EQ(r.code, 1);
    auto j = report(r);
    EXPECT_FALSE(j["passed"].get<bool>());
    EXPECT_FALSE(j["failures"].empty());
}

TEST(Cli, UsageErrorsExitTwo) {
    EXPECT_EQ(run("").code, 2);
    EXPECT_EQ(run("bogus").code, 2);
    EXPECT_EQ(run("waist verify --map nosuchmap --bound sphere-equator").code, 2);
    EXPECT_EQ(run("waist verify --map hopf3 --bound no-such-bound").code, 2);
    EXPECT_EQ(run("crofton estimate --mesh /nonexistent.mesh").code, 2);
    EXPECT_EQ(run("fill demo --n 2 --k 0 --workers 0").code, 2);
    EXPECT_EQ(run("fill demo --n 2 --k 0", "WAISTLAB_WORKERS=abc").code, 2);
    EXPECT_EQ(run("suite --only nosuchcriterion").code, 2);
}

TEST(Cli, ConfigFileAndFlagOverride) {
    fs::path ini = scratch() / "run.ini";
    std::ofstream(ini) << "[crofton.estimate]\nsamples = 2000\nseed = 9\n";
    auto a = report(run("--config '" + ini.string() + "' crofton estimate --mesh " + data("greatcircle.mesh")));
    EXPECT_EQ(a["config"]["samples"], 2000);
    EXPECT_EQ(a["config"]["seed"], 9);
    auto b = report(run("--config '" + ini.string() + "' crofton estimate --mesh " + data("greatcircle.mesh") +
                        " --samples 1500"));
    EXPECT_EQ(b["config"]["samples"], 1500);
    EXPECT_EQ(b["config"]["seed"], 9);
}

TEST(Cli, ConfigSectionsStayWithTheirSubcommand) {
    fs::path ini = scratch() / "sections.ini";
    std::ofstream(ini) << "[crofton.estimate]\nseed = 3\n\n[suite]\nseed = 8\n\n[content.minkowski]\nsamples = 7\n";
    auto a = report(run("--config '" + ini.string() + "' crofton estimate --mesh " + data("greatcircle.mesh") +
                        " --samples 1000"));
    EXPECT_EQ(a["config"]["seed"], 3);
    EXPECT_EQ(a["config"]["samples"], 1000);
}

TEST(Cli, OutAndCsvFiles) {
    fs::path out = scratch() / "report.json", csv = scratch() / "rows.csv";
    auto r = run("sweepout bend --cells 4 --trials 2 --seed 2 --out '" + out.string() + "' --csv '" + csv.string() + "'");
    ASSERT_EQ(r.code, 0) << r.err;
    auto j = nlohmann::json::parse(slurp(out));
    waistlab::validate_report(j);
    std::string text = slurp(csv);
    ASSERT_FALSE(text.empty());
    EXPECT_EQ(text.substr(0, text.find('\n')), "n,k,cells,p,trial,direction,eps,z1,z2,total");
}

TEST(Cli, EnvironmentSetsDefaultWorkers) {
    auto j = report(run("crofton estimate --mesh " + data("greatcircle.mesh") + " --samples 1000", "WAISTLAB_WORKERS=3"));
    EXPECT_EQ(j["config"]["workers"], 3);
}

TEST(Report, ValidatorNamesTheMissingField) {
    auto j = nlohmann::json::parse(R"({"schema_version":1,"tool_version":"x","command":"c","config":{},
        "records":[{"id":"a","criterion":"b","bound_ref":"reproducibility","verdict":"pass","waived":false}],
        "passed":true})");
    try {
        waistlab::validate_report(j);
        FAIL() << "accepted a record without values";
    } catch (const waistlab::UsageError& e) {
        EXPECT_NE(std::string(e.what()).find("values"), std::string::npos);
    }
    j["records"][0]["values"] = nlohmann::json::object();
    EXPECT_NO_THROW(waistlab::validate_report(j));
    j["records"][0]["bound_ref"] = "made-up";
    EXPECT_THROW(waistlab::validate_report(j), waistlab::UsageError);
    j["schema_version"] = 2;
    EXPECT_THROW(waistlab::validate_report(j), waistlab::UsageError);
}
