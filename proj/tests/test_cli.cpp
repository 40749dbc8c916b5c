#include <doctest.h>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "test_support.hpp"
#include "thermoharvest/cli.hpp"
#include "thermoharvest/util.hpp"

using namespace thermoharvest;

namespace {

struct Run {
    int code = 0;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "thermoharvest");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    Run r;
    r.code = run_command(static_cast<int>(argv.size()), argv.data(), out, err);
    r.out = out.str();
    r.err = err.str();
    return r;
}

std::vector<std::vector<std::string>> csv_rows(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> cells;
        std::istringstream ls(line);
        std::string c;
        while (std::getline(ls, c, ',')) cells.push_back(c);
        rows.push_back(cells);
    }
    return rows;
}

}  // namespace

TEST_CASE("simulate reports the reference operating point") {
    th_test::TempDir dir("cli_sim");
    const auto r = run({"--out", dir.str(), "simulate"});
    REQUIRE(r.code == 0);
    const auto doc = nlohmann::json::parse(read_text_file(dir.path() / "simulate.json"));
    CHECK(std::abs(doc["metrics"]["dT_K"].get<double>() - 12.9) <= 0.5);
    CHECK(doc["metrics"]["voc_V"].get<double>() == doctest::Approx(2.709e-3).epsilon(0.01));
    CHECK(doc["provenance"]["seed"].get<std::uint64_t>() == 42);
    CHECK(nlohmann::json::parse(r.out)["metrics"]["pout_W"].get<double>() > 0.0);
    CHECK(std::filesystem::exists(dir.path() / "config.log"));
}

TEST_CASE("validate passes and writes its table") {
    th_test::TempDir dir("cli_val");
    const auto r = run({"--out", dir.str(), "validate"});
    CHECK(r.code == 0);
    CHECK(r.err.find("\"error\"") == std::string::npos);
    const auto rows = csv_rows(read_text_file(dir.path() / "validate.csv"));
    REQUIRE(rows.size() > 1);
    CHECK(rows[0] == std::vector<std::string>{"check", "error", "tolerance", "passed"});
    for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].back() == "true");
}

TEST_CASE("optimize with a fixed seed is byte-reproducible") {
    th_test::TempDir a("cli_opt_a");
    th_test::TempDir b("cli_opt_b");
    for (const auto* d : {&a, &b}) {
        REQUIRE(run({"--seed", "7", "--out", d->str(), "optimize", "--evaluator", "direct", "--population", "16",
                     "--generations", "6"})
                    .code == 0);
    }
    for (const auto* f : {"front.csv", "generations.csv", "front.svg", "knee.json"}) {
        CHECK_MESSAGE(read_text_file(a.path() / f) == read_text_file(b.path() / f), f);
    }
    CHECK(read_text_file(a.path() / "front.csv").find("seed=7") != std::string::npos);
}

TEST_CASE("surrogate workflow: dataset, train, predict, optimize, report") {
    th_test::TempDir dir("cli_flow");
    const auto out = dir.str();
    REQUIRE(run({"--out", out, "--seed", "3", "dataset", "--samples", "60"}).code == 0);
    REQUIRE(run({"--out", out, "--seed", "3", "train"}).code == 0);
    const auto cv = csv_rows(read_text_file(dir.path() / "cv_metrics.csv"));
    CHECK(cv[0] == std::vector<std::string>{"target", "folds", "r_squared", "rmse"});
    REQUIRE(run({"--out", out, "--seed", "3", "predict", "--input", (dir.path() / "dataset.csv").string()}).code ==
            0);
    const auto pred = csv_rows(read_text_file(dir.path() / "predictions.csv"));
    CHECK(pred.size() == 61);
    REQUIRE(run({"--out", out, "--seed", "3", "optimize", "--population", "12", "--generations", "4"}).code == 0);
    REQUIRE(run({"--out", out, "--seed", "3", "sweep"}).code == 0);
    REQUIRE(run({"--out", out, "--seed", "3", "spectrum"}).code == 0);
    REQUIRE(run({"--out", out, "--seed", "3", "report"}).code == 0);
    CHECK(std::filesystem::exists(dir.path() / "manifest.json"));

    for (const auto& entry : std::filesystem::directory_iterator(dir.path())) {
        const auto text = read_text_file(entry.path());
        const bool stamped = text.find("# thermoharvest " + std::string(kArtifactVersion) + " seed=3") !=
                                 std::string::npos ||
                             text.find("\"provenance\"") != std::string::npos;
        CHECK_MESSAGE(stamped, entry.path().filename().string());
    }
}

TEST_CASE("gap sweep lowers the enhancement") {
    th_test::TempDir dir("cli_sweep");
    REQUIRE(run({"--out", dir.str(), "sweep", "--variable", "gap_m", "--min", "2e-9", "--max", "20e-9", "--points",
                 "10"})
                .code == 0);
    const auto rows = csv_rows(read_text_file(dir.path() / "sweep_gap_m.csv"));
    REQUIRE(rows.size() == 11);
    CHECK(rows[0][0] == "gap_m");
    const auto col = std::find(rows[0].begin(), rows[0].end(), "max_enh") - rows[0].begin();
    REQUIRE(col < static_cast<long>(rows[0].size()));
    for (std::size_t i = 2; i < rows.size(); ++i) {
        CHECK(std::stod(rows[i][col]) < std::stod(rows[i - 1][col]));
    }
    CHECK(std::filesystem::exists(dir.path() / "sweep_gap_m.svg"));
}

TEST_CASE("failures print one JSON error line") {
    th_test::TempDir dir("cli_err");
    write_text_file(dir.path() / "bad.json", R"({"design": {"flair_angle": 30}})");
    const auto r = run({"--config", (dir.path() / "bad.json").string(), "--out", dir.str(), "simulate"});
    CHECK(r.code == 1);
    const auto doc = nlohmann::json::parse(r.err);
    CHECK(doc["error"]["kind"] == "config");
    CHECK(doc["error"]["message"].get<std::string>().find("flair_angle") != std::string::npos);

    const auto usage = run({"bogus"});
    CHECK(usage.code == 2);
    CHECK(nlohmann::json::parse(usage.err)["error"]["kind"] == "usage");

    const auto missing = run({"--out", dir.str(), "optimize"});
    CHECK(missing.code == 1);
    CHECK(nlohmann::json::parse(missing.err)["error"]["kind"] == "io");

    const auto help = run({"--help"});
    CHECK(help.code == 0);
    CHECK(help.out.find("simulate") != std::string::npos);
}
