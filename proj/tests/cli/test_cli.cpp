#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "fixtures.hpp"

#include "frugal/harness.hpp"
#include "frugal/scenario.hpp"
#include "frugal/synthetic.hpp"

#include <doctest.h>

#include <cstdlib>
#include <sys/wait.h>

namespace fs = std::filesystem;

namespace {

struct Result {
    int code{};
    std::string out;
    std::string err;
};

Result run(const std::string &args, const fixtures::TempDir &scratch) {
    const fs::path out = scratch / "stdout.txt";
    const fs::path err = scratch / "stderr.txt";
    const std::string cmd = fmt::format("\"{}\" {} >\"{}\" 2>\"{}\"", FRUGAL_CLI_PATH, args, out.string(), err.string());
    const int status = std::system(cmd.c_str());
    return { WIFEXITED(status) ? WEXITSTATUS(status) : -1, fixtures::read_text(out), fixtures::read_text(err) };
}

std::string q(const fs::path &p) { return "\"" + p.string() + "\""; }

// 60 generated instances written in ASLib layout plus a small, fast config.
void write_small_setup(const fixtures::TempDir &dir) {
    write_scenario(frugal::make_synthetic_scenario({ .n_instances = 60, .n_algorithms = 3, .seed = 1 }), dir / "scenario");
    fixtures::write_text(dir / "fast.cfg", "n_trees = 10\nbatch_frac = 0.1\nfolds = 1\nseeds = 1\n");
}

}  // namespace

TEST_CASE("stats prints the scenario summary") {
    fixtures::TempDir dir{ "cli" };
    fixtures::write_two_by_two(dir / "s");
    const Result r = run("stats " + q(dir / "s"), dir);
    CHECK(r.code == 0);
    for (const char *field : { "instances   2", "algorithms  2", "features", "total_h", "vbs_h", "sbs_h" }) {
        CHECK(r.out.find(field) != std::string::npos);
    }
}

TEST_CASE("missing description.txt exits 2 and names the file") {
    fixtures::TempDir dir{ "cli" };
    fixtures::write_two_by_two(dir / "s");
    fs::remove(dir / "s" / "description.txt");
    const Result r = run("stats " + q(dir / "s"), dir);
    CHECK(r.code == 2);
    CHECK(r.err.find("description.txt") != std::string::npos);
}

TEST_CASE("malformed scenario exits 2") {
    fixtures::TempDir dir{ "cli" };
    fixtures::write_two_by_two(dir / "s");
    fixtures::write_text(dir / "s" / "algorithm_runs.arff", "@relation broken\n@data\n1,2\n");
    CHECK(run("stats " + q(dir / "s"), dir).code == 2);
}

TEST_CASE("invalid selection is a usage error") {
    fixtures::TempDir dir{ "cli" };
    write_small_setup(dir);
    const Result r = run("run " + q(dir / "scenario") + " --selection greedy --out " + q(dir / "runs"), dir);
    CHECK(r.code == 1);
    CHECK_FALSE(fs::exists(dir / "runs"));
    CHECK(run("frobnicate", dir).code == 1);
    CHECK(run("run " + q(dir / "scenario") + " --configs random --selection random", dir).code == 1);
}

TEST_CASE("random selection without TO/DT reaches the passive selector") {
    fixtures::TempDir dir{ "cli" };
    write_small_setup(dir);
    const Result r = run("run " + q(dir / "scenario") + " --config " + q(dir / "fast.cfg") + " --selection random --jobs 1 --out " + q(dir / "runs"), dir);
    REQUIRE(r.code == 0);
    CHECK(r.out.find("[1/1] random fold 0 seed 0") != std::string::npos);
    const auto logs = frugal::read_step_logs(dir / "runs" / "random" / "fold0-seed0.csv");
    REQUIRE_FALSE(logs.empty());
    CHECK(logs.back().perf_ratio == 1.0);
    CHECK(logs.back().data_frac == 1.0);
}

TEST_CASE("full grid, summary and plot; reruns are idempotent") {
    fixtures::TempDir dir{ "cli" };
    write_small_setup(dir);
    const std::string run_cmd = "run " + q(dir / "scenario") + " --config " + q(dir / "fast.cfg") + " --jobs 1 --out " + q(dir / "runs");
    REQUIRE(run(run_cmd, dir).code == 0);
    std::size_t dirs = 0;
    for (const auto &e : fs::directory_iterator(dir / "runs")) {
        dirs += e.is_directory() ? 1 : 0;
    }
    CHECK(dirs == 8);
    const std::string before = fixtures::read_text(dir / "runs" / "uncertainty-to-dt" / "fold0-seed0.csv");
    const Result again = run(run_cmd, dir);
    CHECK(again.code == 0);
    CHECK(fixtures::read_text(dir / "runs" / "uncertainty-to-dt" / "fold0-seed0.csv") == before);

    REQUIRE(run("summarize " + q(dir / "runs"), dir).code == 0);
    const frugal::CurveSummary summary = frugal::read_summary_csv(dir / "runs" / "summary.csv");
    CHECK(summary.curves.size() == 8);
    // the summary file itself is not read back as a step log
    REQUIRE(run("summarize " + q(dir / "runs") + " -o " + q(dir / "again.csv"), dir).code == 0);
    CHECK(fixtures::read_text(dir / "again.csv") == fixtures::read_text(dir / "runs" / "summary.csv"));

    const Result plot = run("plot " + q(dir / "runs" / "summary.csv") + " --aggregate-by dt -o " + q(dir / "p.svg"), dir);
    REQUIRE(plot.code == 0);
    const std::string svg = fixtures::read_text(dir / "p.svg");
    std::size_t lines = 0;
    for (auto pos = svg.find("<polyline"); pos != std::string::npos; pos = svg.find("<polyline", pos + 1)) {
        ++lines;
    }
    CHECK(lines == 2);
    CHECK(run("plot " + q(dir / "runs" / "summary.csv") + " --configs nothing -o " + q(dir / "none.svg"), dir).code == 2);
    CHECK_FALSE(fs::exists(dir / "none.svg"));
}

TEST_CASE("flags override the config file with a warning") {
    fixtures::TempDir dir{ "cli" };
    write_small_setup(dir);
    const Result r = run("run " + q(dir / "scenario") + " --config " + q(dir / "fast.cfg") + " --selection random --dynamic-timeout --seeds 1 --jobs 1 --out " + q(dir / "runs"), dir);
    CHECK(r.code == 0);
    CHECK(r.err.find("warning: --seeds overrides 'seeds'") != std::string::npos);
    CHECK(fs::exists(dir / "runs" / "random-dt" / "fold0-seed0.csv"));
}

TEST_CASE("summarizing an empty directory exits 2") {
    fixtures::TempDir dir{ "cli" };
    fs::create_directories(dir / "empty");
    const Result r = run("summarize " + q(dir / "empty"), dir);
    CHECK(r.code == 2);
    CHECK_FALSE(r.err.empty());
}
