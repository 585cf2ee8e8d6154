#include "fixtures.hpp"

#include "frugal/errors.hpp"
#include "frugal/rng.hpp"
#include "frugal/scenario.hpp"

#include <doctest.h>

#include <algorithm>

using namespace frugal;
namespace fs = std::filesystem;

namespace {

void write_minimal(const fs::path &dir, const std::string &runs_body, const std::string &extra_description = "") {
    fs::create_directories(dir);
    fixtures::write_text(dir / "description.txt", "scenario_id: mini\nperformance_type: [runtime]\nmaximize: [false]\nalgorithm_cutoff_time: 100\n" + extra_description);
    fixtures::write_text(dir / "algorithm_runs.arff", "@relation r\n@attribute instance_id string\n@attribute repetition numeric\n@attribute algorithm string\n"
                                                      "@attribute runtime numeric\n@attribute runstatus {ok,timeout,memout,crash}\n@data\n" +
                                                          runs_body);
    fixtures::write_text(dir / "feature_values.arff",
                         "@relation f\n@attribute instance_id string\n@attribute repetition numeric\n@attribute f1 numeric\n@attribute f2 numeric\n@data\n"
                         "p1,1,1,?\np2,1,2,5\np3,1,3,6\n");
}

const std::string full_runs = "p1,1,A,5,ok\np1,1,B,100,timeout\np2,1,A,20,ok\np2,1,B,7,ok\np3,1,A,40,crash\np3,1,B,100,memout\n";

std::string load_error(const fs::path &dir) {
    try {
        (void)load_scenario(dir);
    } catch (const Error &e) {
        return e.what();
    }
    return {};
}

}  // namespace

TEST_SUITE("scenario") {
    TEST_CASE("minimal 2-algorithm, 3-instance scenario") {
        fixtures::TempDir dir{ "scn" };
        write_minimal(dir.path(), full_runs);
        const Scenario s = load_scenario(dir.path());
        CHECK(s.id == "mini");
        CHECK(s.cutoff == 100.0);
        CHECK(s.n_instances() == 3);
        CHECK(s.n_algorithms() == 2);
        CHECK(s.runs.size() == 6);
        CHECK(s.algorithms == std::vector<std::string>{ "A", "B" });
        CHECK(s.run(0, 1).status == RunStatus::timeout);
        CHECK(s.run(1, 1).runtime == 7.0);
        // non-ok below the cutoff is an ordinary failure, at the cutoff a timeout
        CHECK(s.run(2, 0).status == RunStatus::other_failure);
        CHECK(s.run(2, 1).status == RunStatus::timeout);
        CHECK_FALSE(s.feature_values[0][1].has_value());
        CHECK(s == load_scenario(dir.path()));
    }

    TEST_CASE("omitted run cell is a non-total mapping error") {
        fixtures::TempDir dir{ "scn" };
        write_minimal(dir.path(), "p1,1,A,5,ok\np1,1,B,100,timeout\np2,1,A,20,ok\np2,1,B,7,ok\np3,1,A,40,crash\n");
        const std::string msg = load_error(dir.path());
        CHECK(msg.find("p3") != std::string::npos);
        CHECK(msg.find("B") != std::string::npos);
    }

    TEST_CASE("unknown instance and duplicate runs are rejected") {
        fixtures::TempDir dir{ "scn" };
        write_minimal(dir.path(), full_runs + "p9,1,A,1,ok\n");
        CHECK(load_error(dir.path()).find("p9") != std::string::npos);
        write_minimal(dir.path(), full_runs + "p1,1,A,3,ok\n");
        CHECK_FALSE(load_error(dir.path()).empty());
    }

    TEST_CASE("other repetitions are ignored") {
        fixtures::TempDir dir{ "scn" };
        write_minimal(dir.path(), full_runs + "p1,2,A,99,ok\n");
        CHECK(load_scenario(dir.path()).run(0, 0).runtime == 5.0);
    }

    TEST_CASE("missing description names the file") {
        fixtures::TempDir dir{ "scn" };
        write_minimal(dir.path(), full_runs);
        fs::remove(dir / "description.txt");
        CHECK(load_error(dir.path()).find("description.txt") != std::string::npos);
    }

    TEST_CASE("non-runtime and maximising scenarios are rejected") {
        fixtures::TempDir dir{ "scn" };
        write_minimal(dir.path(), full_runs);
        fixtures::write_text(dir / "description.txt", "scenario_id: q\nperformance_type: [solution_quality]\nmaximize: [false]\nalgorithm_cutoff_time: 10\n");
        CHECK(load_error(dir.path()).find("runtime") != std::string::npos);
        fixtures::write_text(dir / "description.txt", "scenario_id: q\nperformance_type: [runtime]\nmaximize: [true]\nalgorithm_cutoff_time: 10\n");
        CHECK_FALSE(load_error(dir.path()).empty());
    }

    TEST_CASE("feature costs are summed per instance") {
        fixtures::TempDir dir{ "scn" };
        write_minimal(dir.path(), full_runs);
        fixtures::write_text(dir / "feature_costs.arff", "@relation c\n@attribute instance_id string\n@attribute repetition numeric\n@attribute g1 numeric\n"
                                                         "@attribute g2 numeric\n@data\np1,1,1,2\np2,1,0.5,?\np3,1,0,0\n");
        const Scenario s = load_scenario(dir.path());
        REQUIRE(s.feature_costs.has_value());
        CHECK((*s.feature_costs)[0] == 3.0);
        CHECK((*s.feature_costs)[1] == 0.5);
    }

    TEST_CASE("2x2 fixture statistics") {
        fixtures::TempDir dir{ "scn" };
        fixtures::write_two_by_two(dir.path());
        const ScenarioStats st = scenario_stats(load_scenario(dir.path()));
        CHECK(st.n_instances == 2);
        CHECK(st.n_algorithms == 2);
        CHECK(st.n_features == 1);
        CHECK(st.total_time_s == 22.0);
        CHECK(st.vbs_time_s == 2.0);
        CHECK(st.sbs_time_s == 11.0);
    }

    TEST_CASE("dominating algorithm gives VBS = SBS") {
        const Scenario s = fixtures::make_scenario({ { 1, 5 }, { 2, 9 }, { 3, 3.5 } }, { { 0.0 }, { 1.0 }, { 2.0 } }, 10);
        const ScenarioStats st = scenario_stats(s);
        CHECK(st.vbs_time_s == st.sbs_time_s);
        CHECK(st.vbs_time_s == 6.0);
    }

    TEST_CASE("write then load reproduces the scenario") {
        fixtures::TempDir dir{ "scn" };
        Scenario s = fixtures::make_scenario({ { 1.5, 100 }, { 10, 0.25 }, { 99, 100 } }, { { 0.5, std::nullopt }, { 1.0, 2.0 }, { -3.0, 4.0 } }, 100);
        s.runs[4] = { 2, 0, 42.0, RunStatus::other_failure };
        write_scenario(s, dir.path());
        const Scenario back = load_scenario(dir.path());
        CHECK(back == s);
    }

    TEST_CASE("property: VBS <= SBS <= total on random scenarios") {
        Rng rng{ 5 };
        for (int trial = 0; trial < 100; ++trial) {
            const std::size_t n_inst = 1 + uniform_index(rng, 12);
            const std::size_t n_alg = 2 + uniform_index(rng, 4);
            std::vector<std::vector<double>> rt(n_inst, std::vector<double>(n_alg));
            std::vector<std::vector<FeatureValue>> feats(n_inst, std::vector<FeatureValue>{ 0.0 });
            for (auto &row : rt) {
                for (double &v : row) {
                    v = uniform01(rng) * 120.0;
                }
            }
            const ScenarioStats st = scenario_stats(fixtures::make_scenario(rt, feats, 100));
            CHECK(st.vbs_time_s <= st.sbs_time_s);
            CHECK(st.sbs_time_s <= st.total_time_s);
        }
    }
}
