#include "fixtures.hpp"

#include "frugal/config.hpp"
#include "frugal/errors.hpp"
#include "frugal/synthetic.hpp"

#include <doctest.h>

using namespace frugal;

TEST_SUITE("config") {
    TEST_CASE("defaults cover the full grid") {
        const RunSettings s;
        CHECK(s.configs.size() == 8);
        CHECK(s.folds == 10);
        CHECK(s.seeds == 5);
        CHECK(s.loop.batch_fraction == 0.01);
        CHECK(s.loop.forest.n_trees == 100);
    }

    TEST_CASE("keys, comments and blank lines") {
        const RunSettings s = parse_run_settings(R"(# experiment
configs = random, uncertainty-to-dt   # two arms
folds = 3
seeds = 2
seed = 11

batch_frac = 0.05
initial_size = 4
n_trees = 25
max_features = sqrt
bootstrap = off
dt_growth = 3
dt_window = 4
with_passive = yes
out = somewhere
)");
        REQUIRE(s.configs.size() == 2);
        CHECK(s.configs[0].id() == "random");
        CHECK(s.configs[1].id() == "uncertainty-to-dt");
        CHECK(s.folds == 3);
        CHECK(s.seeds == 2);
        CHECK(s.seed == 11);
        CHECK(s.loop.batch_fraction == 0.05);
        CHECK(s.loop.initial_size == std::optional<std::size_t>{ 4 });
        CHECK(s.loop.forest.n_trees == 25);
        CHECK_FALSE(s.loop.forest.max_features.has_value());
        CHECK_FALSE(s.loop.forest.bootstrap);
        CHECK(s.loop.controller.growth_factor == 3.0);
        CHECK(s.loop.controller.plateau_window == 4);
        CHECK(s.with_passive);
        CHECK(s.out == "somewhere");
        CHECK(s.explicit_keys.count("folds") == 1);
        CHECK(s.explicit_keys.count("jobs") == 0);
    }

    TEST_CASE("selection / TO / DT keys narrow the grid") {
        const RunSettings s = parse_run_settings("selection = random\ndynamic_timeout = true\n");
        REQUIRE(s.configs.size() == 2);
        for (const ExperimentConfig &c : s.configs) {
            CHECK(c.selection == SelectionStrategy::random);
            CHECK(c.dynamic_timeout);
        }
        CHECK_THROWS_AS((void)parse_run_settings("timeout_predictor = on\ntimeout_predictor = off\n"), ParseError);
        CHECK_THROWS_AS((void)parse_run_settings("configs = random\ntimeout_predictor = on\n"), ConfigError);
    }

    TEST_CASE("errors carry the line number") {
        try {
            (void)parse_run_settings("folds = 3\n\nnope = 1\n", "exp.cfg");
            FAIL("expected an error");
        } catch (const ParseError &e) {
            CHECK(e.line() == 3);
            CHECK(std::string{ e.what() }.find("exp.cfg:3") != std::string::npos);
        }
        CHECK_THROWS_AS((void)parse_run_settings("folds = ten\n"), ParseError);
        CHECK_THROWS_AS((void)parse_run_settings("folds = 0\n"), ParseError);
        CHECK_THROWS_AS((void)parse_run_settings("batch_frac = 1.5\n"), ParseError);
        CHECK_THROWS_AS((void)parse_run_settings("selection = greedy\n"), ParseError);
        CHECK_THROWS_AS((void)parse_run_settings("just some words\n"), ParseError);
        CHECK_THROWS_AS((void)parse_run_settings("seed = 1\nseed = 2\n"), ParseError);
        CHECK_THROWS_AS((void)read_run_settings("/nonexistent/exp.cfg"), DataError);
    }

    TEST_CASE("every documented key is accepted") {
        for (const std::string_view key : config_keys()) {
            RunSettings s;
            std::string value = "1";
            if (key == "configs") value = "random";
            else if (key == "selection") value = "uncertainty";
            else if (key == "timeout_predictor" || key == "dynamic_timeout" || key == "with_passive" || key == "bootstrap") value = "true";
            else if (key == "out") value = "dir";
            else if (key == "batch_frac" || key == "dt_initial_fraction" || key == "dt_tolerance") value = "0.5";
            else if (key == "dt_growth" || key == "min_samples_split") value = "2";
            CHECK_NOTHROW(apply_setting(s, key, value));
        }
    }

    TEST_CASE("to_spec carries the loop settings and adds passive arms") {
        const Scenario sc = make_synthetic_scenario({ .n_instances = 30 });
        const RunSettings s = parse_run_settings("configs = random\nwith_passive = true\nfolds = 2\nn_trees = 7\n");
        const ExperimentSpec spec = s.to_spec(sc);
        REQUIRE(spec.configs.size() == 3);
        CHECK(spec.configs[1].id() == "passive");
        CHECK(spec.configs[2].id() == "passive-to");
        CHECK(spec.n_folds == 2);
        CHECK(spec.loop.forest.n_trees == 7);
        CHECK(spec.scenario == &sc);
    }
}
