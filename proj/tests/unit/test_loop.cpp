#include "fixtures.hpp"

#include "frugal/errors.hpp"
#include "frugal/harness.hpp"
#include "frugal/loop.hpp"
#include "frugal/synthetic.hpp"
#include "frugal/uncertainty.hpp"

#include <doctest.h>

#include <map>
#include <numeric>
#include <set>
#include <tuple>

using namespace frugal;

namespace {

// Single fold: train = [0, n_train), test = the rest, no validation.
SplitPlan manual_plan(std::size_t n_train, std::size_t n_total) {
    SplitPlan plan;
    FoldSplit fold;
    for (std::size_t i = 0; i < n_total; ++i) {
        (i < n_train ? fold.train : plan.test).push_back(i);
    }
    plan.folds.push_back(fold);
    return plan;
}

Scenario line_scenario(std::size_t n, std::size_t n_alg, double cutoff = 100.0) {
    std::vector<std::vector<double>> rt;
    std::vector<std::vector<FeatureValue>> feats;
    for (std::size_t i = 0; i < n; ++i) {
        std::vector<double> row;
        for (std::size_t a = 0; a < n_alg; ++a) {
            row.push_back(1.0 + static_cast<double>((i * 7 + a * 13) % 50));
        }
        rt.push_back(row);
        feats.push_back({ static_cast<double>(i) });
    }
    return fixtures::make_scenario(rt, feats, cutoff);
}

}  // namespace

TEST_SUITE("loop") {
    TEST_CASE("controller: [1000, 999, 998.5] triggers exactly one doubling") {
        DynamicTimeoutController c{ 100, 3600, 2.0, 3, 0.01 };
        CHECK_FALSE(c.observe(1000));
        CHECK_FALSE(c.observe(999));
        CHECK(c.observe(998.5));
        CHECK(c.current() == 200);
        CHECK(c.history().empty());
    }

    TEST_CASE("controller: steady improvement keeps the timeout") {
        DynamicTimeoutController c{ 100, 3600, 2.0, 3, 0.01 };
        for (const double v : { 1000.0, 800.0, 600.0, 400.0, 200.0 }) {
            CHECK_FALSE(c.observe(v));
        }
        CHECK(c.current() == 100);
    }

    TEST_CASE("controller: nondecreasing and capped") {
        DynamicTimeoutController c{ 3600.0 / 64, 3600, 2.0, 3, 0.01 };
        double previous = c.current();
        int increases = 0;
        for (int k = 0; k < 100; ++k) {
            increases += c.observe(500.0) ? 1 : 0;
            CHECK(c.current() >= previous);
            CHECK(c.current() <= 3600.0);
            previous = c.current();
        }
        CHECK(increases == 6);
        CHECK(c.at_cap());
        CHECK_FALSE(c.force_increase());
        CHECK(c.current() == 3600.0);
    }

    TEST_CASE("execute charges min(runtime, timeout)") {
        const Scenario s = fixtures::make_scenario({ { 30, 100 } }, { { 0.0 } }, 1000);
        RunOracle oracle{ s };
        CostLedger ledger;
        CHECK(oracle.execute(0, 0, 60, 1, ledger) + oracle.execute(0, 1, 60, 1, ledger) == 90.0);
        CHECK(pairwise_label(oracle.cache(), 0, 0, 1) == PairwiseLabel::a_faster);
        // cached solve: no second charge
        CHECK(oracle.execute(0, 0, 120, 2, ledger) == 0.0);
        CHECK(ledger.total() == 90.0);
    }

    TEST_CASE("double censor re-queried after a timeout increase: 60+60+90+120") {
        const Scenario s = fixtures::make_scenario({ { 90, 200 } }, { { 0.0 } }, 1000);
        RunOracle oracle{ s };
        CostLedger ledger;
        oracle.execute(0, 0, 60, 1, ledger);
        oracle.execute(0, 1, 60, 1, ledger);
        CHECK(pairwise_label(oracle.cache(), 0, 0, 1) == PairwiseLabel::no_label);
        oracle.execute(0, 0, 120, 2, ledger);
        oracle.execute(0, 1, 120, 2, ledger);
        CHECK(ledger.total() == 60 + 60 + 90 + 120);
        CHECK(ledger.entries().size() == 4);
        CHECK(pairwise_label(oracle.cache(), 0, 0, 1) == PairwiseLabel::a_faster);
        double running = 0.0;
        for (const LedgerEntry &e : ledger.entries()) {
            running += e.charged_s;
        }
        CHECK(running == ledger.total());
    }

    TEST_CASE("initial set of 5 on 3 algorithms charges 15 executions") {
        const Scenario s = line_scenario(30, 3);
        LoopConfig cfg;
        cfg.initial_size = 5;
        cfg.seed = 4;
        const FrugalLoop a{ s, manual_plan(20, 30), 0, cfg };
        CHECK(a.ledger().entries().size() == 15);
        CHECK(a.initial_instances().size() == 5);
        CHECK(a.initial_step().requests == 15);
        const FrugalLoop b{ s, manual_plan(20, 30), 0, cfg };
        CHECK(a.initial_instances() == b.initial_instances());
    }

    TEST_CASE("3-instance training set, initial size 1: pools of 2 per pair") {
        const Scenario s = line_scenario(6, 3);
        LoopConfig cfg;
        cfg.initial_size = 1;
        const FrugalLoop loop{ s, manual_plan(3, 6), 0, cfg };
        for (std::size_t k = 0; k < 3; ++k) {
            CHECK(loop.pool().size(k) == 2);
        }
        cfg.initial_size = 4;
        CHECK_THROWS_AS((FrugalLoop{ s, manual_plan(3, 6), 0, cfg }), ConfigError);
    }

    TEST_CASE("batch size is ceil(1%) of the training set") {
        CHECK(batch_size_for(0.01, 300) == 3);
        CHECK(batch_size_for(0.01, 301) == 4);
        CHECK(batch_size_for(0.01, 50) == 1);
    }

    TEST_CASE("abstaining models: the first N in pair then instance order") {
        // every run exceeds the initial timeout, so no pair gets a decisive label
        const Scenario s = fixtures::make_scenario(std::vector<std::vector<double>>(12, { 51, 60, 70 }), std::vector<std::vector<FeatureValue>>(12, { 1.0 }), 3200);
        LoopConfig cfg;
        cfg.dynamic_timeout = true;
        cfg.initial_size = 1;
        const FrugalLoop loop{ s, manual_plan(10, 12), 0, cfg };
        CHECK(loop.controller().current() == 50.0);
        for (const PairwiseModel &m : loop.ensemble().pairwise) {
            CHECK_FALSE(m.trained());
        }
        // the initial instance is already censored at the current timeout on every algorithm
        const std::size_t first = loop.initial_instances().at(0);
        std::vector<std::pair<std::size_t, std::size_t>> expected;
        for (std::size_t k = 0; k < 3; ++k) {
            for (std::size_t i = 0; i < 10; ++i) {
                if (i != first) {
                    expected.emplace_back(k, i);
                }
            }
        }
        const auto picked = loop.select_queries_uncertainty(12);
        REQUIRE(picked.size() == 12);
        for (std::size_t r = 0; r < 12; ++r) {
            CHECK(picked[r].pair_index == expected[r].first);
            CHECK(picked[r].instance == expected[r].second);
            CHECK(picked[r].confidence == 0.5);
        }
    }

    TEST_CASE("uncertainty selection matches an independent ranking of the merged tables") {
        const Scenario s = make_synthetic_scenario({ .n_instances = 120, .n_algorithms = 3, .seed = 5 });
        const SplitPlan plan = make_splits(s, 1);
        LoopConfig cfg;
        cfg.initial_size = 6;
        cfg.forest.n_trees = 25;
        FrugalLoop loop{ s, plan, 0, cfg };
        for (int step = 0; step < 4; ++step) {
            (void)loop.step();
        }
        const ImputerModel imp = fit_imputer(s, plan.folds[0].train);
        std::vector<std::tuple<double, std::size_t, std::size_t>> table;
        for (std::size_t k = 0; k < loop.pairs().size(); ++k) {
            for (const std::size_t i : plan.folds[0].train) {
                if (loop.actionable(k, i)) {
                    const auto row = apply_imputer(imp, s.feature_values[i]);
                    table.emplace_back(loop.ensemble().pairwise[k].predict(row).confidence(), k, i);
                }
            }
        }
        std::sort(table.begin(), table.end());
        const auto picked = loop.select_queries_uncertainty(10);
        REQUIRE(picked.size() == 10);
        for (std::size_t r = 0; r < 10; ++r) {
            CHECK(picked[r].confidence == std::get<0>(table[r]));
            CHECK(picked[r].pair_index == std::get<1>(table[r]));
            CHECK(picked[r].instance == std::get<2>(table[r]));
        }
    }

    TEST_CASE("random selection: uniform over a 10-element pool") {
        const Scenario s = line_scenario(14, 2);
        LoopConfig cfg;
        cfg.selection = SelectionStrategy::random;
        cfg.initial_size = 1;
        cfg.seed = 12;
        FrugalLoop loop{ s, manual_plan(11, 14), 0, cfg };
        REQUIRE(loop.pool().size() == 10);
        std::map<std::size_t, int> counts;
        for (int draw = 0; draw < 10000; ++draw) {
            const auto q = loop.select_queries_random(1);
            REQUIRE(q.size() == 1);
            ++counts[q[0].instance];
        }
        CHECK(counts.size() == 10);
        const double sigma = std::sqrt(10000 * 0.1 * 0.9);
        for (const auto &[instance, n] : counts) {
            CHECK(std::fabs(n - 1000.0) <= 3.0 * sigma);
        }
        const auto everything = loop.select_queries_random(50);
        CHECK(everything.size() == 10);
        std::set<std::size_t> distinct;
        for (const QueryRequest &q : everything) {
            distinct.insert(q.instance);
        }
        CHECK(distinct.size() == 10);
    }

    TEST_CASE("random selection is reproducible for a seed") {
        const Scenario s = line_scenario(30, 3);
        LoopConfig cfg;
        cfg.selection = SelectionStrategy::random;
        cfg.seed = 3;
        FrugalLoop a{ s, manual_plan(20, 30), 0, cfg };
        FrugalLoop b{ s, manual_plan(20, 30), 0, cfg };
        CHECK(a.select_queries_random(7) == b.select_queries_random(7));
    }

    TEST_CASE("DT off: every step runs at the full cutoff and never exceeds passive cost") {
        const Scenario s = make_synthetic_scenario({ .n_instances = 80, .n_algorithms = 3, .seed = 2 });
        const SplitPlan plan = make_splits(s, 0);
        LoopConfig cfg;
        cfg.forest.n_trees = 20;
        const auto steps = run_loop(s, plan, 0, cfg);
        const double passive = passive_labelling_cost(s, plan.folds[0].train);
        for (const LoopStep &st : steps) {
            CHECK(st.timeout_s == s.cutoff);
            CHECK(st.cost_s <= passive * (1 + 1e-12));
        }
        CHECK(steps.back().observed_cells == steps.back().total_cells);
    }

    TEST_CASE("invariants along a TO+DT run") {
        const Scenario s = make_synthetic_scenario({ .n_instances = 100, .n_algorithms = 3, .seed = 8 });
        const SplitPlan plan = make_splits(s, 3);
        LoopConfig cfg;
        cfg.timeout_predictor = true;
        cfg.dynamic_timeout = true;
        cfg.forest.n_trees = 20;
        FrugalLoop loop{ s, plan, 2, cfg };
        std::vector<LoopStep> steps{ loop.initial_step() };
        std::vector<std::set<std::size_t>> pools(loop.pairs().size());
        const auto snapshot = [&] {
            for (std::size_t k = 0; k < loop.pairs().size(); ++k) {
                pools[k].clear();
                for (const std::size_t i : plan.folds[2].train) {
                    if (loop.pool().contains(k, i)) {
                        pools[k].insert(i);
                    }
                }
            }
        };
        snapshot();
        while (auto next = loop.step()) {
            // instances that left a pool have a decisive label or a double censor at the cap
            for (std::size_t k = 0; k < loop.pairs().size(); ++k) {
                for (const std::size_t i : pools[k]) {
                    if (!loop.pool().contains(k, i)) {
                        const Observation &oa = loop.labels().get(i, loop.pairs()[k].a);
                        const Observation &ob = loop.labels().get(i, loop.pairs()[k].b);
                        const bool decisive = pairwise_label(oa, ob) != PairwiseLabel::no_label;
                        CHECK((decisive || (oa.covers(s.cutoff) && ob.covers(s.cutoff))));
                    }
                }
            }
            snapshot();
            steps.push_back(*next);
        }
        for (std::size_t k = 1; k < steps.size(); ++k) {
            CHECK(steps[k].timeout_s >= steps[k - 1].timeout_s);
            CHECK(steps[k].cost_s >= steps[k - 1].cost_s);
            CHECK(steps[k].observed_cells >= steps[k - 1].observed_cells);
        }
        CHECK(steps.back().timeout_s <= s.cutoff);
        CHECK(loop.pool().empty());
        for (const LedgerEntry &e : loop.ledger().entries()) {
            CHECK(e.charged_s <= steps[e.step].timeout_s);
        }
    }
}
