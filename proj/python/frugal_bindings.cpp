#include "frugal/errors.hpp"
#include "frugal/forest.hpp"
#include "frugal/harness.hpp"
#include "frugal/loop.hpp"
#include "frugal/preprocess.hpp"
#include "frugal/scenario.hpp"
#include "frugal/synthetic.hpp"
#include "frugal/uncertainty.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <string>

namespace py = pybind11;

namespace {

frugal::RunStatus status_from(const std::string &s) {
    if (s == "ok") {
        return frugal::RunStatus::ok;
    }
    if (s == "timeout") {
        return frugal::RunStatus::timeout;
    }
    if (s == "other_failure" || s == "crash") {
        return frugal::RunStatus::other_failure;
    }
    throw frugal::ConfigError{ "status must be ok, timeout or other_failure" };
}

frugal::DenseMatrix to_matrix(const std::vector<std::vector<double>> &rows) {
    if (rows.empty()) {
        throw frugal::ConfigError{ "no rows" };
    }
    frugal::DenseMatrix m{ rows.front().size() };
    for (const auto &r : rows) {
        if (r.size() != m.cols()) {
            throw frugal::ConfigError{ "rows have different lengths" };
        }
        m.push_row(r);
    }
    return m;
}

py::dict step_dict(const frugal::LoopStep &s) {
    py::dict d;
    d["step"] = s.step;
    d["timeout_s"] = s.timeout_s;
    d["requests"] = s.requests;
    d["cost_s"] = s.cost_s;
    d["observed_cells"] = s.observed_cells;
    d["total_cells"] = s.total_cells;
    d["validation_par10"] = s.validation_par10;
    d["test_par10"] = s.test_par10;
    return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Cost-aware algorithm selection: ASLib scenarios, random forests and the frugal active-learning loop";

    auto error = py::register_exception<frugal::Error>(m, "Error");
    py::register_exception<frugal::ParseError>(m, "ParseError", error.ptr());
    py::register_exception<frugal::DataError>(m, "DataError", error.ptr());
    py::register_exception<frugal::ConfigError>(m, "ConfigError", error.ptr());

    py::class_<frugal::Scenario>(m, "Scenario")
        .def_readonly("id", &frugal::Scenario::id)
        .def_readonly("algorithms", &frugal::Scenario::algorithms)
        .def_readonly("features", &frugal::Scenario::features)
        .def_readonly("instances", &frugal::Scenario::instances)
        .def_readonly("feature_values", &frugal::Scenario::feature_values)
        .def_readonly("cutoff", &frugal::Scenario::cutoff)
        .def_property_readonly("n_instances", &frugal::Scenario::n_instances)
        .def_property_readonly("n_algorithms", &frugal::Scenario::n_algorithms)
        .def_property_readonly("n_features", &frugal::Scenario::n_features)
        .def(
            "run",
            [](const frugal::Scenario &s, std::size_t i, std::size_t a) {
                if (i >= s.n_instances() || a >= s.n_algorithms()) {
                    throw py::index_error("run index out of range");
                }
                const frugal::RunRecord &r = s.run(i, a);
                return py::make_tuple(r.runtime, std::string{ frugal::to_string(r.status) });
            },
            py::arg("instance"), py::arg("algorithm"), "(runtime, status) of a recorded run")
        .def("__repr__", [](const frugal::Scenario &s) {
            return "<Scenario '" + s.id + "' " + std::to_string(s.n_instances()) + " instances, " + std::to_string(s.n_algorithms()) + " algorithms>";
        });

    py::class_<frugal::ScenarioStats>(m, "ScenarioStats")
        .def_readonly("n_instances", &frugal::ScenarioStats::n_instances)
        .def_readonly("n_algorithms", &frugal::ScenarioStats::n_algorithms)
        .def_readonly("n_features", &frugal::ScenarioStats::n_features)
        .def_readonly("total_time_s", &frugal::ScenarioStats::total_time_s)
        .def_readonly("vbs_time_s", &frugal::ScenarioStats::vbs_time_s)
        .def_readonly("sbs_time_s", &frugal::ScenarioStats::sbs_time_s);

    m.def("load_scenario", &frugal::load_scenario, py::arg("directory"));
    m.def("write_scenario", &frugal::write_scenario, py::arg("scenario"), py::arg("directory"));
    m.def("scenario_stats", &frugal::scenario_stats, py::arg("scenario"));
    m.def(
        "make_synthetic_scenario",
        [](std::size_t n_instances, std::size_t n_algorithms, std::size_t n_noise_features, double cutoff, double timeout_rate, double missing_rate, std::uint64_t seed) {
            frugal::SyntheticSpec spec;
            spec.n_instances = n_instances;
            spec.n_algorithms = n_algorithms;
            spec.n_noise_features = n_noise_features;
            spec.cutoff = cutoff;
            spec.timeout_rate = timeout_rate;
            spec.missing_rate = missing_rate;
            spec.seed = seed;
            return frugal::make_synthetic_scenario(spec);
        },
        py::arg("n_instances") = 200, py::arg("n_algorithms") = 3, py::arg("n_noise_features") = 2, py::arg("cutoff") = 3600.0, py::arg("timeout_rate") = 0.3,
        py::arg("missing_rate") = 0.0, py::arg("seed") = 0);

    m.def(
        "par10", [](double runtime, const std::string &status, double cutoff) { return frugal::par10(runtime, status_from(status), cutoff); }, py::arg("runtime"),
        py::arg("status"), py::arg("cutoff"));

    m.def(
        "make_splits",
        [](std::size_t n_instances, std::uint64_t seed, std::size_t n_folds) {
            const frugal::SplitPlan plan = frugal::make_splits(n_instances, seed, n_folds);
            py::list folds;
            for (const frugal::FoldSplit &f : plan.folds) {
                folds.append(py::make_tuple(f.train, f.validation));
            }
            return py::make_tuple(plan.test, folds);
        },
        py::arg("n_instances"), py::arg("seed"), py::arg("n_folds") = frugal::default_fold_count, "Returns (test, [(train, validation), ...]).");

    m.def(
        "least_confidence", [](double p0, double p1) { return frugal::least_confidence({ p0, p1 }); }, py::arg("p0"), py::arg("p1"));
    m.def(
        "margin", [](double p0, double p1) { return frugal::margin({ p0, p1 }); }, py::arg("p0"), py::arg("p1"));
    m.def(
        "entropy", [](double p0, double p1) { return frugal::entropy({ p0, p1 }); }, py::arg("p0"), py::arg("p1"));

    py::class_<frugal::RandomForest>(m, "RandomForest")
        .def_static(
            "fit",
            [](const std::vector<std::vector<double>> &rows, const std::vector<int> &labels, std::size_t n_trees, std::uint64_t seed, std::optional<std::size_t> max_features,
               std::size_t min_samples_split, bool bootstrap) {
                frugal::ForestConfig cfg;
                cfg.n_trees = n_trees;
                cfg.seed = seed;
                cfg.max_features = max_features;
                cfg.min_samples_split = min_samples_split;
                cfg.bootstrap = bootstrap;
                return frugal::RandomForest::fit(cfg, to_matrix(rows), labels);
            },
            py::arg("rows"), py::arg("labels"), py::arg("n_trees") = 100, py::arg("seed") = 0, py::arg("max_features") = py::none(), py::arg("min_samples_split") = 2,
            py::arg("bootstrap") = true)
        .def(
            "predict_proba",
            [](const frugal::RandomForest &f, const std::vector<double> &row) {
                if (row.size() != f.n_features()) {
                    throw frugal::ConfigError{ "row length does not match the training data" };
                }
                const frugal::ProbabilityEstimate p = f.predict_proba(row);
                return py::make_tuple(p.p_class0, p.p_class1);
            },
            py::arg("row"))
        .def(
            "predict",
            [](const frugal::RandomForest &f, const std::vector<double> &row) {
                if (row.size() != f.n_features()) {
                    throw frugal::ConfigError{ "row length does not match the training data" };
                }
                return f.predict_label(row);
            },
            py::arg("row"))
        .def_property_readonly("n_trees", [](const frugal::RandomForest &f) { return f.trees().size(); })
        .def("dump", &frugal::RandomForest::dump);

    m.def(
        "run_loop",
        [](const frugal::Scenario &scenario, std::size_t fold, std::uint64_t seed, const std::string &selection, bool timeout_predictor, bool dynamic_timeout,
           std::uint64_t split_seed, std::size_t n_trees) {
            frugal::LoopConfig cfg;
            if (selection == "uncertainty") {
                cfg.selection = frugal::SelectionStrategy::uncertainty;
            } else if (selection == "random") {
                cfg.selection = frugal::SelectionStrategy::random;
            } else {
                throw frugal::ConfigError{ "selection must be uncertainty or random" };
            }
            cfg.timeout_predictor = timeout_predictor;
            cfg.dynamic_timeout = dynamic_timeout;
            cfg.seed = seed;
            cfg.forest.n_trees = n_trees;
            const frugal::SplitPlan plan = frugal::make_splits(scenario, split_seed);
            std::vector<frugal::LoopStep> steps;
            {
                py::gil_scoped_release release;
                steps = frugal::run_loop(scenario, plan, fold, cfg);
            }
            py::list out;
            for (const frugal::LoopStep &s : steps) {
                out.append(step_dict(s));
            }
            return out;
        },
        py::arg("scenario"), py::arg("fold") = 0, py::arg("seed") = 0, py::arg("selection") = "uncertainty", py::arg("timeout_predictor") = false,
        py::arg("dynamic_timeout") = false, py::arg("split_seed") = 0, py::arg("n_trees") = 100, "Runs the frugal loop to exhaustion; one dict per step.");

    m.def(
        "run_passive_baseline",
        [](const frugal::Scenario &scenario, std::size_t fold, std::uint64_t seed, bool timeout_models, std::uint64_t split_seed, std::size_t n_trees) {
            frugal::ForestConfig forest;
            forest.n_trees = n_trees;
            const frugal::SplitPlan plan = frugal::make_splits(scenario, split_seed);
            frugal::PassiveResult r;
            {
                py::gil_scoped_release release;
                r = frugal::run_passive_baseline(scenario, plan, fold, seed, timeout_models, forest);
            }
            py::dict d;
            d["test_par10"] = r.test_par10;
            d["labelling_cost_s"] = r.labelling_cost_s;
            d["labelled_cells"] = r.labelled_cells;
            return d;
        },
        py::arg("scenario"), py::arg("fold") = 0, py::arg("seed") = 0, py::arg("timeout_models") = false, py::arg("split_seed") = 0, py::arg("n_trees") = 100);

    m.def(
        "read_step_logs",
        [](const std::filesystem::path &path) {
            py::list out;
            for (const frugal::StepLog &l : frugal::read_step_logs(path)) {
                py::dict d;
                d["config"] = l.config;
                d["scenario"] = l.scenario;
                d["fold"] = l.fold;
                d["seed"] = l.seed;
                d["step"] = l.step;
                d["timeout_s"] = l.timeout_s;
                d["labels"] = l.labels;
                d["cost_s"] = l.cost_s;
                d["cost_frac"] = l.cost_frac;
                d["data_frac"] = l.data_frac;
                d["test_par10_s"] = l.test_par10_s;
                d["perf_ratio"] = l.perf_ratio;
                out.append(d);
            }
            return out;
        },
        py::arg("path"));

    m.def(
        "summarize",
        [](const std::filesystem::path &log_dir) { return frugal::format_summary_csv(frugal::summarize(frugal::read_log_tree(log_dir))); }, py::arg("log_dir"),
        "Summary CSV text for every step log under log_dir.");
}
