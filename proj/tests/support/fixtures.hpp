#pragma once

// Shared test fixtures: temporary directories and hand-built scenarios.

#include "frugal/forest.hpp"
#include "frugal/scenario.hpp"

#include <fmt/format.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>
#include <vector>

namespace fixtures {

namespace fs = std::filesystem;

class TempDir {
  public:
    explicit TempDir(const std::string &tag = "t") {
        static std::atomic<int> counter{ 0 };
        path_ = fs::temp_directory_path() / fmt::format("frugal-{}-{}-{}", tag, ::getpid(), counter++);
        fs::remove_all(path_);
        fs::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path_, ec);
    }
    TempDir(const TempDir &) = delete;
    TempDir &operator=(const TempDir &) = delete;

    [[nodiscard]] const fs::path &path() const noexcept { return path_; }
    [[nodiscard]] fs::path operator/(const std::string &name) const { return path_ / name; }

  private:
    fs::path path_;
};

inline void write_text(const fs::path &path, const std::string &text) {
    std::ofstream out{ path, std::ios::binary };
    out << text;
}

inline std::string read_text(const fs::path &path) {
    std::ifstream in{ path, std::ios::binary };
    return { std::istreambuf_iterator<char>{ in }, std::istreambuf_iterator<char>{} };
}

/// Scenario from per-instance runtimes; runtimes >= cutoff become timeouts at the cutoff.
inline frugal::Scenario make_scenario(const std::vector<std::vector<double>> &runtimes, const std::vector<std::vector<frugal::FeatureValue>> &features, double cutoff,
                                      const std::string &id = "fixture") {
    frugal::Scenario s;
    s.id = id;
    s.cutoff = cutoff;
    for (std::size_t a = 0; a < runtimes.front().size(); ++a) {
        s.algorithms.push_back(fmt::format("a{}", a));
    }
    for (std::size_t f = 0; f < features.front().size(); ++f) {
        s.features.push_back(fmt::format("f{}", f));
    }
    for (std::size_t i = 0; i < runtimes.size(); ++i) {
        s.instances.push_back(fmt::format("i{}", i));
        s.feature_values.push_back(features[i]);
        for (std::size_t a = 0; a < runtimes[i].size(); ++a) {
            const double r = runtimes[i][a];
            s.runs.push_back({ i, a, r >= cutoff ? cutoff : r, r >= cutoff ? frugal::RunStatus::timeout : frugal::RunStatus::ok });
        }
    }
    return s;
}

/// A forest whose every prediction is `label` (fit on single-class data).
inline frugal::RandomForest constant_forest(int label, std::size_t n_features = 1) {
    frugal::DenseMatrix rows{ n_features };
    const std::vector<double> zero(n_features, 0.0);
    const std::vector<double> one(n_features, 1.0);
    rows.push_row(zero);
    rows.push_row(one);
    frugal::ForestConfig cfg;
    cfg.n_trees = 3;
    const std::vector<int> labels{ label, label };
    return frugal::RandomForest::fit(cfg, rows, labels);
}

/// The ASLib directory for the 2x2 fixture (runtimes [[1,10],[10,1]], cutoff 100).
inline void write_two_by_two(const fs::path &dir) {
    fs::create_directories(dir);
    write_text(dir / "description.txt", "scenario_id: twobytwo\nperformance_measures: runtime\nmaximize: false\nperformance_type: runtime\nalgorithm_cutoff_time: 100\n"
                                        "algorithm_cutoff_memory: ?\nfeatures_cutoff_time: ?\nfeatures_cutoff_memory: ?\nfeatures_deterministic:\n  - f1\nfeatures_stochastic:\n"
                                        "algorithms_deterministic:\n  - A\n  - B\nalgorithms_stochastic:\nnumber_of_feature_steps: 1\n");
    write_text(dir / "algorithm_runs.arff", "@RELATION runs\n\n@ATTRIBUTE instance_id STRING\n@ATTRIBUTE repetition NUMERIC\n@ATTRIBUTE algorithm STRING\n"
                                            "@ATTRIBUTE runtime NUMERIC\n@ATTRIBUTE runstatus {ok, timeout, memout, crash}\n\n@DATA\n"
                                            "i1,1,A,1,ok\ni1,1,B,10,ok\ni2,1,A,10,ok\ni2,1,B,1,ok\n");
    write_text(dir / "feature_values.arff", "@RELATION features\n@ATTRIBUTE instance_id STRING\n@ATTRIBUTE repetition NUMERIC\n@ATTRIBUTE f1 NUMERIC\n@DATA\n"
                                            "i1,1,0.0\ni2,1,1.0\n");
}

}  // namespace fixtures
