#pragma once

// In-memory ASLib scenario: portfolio, instance features and the recorded
// (instance, algorithm) runs that the experiment replays.

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace frugal {

enum class RunStatus { ok, timeout, other_failure };

[[nodiscard]] std::string_view to_string(RunStatus status) noexcept;

struct RunRecord {
    std::size_t instance{};
    std::size_t algorithm{};
    double runtime{};  // seconds, >= 0
    RunStatus status{ RunStatus::ok };

    [[nodiscard]] bool solved() const noexcept { return status == RunStatus::ok; }

    friend bool operator==(const RunRecord &, const RunRecord &) = default;
};

/// A feature cell; std::nullopt marks a missing value.
using FeatureValue = std::optional<double>;

struct Scenario {
    std::string id;
    std::vector<std::string> algorithms;  // portfolio order
    std::vector<std::string> features;
    std::vector<std::string> instances;
    std::vector<std::vector<FeatureValue>> feature_values;  // [instance][feature]
    std::vector<RunRecord> runs;                           // [instance * n_algorithms + algorithm]
    double cutoff{};                                       // seconds
    std::optional<std::vector<double>> feature_costs;      // per instance seconds; informational only

    [[nodiscard]] std::size_t n_instances() const noexcept { return instances.size(); }
    [[nodiscard]] std::size_t n_algorithms() const noexcept { return algorithms.size(); }
    [[nodiscard]] std::size_t n_features() const noexcept { return features.size(); }

    [[nodiscard]] const RunRecord &run(std::size_t instance, std::size_t algorithm) const {
        return runs[instance * algorithms.size() + algorithm];
    }

    /// Throws DataError if any structural invariant is violated.
    void validate() const;

    friend bool operator==(const Scenario &, const Scenario &) = default;
};

/// Reads an ASLib scenario directory (description.txt, algorithm_runs.arff,
/// feature_values.arff and optionally feature_costs.arff).
///
/// Only runtime-minimisation scenarios are accepted. Run statuses other than
/// "ok" become timeout when the recorded runtime reaches the cutoff and
/// other_failure otherwise; a missing runtime on an unsolved run is read as
/// the cutoff. Only repetition 1 is read.
[[nodiscard]] Scenario load_scenario(const std::filesystem::path &directory);

/// Writes the scenario in ASLib layout; load_scenario reads it back unchanged.
void write_scenario(const Scenario &scenario, const std::filesystem::path &directory);

struct ScenarioStats {
    std::size_t n_instances{};
    std::size_t n_algorithms{};
    std::size_t n_features{};
    double total_time_s{};  // sum of min(runtime, cutoff) over every run
    double vbs_time_s{};    // per-instance best, summed
    double sbs_time_s{};    // best single algorithm column

    [[nodiscard]] double total_hours() const noexcept { return total_time_s / 3600.0; }
    [[nodiscard]] double vbs_hours() const noexcept { return vbs_time_s / 3600.0; }
    [[nodiscard]] double sbs_hours() const noexcept { return sbs_time_s / 3600.0; }
};

[[nodiscard]] ScenarioStats scenario_stats(const Scenario &scenario);

/// min(runtime, cutoff): the CPU time a run costs when executed with the full cutoff.
[[nodiscard]] double capped_runtime(const RunRecord &run, double cutoff) noexcept;

}  // namespace frugal
