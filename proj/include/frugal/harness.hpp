#pragma once

// Experiment orchestration: passive baselines, the configuration grid over
// folds and seeds, per-run step logs and the cost-vs-performance summaries.

#include "frugal/loop.hpp"
#include "frugal/preprocess.hpp"
#include "frugal/scenario.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace frugal {

/// One experiment arm: a frugal configuration (selection x TO x DT) or a passive baseline.
struct ExperimentConfig {
    enum class Kind { frugal, passive };

    Kind kind{ Kind::frugal };
    SelectionStrategy selection{ SelectionStrategy::uncertainty };
    bool timeout_predictor{ false };
    bool dynamic_timeout{ false };

    /// "uncertainty", "random-to-dt", "passive-to", ...
    [[nodiscard]] std::string id() const;
    /// Inverse of id(); throws ConfigError on unknown names.
    [[nodiscard]] static ExperimentConfig parse(std::string_view id);
    /// The eight frugal configurations in canonical order.
    [[nodiscard]] static std::vector<ExperimentConfig> all_frugal();

    friend bool operator==(const ExperimentConfig &, const ExperimentConfig &) = default;
};

/// Position of a config id in the canonical listing (unknown ids sort last).
[[nodiscard]] std::size_t canonical_config_rank(std::string_view id);

struct PassiveResult {
    double test_par10{};
    double labelling_cost_s{};  // sum over training (instance, algorithm) of min(runtime, cutoff)
    std::size_t labelled_cells{};
};

/// Sum of min(runtime, cutoff) over every (instance, algorithm) cell of `instances`.
[[nodiscard]] double passive_labelling_cost(const Scenario &scenario, std::span<const std::size_t> instances);

/// Trains on every training instance observed at the full cutoff. `run_seed`
/// selects the forest seeds exactly as a frugal loop with the same seed does.
[[nodiscard]] PassiveResult run_passive_baseline(const Scenario &scenario, const SplitPlan &plan, std::size_t fold, std::uint64_t run_seed, bool timeout_models,
                                                 const ForestConfig &forest = {});

/// One CSV row of an experiment run.
struct StepLog {
    std::string config;
    std::string scenario;
    std::size_t fold{};
    std::uint64_t seed{};
    std::size_t step{};
    double timeout_s{};
    std::size_t labels{};
    double cost_s{};
    double cost_frac{};
    double data_frac{};
    double test_par10_s{};
    double perf_ratio{};
};

/// config,scenario,fold,seed,step,timeout_s,labels,cost_s,cost_frac,data_frac,test_par10_s,perf_ratio
[[nodiscard]] std::string_view step_log_header() noexcept;
[[nodiscard]] std::string format_step_logs(std::span<const StepLog> logs);
void write_step_logs(const std::filesystem::path &path, std::span<const StepLog> logs);
[[nodiscard]] std::vector<StepLog> parse_step_logs(std::string_view text, std::string_view source = "<csv>");
[[nodiscard]] std::vector<StepLog> read_step_logs(const std::filesystem::path &path);
/// Every per-cell fold*.csv below `directory`, in sorted path order. Throws DataError if none exist.
[[nodiscard]] std::vector<StepLog> read_log_tree(const std::filesystem::path &directory);

/// frugal test PAR10 / passive test PAR10 (1 when both are zero).
[[nodiscard]] double performance_ratio(double frugal_par10, double passive_par10) noexcept;

/// Converts loop steps into log rows relative to the passive reference of the same fold and seed.
[[nodiscard]] std::vector<StepLog> make_step_logs(const ExperimentConfig &config, const std::string &scenario_id, std::size_t fold, std::uint64_t seed,
                                                  std::span<const LoopStep> steps, const PassiveResult &reference);

struct ExperimentSpec {
    const Scenario *scenario{ nullptr };
    std::vector<ExperimentConfig> configs;
    std::size_t n_folds{ default_fold_count };
    std::size_t seeds_per_fold{ 5 };
    std::uint64_t base_seed{ 0 };
    std::filesystem::path out_dir;
    /// Batch, initial-set, forest and controller settings; selection/TO/DT/seed are set per cell.
    LoopConfig loop{};
    std::size_t jobs{ 1 };
};

struct CellResult {
    std::string config;
    std::size_t fold{};
    std::uint64_t seed{};
    std::filesystem::path path;
    bool skipped{ false };  // output already existed
    std::size_t steps{};
    double final_perf_ratio{};
    double final_cost_frac{};
};

/// Seed value of the s-th run of every fold.
[[nodiscard]] constexpr std::uint64_t run_seed_value(std::uint64_t base_seed, std::size_t s) noexcept { return base_seed + s; }
/// Seed actually handed to the loop and the passive baseline for (fold, seed).
[[nodiscard]] std::uint64_t cell_run_seed(std::uint64_t seed, std::size_t fold) noexcept;

[[nodiscard]] std::filesystem::path cell_path(const std::filesystem::path &out_dir, const std::string &config_id, std::size_t fold, std::uint64_t seed);

/// Runs every (config, fold, seed) cell, writing one CSV per cell. Existing
/// files are left untouched, so an interrupted grid resumes where it stopped.
/// `on_cell` is called once per cell (serialised) as cells complete.
std::vector<CellResult> run_grid(const ExperimentSpec &spec, const std::function<void(const CellResult &)> &on_cell = {});

struct CurvePoint {
    double ratio{};
    double mean_cost_frac{};
    double stderr_cost_frac{};
    double mean_data_frac{};
    double stderr_data_frac{};
    std::size_t n_runs{};
};

struct ConfigCurve {
    std::string config;
    std::vector<CurvePoint> points;
};

struct CurveSummary {
    std::vector<ConfigCurve> curves;  // canonical config order
};

/// 1.00, 1.02, ..., 2.00
[[nodiscard]] std::vector<double> ratio_grid();

/// Per config and grid ratio r: mean and standard error over runs of the
/// first cost (and data) fraction at which the run's ratio is <= r; runs that
/// never get there count as 1.0.
[[nodiscard]] CurveSummary summarize(std::span<const StepLog> logs);

/// config,ratio,mean_cost_frac,stderr_cost_frac,mean_data_frac,stderr_data_frac,n_runs
[[nodiscard]] std::string format_summary_csv(const CurveSummary &summary);
void write_summary_csv(const std::filesystem::path &path, const CurveSummary &summary);
[[nodiscard]] CurveSummary parse_summary_csv(std::string_view text, std::string_view source = "<csv>");
[[nodiscard]] CurveSummary read_summary_csv(const std::filesystem::path &path);

}  // namespace frugal
