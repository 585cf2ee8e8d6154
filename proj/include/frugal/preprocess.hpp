#pragma once

#include "frugal/scenario.hpp"

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace frugal {

/// Features missing on more than this fraction of training instances are dropped.
inline constexpr double max_missing_rate = 0.20;

/// Drops sparse features and fills the remaining gaps with training medians.
struct ImputerModel {
    std::size_t n_input_features{};
    std::vector<std::size_t> kept_features;  // indices into Scenario::features, ascending
    std::vector<std::string> kept_names;
    std::vector<double> medians;  // one per kept feature

    [[nodiscard]] std::size_t n_output_features() const noexcept { return kept_features.size(); }
};

/// Fits on `train_instances` only. Throws DataError when every feature is dropped.
[[nodiscard]] ImputerModel fit_imputer(const Scenario &scenario, std::span<const std::size_t> train_instances);

/// Projects `row` onto the kept features and replaces missing cells by the stored medians.
[[nodiscard]] std::vector<double> apply_imputer(const ImputerModel &model, std::span<const FeatureValue> row);

/// Median with the even-count convention (mean of the middle pair). `values` is reordered.
[[nodiscard]] double median(std::span<double> values);

/// PAR10 score of one run: the runtime when solved, ten times the cutoff otherwise.
[[nodiscard]] constexpr double par10(double runtime, RunStatus status, double cutoff) noexcept {
    return status == RunStatus::ok ? runtime : 10.0 * cutoff;
}

[[nodiscard]] inline double par10(const RunRecord &run, double cutoff) noexcept {
    return par10(run.runtime, run.status, cutoff);
}

/// round-half-up of n / 10
[[nodiscard]] constexpr std::size_t tenth_rounded(std::size_t n) noexcept { return (n + 5) / 10; }

struct FoldSplit {
    std::vector<std::size_t> train;       // ascending instance indices
    std::vector<std::size_t> validation;  // ascending instance indices
};

/// Held-out test set plus ten folds over the remaining instances.
///
/// The remainder is shuffled once; fold k validates on the k-th consecutive
/// block of round(0.1 * |remainder|) instances (wrapping around) and trains on
/// everything else, so the validation blocks are disjoint whenever ten of
/// them fit into the remainder.
struct SplitPlan {
    std::uint64_t seed{};
    std::vector<std::size_t> test;  // ascending instance indices
    std::vector<FoldSplit> folds;
};

inline constexpr std::size_t default_fold_count = 10;
inline constexpr std::size_t min_split_instances = 20;

/// Deterministic in (scenario size, seed). Throws DataError below 20 instances.
[[nodiscard]] SplitPlan make_splits(const Scenario &scenario, std::uint64_t seed, std::size_t n_folds = default_fold_count);
[[nodiscard]] SplitPlan make_splits(std::size_t n_instances, std::uint64_t seed, std::size_t n_folds = default_fold_count);

}  // namespace frugal
