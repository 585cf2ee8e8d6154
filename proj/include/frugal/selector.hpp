#pragma once

// One-vs-one algorithm selector: a forest per algorithm pair votes for the
// side it predicts to be faster, optionally after per-algorithm timeout
// predictors have removed the algorithms expected to time out.

#include "frugal/forest.hpp"
#include "frugal/labels.hpp"
#include "frugal/preprocess.hpp"
#include "frugal/scenario.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace frugal {

struct AlgorithmPair {
    std::size_t a{};  // earlier in portfolio order
    std::size_t b{};

    friend bool operator==(const AlgorithmPair &, const AlgorithmPair &) = default;
};

/// All unordered pairs (a < b) in portfolio order: (0,1), (0,2), ..., (n-2,n-1).
[[nodiscard]] std::vector<AlgorithmPair> algorithm_pairs(std::size_t n_algorithms);

/// class 0 = "a faster", class 1 = "b faster". Without a model the pair abstains.
struct PairwiseModel {
    AlgorithmPair pair;
    std::optional<RandomForest> model;

    [[nodiscard]] bool trained() const noexcept { return model.has_value(); }
    /// (0.5, 0.5) when untrained.
    [[nodiscard]] ProbabilityEstimate predict(std::span<const double> row) const;
};

/// class 1 = "will not solve within trained_at seconds".
struct TimeoutModel {
    std::size_t algorithm{};
    double trained_at{};
    std::optional<RandomForest> model;

    [[nodiscard]] bool predicts_timeout(std::span<const double> row) const;
};

/// An algorithm counts as predicted to time out when P(timeout) exceeds this.
inline constexpr double timeout_probability_threshold = 0.5;

struct SelectorEnsemble {
    std::size_t n_algorithms{};
    std::vector<PairwiseModel> pairwise;  // same order as algorithm_pairs(n_algorithms)
    std::optional<std::vector<TimeoutModel>> timeout_models;
    ImputerModel imputer;

    /// Algorithms whose timeout model fires on `dense_row`; empty without timeout models.
    [[nodiscard]] std::vector<std::size_t> predicted_timeouts(std::span<const double> dense_row) const;
    /// Vote counts over `candidates` (a mask over the portfolio).
    [[nodiscard]] std::vector<std::size_t> votes(std::span<const double> dense_row, const std::vector<bool> &candidates) const;
    [[nodiscard]] std::size_t select_dense(std::span<const double> dense_row) const;
};

struct EnsembleTrainingInput {
    const LabelStore &labels;
    std::span<const std::size_t> instances;  // training instances in canonical (ascending) order
    const DenseMatrix &features;             // imputed row per scenario instance
    const ImputerModel &imputer;
};

/// Fits one forest per pair on the instances with a decisive pairwise label
/// and, when `timeout_enabled`, one timeout forest per algorithm labelled
/// against `current_timeout`. Forest seeds derive from `forest.seed` and the
/// model's position, never from the training history. Throws ConfigError if
/// nothing has been observed on the training instances.
[[nodiscard]] SelectorEnsemble train_ensemble(const EnsembleTrainingInput &input, const ForestConfig &forest, bool timeout_enabled, double current_timeout);

/// Picks an algorithm for a raw (unimputed) feature row.
[[nodiscard]] std::size_t select_algorithm(const SelectorEnsemble &ensemble, std::span<const FeatureValue> row);

/// Sum of PAR10 scores of the selected algorithm over `instances`, at the full cutoff.
[[nodiscard]] double evaluate_selector(const SelectorEnsemble &ensemble, std::span<const std::size_t> instances, const Scenario &scenario);

/// Same as evaluate_selector with precomputed imputed rows.
[[nodiscard]] double evaluate_selector(const SelectorEnsemble &ensemble, std::span<const std::size_t> instances, const Scenario &scenario, const DenseMatrix &features);

/// Timeout-model label of an observation at level `timeout`: 1 = timed out,
/// 0 = solved within it, nullopt = not determined at that level.
[[nodiscard]] std::optional<int> timeout_label(const Observation &obs, double timeout) noexcept;

/// Imputes every scenario instance with `imputer`.
[[nodiscard]] DenseMatrix impute_all(const Scenario &scenario, const ImputerModel &imputer);

}  // namespace frugal
