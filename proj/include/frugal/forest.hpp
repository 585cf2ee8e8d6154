#pragma once

// Binary random-forest classifier (CART trees, Gini splits, bootstrap bagging,
// random feature subsets per node). The confidence it reports is the fraction
// of trees voting for the predicted class.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace frugal {

/// Row-major dense matrix of feature values.
class DenseMatrix {
  public:
    DenseMatrix() = default;
    explicit DenseMatrix(std::size_t cols) : cols_{ cols } {}

    [[nodiscard]] std::size_t rows() const noexcept { return cols_ == 0 ? 0 : values_.size() / cols_; }
    [[nodiscard]] std::size_t cols() const noexcept { return cols_; }
    [[nodiscard]] std::span<const double> row(std::size_t r) const noexcept { return { values_.data() + r * cols_, cols_ }; }
    [[nodiscard]] double at(std::size_t r, std::size_t c) const noexcept { return values_[r * cols_ + c]; }

    void push_row(std::span<const double> row);

  private:
    std::size_t cols_{ 0 };
    std::vector<double> values_;
};

struct ForestConfig {
    std::size_t n_trees{ 100 };
    /// Candidates per split; unset means floor(sqrt(n_features)), at least 1.
    std::optional<std::size_t> max_features{};
    std::size_t max_depth{ std::size_t{ 1 } << 31 };
    std::size_t min_samples_split{ 2 };
    bool bootstrap{ true };
    std::uint64_t seed{ 0 };
    /// Worker threads used by fit; the fitted model does not depend on it.
    std::size_t n_jobs{ 1 };
};

struct ProbabilityEstimate {
    double p_class0{ 0.5 };
    double p_class1{ 0.5 };

    /// Maximum posterior probability.
    [[nodiscard]] double confidence() const noexcept { return p_class0 >= p_class1 ? p_class0 : p_class1; }
    /// argmax with ties resolved to class 0.
    [[nodiscard]] int label() const noexcept { return p_class1 > p_class0 ? 1 : 0; }
};

/// Gini impurity 1 - sum_k (count_k / total)^2. Requires total >= 1.
[[nodiscard]] double gini(std::span<const std::size_t> counts);
[[nodiscard]] double gini(std::size_t count0, std::size_t count1);

struct TreeNode {
    static constexpr std::uint32_t no_child = 0xffffffffU;

    std::int32_t feature{ -1 };  // -1 marks a leaf
    double threshold{ 0.0 };     // value <= threshold goes left
    std::uint32_t left{ no_child };
    std::uint32_t right{ no_child };
    std::uint32_t count0{ 0 };  // training samples reaching the node, with bootstrap multiplicity
    std::uint32_t count1{ 0 };

    [[nodiscard]] bool is_leaf() const noexcept { return feature < 0; }
    /// Leaf majority; ties go to class 0.
    [[nodiscard]] int majority() const noexcept { return count1 > count0 ? 1 : 0; }
};

class DecisionTree {
  public:
    DecisionTree() = default;
    explicit DecisionTree(std::vector<TreeNode> nodes) : nodes_{ std::move(nodes) } {}

    [[nodiscard]] const std::vector<TreeNode> &nodes() const noexcept { return nodes_; }
    [[nodiscard]] const TreeNode &leaf_for(std::span<const double> row) const;
    [[nodiscard]] int vote(std::span<const double> row) const { return leaf_for(row).majority(); }
    [[nodiscard]] std::size_t depth() const;

  private:
    std::vector<TreeNode> nodes_;
};

class RandomForest {
  public:
    /// Trains on `rows` with binary `labels` (0 or 1). Rows must not contain NaN.
    /// Tree t draws from its own generator seeded by (config.seed, t), so the
    /// result is independent of config.n_jobs.
    [[nodiscard]] static RandomForest fit(const ForestConfig &config, const DenseMatrix &rows, std::span<const int> labels);

    [[nodiscard]] ProbabilityEstimate predict_proba(std::span<const double> row) const;
    [[nodiscard]] int predict_label(std::span<const double> row) const { return predict_proba(row).label(); }

    [[nodiscard]] const ForestConfig &config() const noexcept { return config_; }
    [[nodiscard]] const std::vector<DecisionTree> &trees() const noexcept { return trees_; }
    [[nodiscard]] std::size_t n_features() const noexcept { return n_features_; }

    /// Line-oriented text form of every tree; see docs/forest_dump.md.
    [[nodiscard]] std::string dump() const;

  private:
    ForestConfig config_{};
    std::size_t n_features_{ 0 };
    std::vector<DecisionTree> trees_;
};

}  // namespace frugal
