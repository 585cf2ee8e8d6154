#include "frugal/forest.hpp"

#include "frugal/errors.hpp"
#include "frugal/rng.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <thread>

namespace frugal {

void DenseMatrix::push_row(std::span<const double> row) {
    if (row.size() != cols_) {
        throw ConfigError{ fmt::format("DenseMatrix: row has {} values, expected {}", row.size(), cols_) };
    }
    values_.insert(values_.end(), row.begin(), row.end());
}

double gini(std::span<const std::size_t> counts) {
    const std::size_t total = std::accumulate(counts.begin(), counts.end(), std::size_t{ 0 });
    if (total == 0) {
        throw ConfigError{ "gini: empty node" };
    }
    double sum_sq = 0.0;
    for (const std::size_t c : counts) {
        const double p = static_cast<double>(c) / static_cast<double>(total);
        sum_sq += p * p;
    }
    return 1.0 - sum_sq;
}

double gini(std::size_t count0, std::size_t count1) {
    const std::size_t counts[2] = { count0, count1 };
    return gini(counts);
}

const TreeNode &DecisionTree::leaf_for(std::span<const double> row) const {
    std::size_t id = 0;
    while (!nodes_[id].is_leaf()) {
        const TreeNode &node = nodes_[id];
        id = row[static_cast<std::size_t>(node.feature)] <= node.threshold ? node.left : node.right;
    }
    return nodes_[id];
}

std::size_t DecisionTree::depth() const {
    if (nodes_.empty()) {
        return 0;
    }
    std::vector<std::pair<std::size_t, std::size_t>> stack{ { 0, 0 } };
    std::size_t deepest = 0;
    while (!stack.empty()) {
        const auto [id, d] = stack.back();
        stack.pop_back();
        deepest = std::max(deepest, d);
        if (!nodes_[id].is_leaf()) {
            stack.emplace_back(nodes_[id].left, d + 1);
            stack.emplace_back(nodes_[id].right, d + 1);
        }
    }
    return deepest;
}

namespace {

constexpr double impurity_epsilon = 1e-12;

struct TreeBuilder {
    const DenseMatrix &rows;
    std::span<const int> labels;
    std::size_t max_features;
    std::size_t max_depth;
    std::size_t min_samples_split;

    struct Split {
        std::size_t feature;
        double threshold;
    };

    struct Pending {
        std::uint32_t node;
        std::size_t begin;
        std::size_t end;
        std::size_t depth;
    };

    std::vector<TreeNode> build(std::vector<std::size_t> samples, Rng &rng) const {
        std::vector<TreeNode> nodes;
        std::vector<std::size_t> feature_order(rows.cols());
        std::iota(feature_order.begin(), feature_order.end(), std::size_t{ 0 });
        std::vector<std::pair<double, int>> column;

        nodes.emplace_back();
        std::vector<Pending> stack{ { 0, 0, samples.size(), 0 } };
        while (!stack.empty()) {
            const Pending job = stack.back();
            stack.pop_back();
            std::size_t c1 = 0;
            for (std::size_t k = job.begin; k < job.end; ++k) {
                c1 += static_cast<std::size_t>(labels[samples[k]]);
            }
            const std::size_t n = job.end - job.begin;
            const std::size_t c0 = n - c1;
            nodes[job.node].count0 = static_cast<std::uint32_t>(c0);
            nodes[job.node].count1 = static_cast<std::uint32_t>(c1);
            if (n < min_samples_split || c0 == 0 || c1 == 0 || job.depth >= max_depth) {
                continue;
            }
            const auto split = best_split(samples, job.begin, job.end, gini(c0, c1), feature_order, column, rng);
            if (!split) {
                continue;
            }
            const auto mid_it = std::partition(samples.begin() + static_cast<std::ptrdiff_t>(job.begin), samples.begin() + static_cast<std::ptrdiff_t>(job.end), [&](std::size_t s) {
                return rows.at(s, split->feature) <= split->threshold;
            });
            const auto mid = static_cast<std::size_t>(mid_it - samples.begin());
            const auto left = static_cast<std::uint32_t>(nodes.size());
            nodes.emplace_back();
            nodes.emplace_back();
            TreeNode &node = nodes[job.node];
            node.feature = static_cast<std::int32_t>(split->feature);
            node.threshold = split->threshold;
            node.left = left;
            node.right = left + 1;
            // right pushed first so the left subtree is expanded first
            stack.push_back({ left + 1, mid, job.end, job.depth + 1 });
            stack.push_back({ left, job.begin, mid, job.depth + 1 });
        }
        return nodes;
    }

    std::optional<Split> best_split(const std::vector<std::size_t> &samples, std::size_t begin, std::size_t end, double parent_impurity,
                                    std::vector<std::size_t> &feature_order, std::vector<std::pair<double, int>> &column, Rng &rng) const {
        const std::size_t n = end - begin;
        const std::size_t total1 = [&] {
            std::size_t c = 0;
            for (std::size_t k = begin; k < end; ++k) {
                c += static_cast<std::size_t>(labels[samples[k]]);
            }
            return c;
        }();
        // partial Fisher-Yates: the first max_features entries become the candidates
        for (std::size_t k = 0; k < max_features; ++k) {
            const std::size_t j = k + uniform_index(rng, feature_order.size() - k);
            std::swap(feature_order[k], feature_order[j]);
        }

        std::optional<Split> best;
        double best_impurity = parent_impurity - impurity_epsilon;
        for (std::size_t k = 0; k < max_features; ++k) {
            const std::size_t f = feature_order[k];
            column.clear();
            for (std::size_t s = begin; s < end; ++s) {
                column.emplace_back(rows.at(samples[s], f), labels[samples[s]]);
            }
            std::sort(column.begin(), column.end());
            if (column.front().first == column.back().first) {
                continue;  // constant in this node
            }
            std::size_t left1 = 0;
            for (std::size_t p = 0; p + 1 < n; ++p) {
                left1 += static_cast<std::size_t>(column[p].second);
                if (column[p].first == column[p + 1].first) {
                    continue;
                }
                const std::size_t n_left = p + 1;
                const std::size_t n_right = n - n_left;
                const double weighted = (static_cast<double>(n_left) * gini(n_left - left1, left1) +
                                         static_cast<double>(n_right) * gini(n_right - (total1 - left1), total1 - left1)) /
                                        static_cast<double>(n);
                if (weighted < best_impurity) {
                    best_impurity = weighted;
                    double threshold = column[p].first + (column[p + 1].first - column[p].first) / 2.0;
                    if (threshold >= column[p + 1].first) {
                        threshold = column[p].first;
                    }
                    best = Split{ f, threshold };
                }
            }
        }
        return best;
    }
};

}  // namespace

RandomForest RandomForest::fit(const ForestConfig &config, const DenseMatrix &rows, std::span<const int> labels) {
    if (rows.rows() == 0) {
        throw ConfigError{ "RandomForest::fit: no training rows" };
    }
    if (rows.cols() == 0) {
        throw ConfigError{ "RandomForest::fit: rows have no features" };
    }
    if (labels.size() != rows.rows()) {
        throw ConfigError{ fmt::format("RandomForest::fit: {} labels for {} rows", labels.size(), rows.rows()) };
    }
    if (config.n_trees == 0) {
        throw ConfigError{ "RandomForest::fit: n_trees must be at least 1" };
    }
    if (config.min_samples_split < 2) {
        throw ConfigError{ "RandomForest::fit: min_samples_split must be at least 2" };
    }
    for (const int l : labels) {
        if (l != 0 && l != 1) {
            throw ConfigError{ fmt::format("RandomForest::fit: label {} is not binary", l) };
        }
    }
    for (std::size_t r = 0; r < rows.rows(); ++r) {
        for (const double v : rows.row(r)) {
            if (std::isnan(v)) {
                throw ConfigError{ "RandomForest::fit: missing (NaN) feature value; impute before fitting" };
            }
        }
    }
    const std::size_t n_features = rows.cols();
    const std::size_t max_features = config.max_features.value_or(std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n_features))))));
    if (max_features < 1 || max_features > n_features) {
        throw ConfigError{ fmt::format("RandomForest::fit: max_features {} outside [1, {}]", max_features, n_features) };
    }

    RandomForest forest;
    forest.config_ = config;
    forest.config_.max_features = max_features;
    forest.n_features_ = n_features;
    forest.trees_.resize(config.n_trees);

    const TreeBuilder builder{ rows, labels, max_features, config.max_depth, config.min_samples_split };
    const std::size_t n = rows.rows();
    const auto train_tree = [&](std::size_t t) {
        Rng rng{ derive_seed(config.seed, t) };
        std::vector<std::size_t> samples(n);
        if (config.bootstrap) {
            for (std::size_t &s : samples) {
                s = uniform_index(rng, n);
            }
        } else {
            std::iota(samples.begin(), samples.end(), std::size_t{ 0 });
        }
        forest.trees_[t] = DecisionTree{ builder.build(std::move(samples), rng) };
    };

    const std::size_t jobs = std::clamp<std::size_t>(config.n_jobs, 1, config.n_trees);
    if (jobs == 1) {
        for (std::size_t t = 0; t < config.n_trees; ++t) {
            train_tree(t);
        }
    } else {
        std::vector<std::jthread> workers;
        workers.reserve(jobs);
        for (std::size_t w = 0; w < jobs; ++w) {
            workers.emplace_back([&, w] {
                for (std::size_t t = w; t < config.n_trees; t += jobs) {
                    train_tree(t);
                }
            });
        }
    }
    return forest;
}

ProbabilityEstimate RandomForest::predict_proba(std::span<const double> row) const {
    if (row.size() != n_features_) {
        throw ConfigError{ fmt::format("RandomForest::predict_proba: row has {} features, model expects {}", row.size(), n_features_) };
    }
    for (const double v : row) {
        if (std::isnan(v)) {
            throw ConfigError{ "RandomForest::predict_proba: missing (NaN) feature value" };
        }
    }
    std::size_t votes1 = 0;
    for (const DecisionTree &tree : trees_) {
        votes1 += static_cast<std::size_t>(tree.vote(row));
    }
    const auto total = static_cast<double>(trees_.size());
    return { static_cast<double>(trees_.size() - votes1) / total, static_cast<double>(votes1) / total };
}

std::string RandomForest::dump() const {
    std::string out = fmt::format("forest {} {}\n", trees_.size(), n_features_);
    for (std::size_t t = 0; t < trees_.size(); ++t) {
        const auto &nodes = trees_[t].nodes();
        out += fmt::format("tree {} {}\n", t, nodes.size());
        for (std::size_t id = 0; id < nodes.size(); ++id) {
            const TreeNode &node = nodes[id];
            if (node.is_leaf()) {
                out += fmt::format("{} leaf {} {}\n", id, node.count0, node.count1);
            } else {
                out += fmt::format("{} split {} {} {} {} {} {}\n", id, node.feature, node.threshold, node.left, node.right, node.count0, node.count1);
            }
        }
    }
    return out;
}

}  // namespace frugal
