#include "frugal/preprocess.hpp"

#include "frugal/errors.hpp"
#include "frugal/rng.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <numeric>

namespace frugal {

double median(std::span<double> values) {
    if (values.empty()) {
        throw ConfigError{ "median of an empty set" };
    }
    const std::size_t mid = values.size() / 2;
    std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
    const double upper = values[mid];
    if (values.size() % 2 == 1) {
        return upper;
    }
    const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
    return lower + (upper - lower) / 2.0;
}

ImputerModel fit_imputer(const Scenario &scenario, std::span<const std::size_t> train_instances) {
    if (train_instances.empty()) {
        throw ConfigError{ "fit_imputer: empty training set" };
    }
    ImputerModel model;
    model.n_input_features = scenario.n_features();
    const std::size_t n = train_instances.size();
    std::vector<double> present;
    present.reserve(n);
    for (std::size_t f = 0; f < scenario.n_features(); ++f) {
        present.clear();
        for (const std::size_t i : train_instances) {
            if (const FeatureValue &v = scenario.feature_values[i][f]) {
                present.push_back(*v);
            }
        }
        const std::size_t missing = n - present.size();
        // missing / n > 0.20  <=>  5 * missing > n
        if (5 * missing > n || present.empty()) {
            continue;
        }
        model.kept_features.push_back(f);
        model.kept_names.push_back(scenario.features[f]);
        model.medians.push_back(median(present));
    }
    if (model.kept_features.empty()) {
        throw DataError{ fmt::format("scenario '{}': every feature exceeds the {}% missing-value threshold", scenario.id, max_missing_rate * 100.0) };
    }
    return model;
}

std::vector<double> apply_imputer(const ImputerModel &model, std::span<const FeatureValue> row) {
    if (row.size() != model.n_input_features) {
        throw ConfigError{ fmt::format("apply_imputer: row has {} features, model expects {}", row.size(), model.n_input_features) };
    }
    std::vector<double> out(model.kept_features.size());
    for (std::size_t k = 0; k < model.kept_features.size(); ++k) {
        const FeatureValue &v = row[model.kept_features[k]];
        out[k] = v ? *v : model.medians[k];
    }
    return out;
}

SplitPlan make_splits(std::size_t n_instances, std::uint64_t seed, std::size_t n_folds) {
    if (n_instances < min_split_instances) {
        throw DataError{ fmt::format("need at least {} instances to split, got {}", min_split_instances, n_instances) };
    }
    if (n_folds == 0) {
        throw ConfigError{ "make_splits: at least one fold is required" };
    }
    std::vector<std::size_t> order(n_instances);
    std::iota(order.begin(), order.end(), std::size_t{ 0 });
    Rng rng{ seed };
    shuffle(std::span<std::size_t>{ order }, rng);

    SplitPlan plan;
    plan.seed = seed;
    const std::size_t n_test = tenth_rounded(n_instances);
    plan.test.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
    std::sort(plan.test.begin(), plan.test.end());

    const std::vector<std::size_t> remainder(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
    const std::size_t m = remainder.size();
    const std::size_t n_validation = tenth_rounded(m);
    if (n_validation == 0 || n_validation >= m) {
        throw DataError{ fmt::format("too few instances ({}) to carve a validation set", n_instances) };
    }
    plan.folds.reserve(n_folds);
    for (std::size_t k = 0; k < n_folds; ++k) {
        std::vector<bool> in_validation(m, false);
        for (std::size_t j = 0; j < n_validation; ++j) {
            in_validation[(k * n_validation + j) % m] = true;
        }
        FoldSplit fold;
        for (std::size_t p = 0; p < m; ++p) {
            (in_validation[p] ? fold.validation : fold.train).push_back(remainder[p]);
        }
        std::sort(fold.train.begin(), fold.train.end());
        std::sort(fold.validation.begin(), fold.validation.end());
        plan.folds.push_back(std::move(fold));
    }
    return plan;
}

SplitPlan make_splits(const Scenario &scenario, std::uint64_t seed, std::size_t n_folds) {
    return make_splits(scenario.n_instances(), seed, n_folds);
}

}  // namespace frugal
