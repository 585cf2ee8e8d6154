#include "frugal/selector.hpp"

#include "frugal/errors.hpp"
#include "frugal/rng.hpp"

#include <fmt/format.h>

#include <algorithm>

namespace frugal {

namespace {

constexpr std::uint64_t timeout_seed_stream = 0x100000;

}  // namespace

std::vector<AlgorithmPair> algorithm_pairs(std::size_t n_algorithms) {
    std::vector<AlgorithmPair> pairs;
    pairs.reserve(n_algorithms * (n_algorithms - 1) / 2);
    for (std::size_t a = 0; a < n_algorithms; ++a) {
        for (std::size_t b = a + 1; b < n_algorithms; ++b) {
            pairs.push_back({ a, b });
        }
    }
    return pairs;
}

ProbabilityEstimate PairwiseModel::predict(std::span<const double> row) const {
    if (!model) {
        return { 0.5, 0.5 };
    }
    return model->predict_proba(row);
}

bool TimeoutModel::predicts_timeout(std::span<const double> row) const {
    return model && model->predict_proba(row).p_class1 > timeout_probability_threshold;
}

std::vector<std::size_t> SelectorEnsemble::predicted_timeouts(std::span<const double> dense_row) const {
    std::vector<std::size_t> out;
    if (!timeout_models) {
        return out;
    }
    for (const TimeoutModel &tm : *timeout_models) {
        if (tm.predicts_timeout(dense_row)) {
            out.push_back(tm.algorithm);
        }
    }
    return out;
}

std::vector<std::size_t> SelectorEnsemble::votes(std::span<const double> dense_row, const std::vector<bool> &candidates) const {
    std::vector<std::size_t> counts(n_algorithms, 0);
    for (const PairwiseModel &pm : pairwise) {
        if (!pm.trained() || !candidates[pm.pair.a] || !candidates[pm.pair.b]) {
            continue;
        }
        ++counts[pm.model->predict_label(dense_row) == 0 ? pm.pair.a : pm.pair.b];
    }
    return counts;
}

std::size_t SelectorEnsemble::select_dense(std::span<const double> dense_row) const {
    std::vector<bool> candidates(n_algorithms, true);
    const std::vector<std::size_t> excluded = predicted_timeouts(dense_row);
    // every algorithm predicted to time out: keep them all
    if (excluded.size() < n_algorithms) {
        for (const std::size_t a : excluded) {
            candidates[a] = false;
        }
    }
    const std::vector<std::size_t> counts = votes(dense_row, candidates);
    std::size_t best = n_algorithms;
    for (std::size_t a = 0; a < n_algorithms; ++a) {
        if (candidates[a] && (best == n_algorithms || counts[a] > counts[best])) {
            best = a;
        }
    }
    return best;
}

std::optional<int> timeout_label(const Observation &obs, double timeout) noexcept {
    if (obs.is_solved()) {
        return obs.seconds <= timeout ? 0 : 1;
    }
    if (obs.is_censored() && obs.seconds >= timeout) {
        return 1;
    }
    return std::nullopt;
}

SelectorEnsemble train_ensemble(const EnsembleTrainingInput &input, const ForestConfig &forest, bool timeout_enabled, double current_timeout) {
    const LabelStore &labels = input.labels;
    const std::size_t n_alg = labels.n_algorithms();
    if (labels.count_observed(input.instances) == 0) {
        throw ConfigError{ "train_ensemble: no observed runs on the training instances" };
    }

    SelectorEnsemble ensemble;
    ensemble.n_algorithms = n_alg;
    ensemble.imputer = input.imputer;

    const std::vector<AlgorithmPair> pairs = algorithm_pairs(n_alg);
    ensemble.pairwise.reserve(pairs.size());
    for (std::size_t k = 0; k < pairs.size(); ++k) {
        const AlgorithmPair pair = pairs[k];
        DenseMatrix rows{ input.features.cols() };
        std::vector<int> y;
        for (const std::size_t i : input.instances) {
            const Observation &oa = labels.get(i, pair.a);
            const Observation &ob = labels.get(i, pair.b);
            if (oa.is_unlabelled() || ob.is_unlabelled()) {
                continue;
            }
            const PairwiseLabel label = pairwise_label(oa, ob);
            if (label == PairwiseLabel::no_label) {
                continue;
            }
            rows.push_row(input.features.row(i));
            y.push_back(label == PairwiseLabel::a_faster ? 0 : 1);
        }
        PairwiseModel model{ pair, std::nullopt };
        if (!y.empty()) {
            ForestConfig cfg = forest;
            cfg.seed = derive_seed(forest.seed, k);
            model.model = RandomForest::fit(cfg, rows, y);
        }
        ensemble.pairwise.push_back(std::move(model));
    }

    if (timeout_enabled) {
        std::vector<TimeoutModel> models;
        models.reserve(n_alg);
        for (std::size_t a = 0; a < n_alg; ++a) {
            DenseMatrix rows{ input.features.cols() };
            std::vector<int> y;
            for (const std::size_t i : input.instances) {
                if (const auto label = timeout_label(labels.get(i, a), current_timeout)) {
                    rows.push_row(input.features.row(i));
                    y.push_back(*label);
                }
            }
            TimeoutModel model{ a, current_timeout, std::nullopt };
            if (!y.empty()) {
                ForestConfig cfg = forest;
                cfg.seed = derive_seed(forest.seed, timeout_seed_stream + a);
                model.model = RandomForest::fit(cfg, rows, y);
            }
            models.push_back(std::move(model));
        }
        ensemble.timeout_models = std::move(models);
    }
    return ensemble;
}

std::size_t select_algorithm(const SelectorEnsemble &ensemble, std::span<const FeatureValue> row) {
    const std::vector<double> dense = apply_imputer(ensemble.imputer, row);
    return ensemble.select_dense(dense);
}

double evaluate_selector(const SelectorEnsemble &ensemble, std::span<const std::size_t> instances, const Scenario &scenario) {
    double total = 0.0;
    for (const std::size_t i : instances) {
        const std::size_t a = select_algorithm(ensemble, scenario.feature_values[i]);
        total += par10(scenario.run(i, a), scenario.cutoff);
    }
    return total;
}

double evaluate_selector(const SelectorEnsemble &ensemble, std::span<const std::size_t> instances, const Scenario &scenario, const DenseMatrix &features) {
    double total = 0.0;
    for (const std::size_t i : instances) {
        const std::size_t a = ensemble.select_dense(features.row(i));
        total += par10(scenario.run(i, a), scenario.cutoff);
    }
    return total;
}

DenseMatrix impute_all(const Scenario &scenario, const ImputerModel &imputer) {
    DenseMatrix out{ imputer.n_output_features() };
    for (std::size_t i = 0; i < scenario.n_instances(); ++i) {
        out.push_row(apply_imputer(imputer, scenario.feature_values[i]));
    }
    return out;
}

}  // namespace frugal
