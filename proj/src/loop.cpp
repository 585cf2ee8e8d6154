#include "frugal/loop.hpp"

#include "frugal/errors.hpp"
#include "frugal/uncertainty.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <tuple>

namespace frugal {

namespace {

constexpr std::uint64_t selection_stream = 1;
constexpr std::uint64_t ensemble_stream = 2;

}  // namespace

// --- DynamicTimeoutController ---------------------------------------------

DynamicTimeoutController::DynamicTimeoutController(double initial, double cap, double growth_factor, std::size_t plateau_window, double plateau_tolerance) :
    current_{ initial },
    initial_{ initial },
    cap_{ cap },
    growth_factor_{ growth_factor },
    plateau_window_{ plateau_window },
    plateau_tolerance_{ plateau_tolerance } {
    if (!(initial > 0.0) || !(initial <= cap)) {
        throw ConfigError{ fmt::format("timeout controller: need 0 < initial ({}) <= cap ({})", initial, cap) };
    }
    if (!(growth_factor >= 1.0)) {
        throw ConfigError{ fmt::format("timeout controller: growth factor {} must be >= 1", growth_factor) };
    }
    if (plateau_window == 0) {
        throw ConfigError{ "timeout controller: plateau window must be at least 1" };
    }
    if (!(plateau_tolerance >= 0.0)) {
        throw ConfigError{ "timeout controller: plateau tolerance must be non-negative" };
    }
}

bool DynamicTimeoutController::observe(double validation_par10) {
    history_.push_back(validation_par10);
    if (at_cap() || history_.size() < plateau_window_) {
        return false;
    }
    const auto window_begin = history_.end() - static_cast<std::ptrdiff_t>(plateau_window_);
    const double reference = *window_begin;
    const double best = *std::min_element(window_begin, history_.end());
    const double improvement = reference > 0.0 ? (reference - best) / reference : 0.0;
    if (improvement >= plateau_tolerance_) {
        return false;
    }
    return force_increase();
}

bool DynamicTimeoutController::force_increase() {
    if (at_cap()) {
        return false;
    }
    current_ = std::min(current_ * growth_factor_, cap_);
    history_.clear();
    return true;
}

// --- CostLedger / RunOracle -------------------------------------------------

void CostLedger::charge(const LedgerEntry &entry) {
    entries_.push_back(entry);
    total_ += entry.charged_s;
}

RunOracle::RunOracle(const Scenario &scenario) :
    scenario_{ &scenario },
    cache_{ scenario.n_instances(), scenario.n_algorithms() } {}

Observation RunOracle::simulate(std::size_t instance, std::size_t algorithm, double timeout) const {
    const RunRecord &run = scenario_->run(instance, algorithm);
    if (run.solved() && run.runtime <= timeout) {
        return Observation::solved(run.runtime);
    }
    return Observation::censored(timeout);
}

double RunOracle::attempt_cost(std::size_t instance, std::size_t algorithm, double timeout) const {
    return std::min(scenario_->run(instance, algorithm).runtime, timeout);
}

double RunOracle::execute(std::size_t instance, std::size_t algorithm, double timeout, std::size_t step, CostLedger &ledger) {
    if (cache_.get(instance, algorithm).covers(timeout)) {
        return 0.0;
    }
    const Observation result = simulate(instance, algorithm, timeout);
    const double charged = attempt_cost(instance, algorithm, timeout);
    cache_.record(instance, algorithm, result);
    ledger.charge({ step, instance, algorithm, charged, result });
    return charged;
}

// --- QueryPool ---------------------------------------------------------------

QueryPool::QueryPool(std::size_t n_pairs, std::span<const std::size_t> instances, std::size_t n_total_instances) :
    stride_{ n_total_instances },
    instances_(instances.begin(), instances.end()),
    member_(n_pairs * n_total_instances, 0),
    sizes_(n_pairs, instances.size()),
    total_{ n_pairs * instances.size() } {
    std::sort(instances_.begin(), instances_.end());
    for (std::size_t k = 0; k < n_pairs; ++k) {
        for (const std::size_t i : instances_) {
            member_[k * stride_ + i] = 1;
        }
    }
}

void QueryPool::remove(std::size_t pair_index, std::size_t instance) {
    char &slot = member_[pair_index * stride_ + instance];
    if (slot != 0) {
        slot = 0;
        --sizes_[pair_index];
        --total_;
    }
}

// --- FrugalLoop --------------------------------------------------------------

ForestConfig ensemble_forest_config(const ForestConfig &base, std::uint64_t run_seed) noexcept {
    ForestConfig cfg = base;
    cfg.seed = derive_seed(run_seed, ensemble_stream);
    return cfg;
}

std::size_t batch_size_for(double fraction, std::size_t n_train) {
    if (!(fraction > 0.0)) {
        throw ConfigError{ fmt::format("batch fraction {} must be positive", fraction) };
    }
    const double raw = fraction * static_cast<double>(n_train);
    // 1e-9 absorbs representation error such as 0.01 * 300 = 3.0000000000000004
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(raw - 1e-9)));
}

FrugalLoop::FrugalLoop(const Scenario &scenario, const SplitPlan &plan, std::size_t fold, LoopConfig config) :
    scenario_{ &scenario },
    config_{ std::move(config) },
    fold_{ plan.folds.at(fold) },
    test_{ plan.test },
    pairs_{ algorithm_pairs(scenario.n_algorithms()) },
    imputer_{ fit_imputer(scenario, fold_.train) },
    features_{ impute_all(scenario, imputer_) },
    oracle_{ scenario },
    controller_{ config_.dynamic_timeout
                     ? DynamicTimeoutController{ scenario.cutoff * config_.controller.initial_fraction, scenario.cutoff, config_.controller.growth_factor,
                                                 config_.controller.plateau_window, config_.controller.plateau_tolerance }
                     : DynamicTimeoutController::fixed(scenario.cutoff) },
    rng_{ derive_seed(config_.seed, selection_stream) },
    forest_{ ensemble_forest_config(config_.forest, config_.seed) } {
    if (fold_.train.empty()) {
        throw ConfigError{ "frugal loop: empty training split" };
    }
    batch_size_ = config_.batch_size.value_or(batch_size_for(config_.batch_fraction, fold_.train.size()));
    if (batch_size_ == 0) {
        throw ConfigError{ "frugal loop: batch size must be at least 1" };
    }
    const std::size_t initial_size = config_.initial_size.value_or(batch_size_);
    if (initial_size == 0 || initial_size > fold_.train.size()) {
        throw ConfigError{ fmt::format("frugal loop: initial set of {} does not fit a training set of {}", initial_size, fold_.train.size()) };
    }

    std::vector<std::size_t> shuffled = fold_.train;
    for (std::size_t k = 0; k < initial_size; ++k) {
        const std::size_t j = k + uniform_index(rng_, shuffled.size() - k);
        std::swap(shuffled[k], shuffled[j]);
    }
    initial_instances_.assign(shuffled.begin(), shuffled.begin() + static_cast<std::ptrdiff_t>(initial_size));
    std::sort(initial_instances_.begin(), initial_instances_.end());

    const double timeout = controller_.current();
    for (const std::size_t i : initial_instances_) {
        for (std::size_t a = 0; a < scenario.n_algorithms(); ++a) {
            oracle_.execute(i, a, timeout, 0, ledger_);
        }
    }
    requests_ = initial_size * pairs_.size();

    pool_ = QueryPool{ pairs_.size(), fold_.train, scenario.n_instances() };
    for (const std::size_t i : initial_instances_) {
        refresh_instance(i);
    }
    retrain();
    initial_step_ = evaluate(0, timeout);
    if (config_.dynamic_timeout) {
        controller_.observe(initial_step_.validation_par10);
    }
}

bool FrugalLoop::actionable(std::size_t pair_index, std::size_t instance) const {
    if (!pool_.contains(pair_index, instance)) {
        return false;
    }
    const double timeout = controller_.current();
    const AlgorithmPair pair = pairs_[pair_index];
    return !labels().get(instance, pair.a).covers(timeout) || !labels().get(instance, pair.b).covers(timeout);
}

void FrugalLoop::refresh_instance(std::size_t instance) {
    const double cap = controller_.cap();
    for (std::size_t k = 0; k < pairs_.size(); ++k) {
        if (!pool_.contains(k, instance)) {
            continue;
        }
        const Observation &oa = labels().get(instance, pairs_[k].a);
        const Observation &ob = labels().get(instance, pairs_[k].b);
        if (oa.is_unlabelled() || ob.is_unlabelled()) {
            continue;
        }
        // decisive, or nothing left to learn even at the full cutoff
        if (pairwise_label(oa, ob) != PairwiseLabel::no_label || (oa.covers(cap) && ob.covers(cap))) {
            pool_.remove(k, instance);
        }
    }
}

void FrugalLoop::retrain() {
    const EnsembleTrainingInput input{ labels(), fold_.train, features_, imputer_ };
    ensemble_ = train_ensemble(input, forest_, config_.timeout_predictor, controller_.current());
}

LoopStep FrugalLoop::evaluate(std::size_t step_index, double timeout) {
    LoopStep out;
    out.step = step_index;
    out.timeout_s = timeout;
    out.requests = requests_;
    out.cost_s = ledger_.total();
    out.observed_cells = labels().count_observed(fold_.train);
    out.total_cells = fold_.train.size() * scenario_->n_algorithms();
    out.validation_par10 = evaluate_selector(ensemble_, fold_.validation, *scenario_, features_);
    out.test_par10 = evaluate_selector(ensemble_, test_, *scenario_, features_);
    return out;
}

std::vector<QueryRequest> FrugalLoop::select_queries_uncertainty(std::size_t n) const {
    struct Scored {
        double score;
        QueryRequest request;
    };
    std::vector<Scored> table;
    for (std::size_t k = 0; k < pairs_.size(); ++k) {
        const PairwiseModel &model = ensemble_.pairwise[k];
        for (const std::size_t i : pool_.instances()) {
            if (!actionable(k, i)) {
                continue;
            }
            const ProbabilityEstimate p = model.predict(features_.row(i));
            table.push_back({ least_confidence(p), QueryRequest{ k, pairs_[k], i, p.confidence() } });
        }
    }
    // most uncertain first; ties by pair order, then instance order
    std::sort(table.begin(), table.end(), [](const Scored &x, const Scored &y) {
        return std::tie(y.score, x.request.pair_index, x.request.instance) < std::tie(x.score, y.request.pair_index, y.request.instance);
    });
    std::vector<QueryRequest> out;
    out.reserve(std::min(n, table.size()));
    for (std::size_t r = 0; r < table.size() && r < n; ++r) {
        out.push_back(table[r].request);
    }
    return out;
}

std::vector<QueryRequest> FrugalLoop::select_queries_random(std::size_t n) {
    std::vector<QueryRequest> entries;
    for (std::size_t k = 0; k < pairs_.size(); ++k) {
        for (const std::size_t i : pool_.instances()) {
            if (actionable(k, i)) {
                entries.push_back({ k, pairs_[k], i, 0.5 });
            }
        }
    }
    const std::size_t take = std::min(n, entries.size());
    for (std::size_t r = 0; r < take; ++r) {
        const std::size_t j = r + uniform_index(rng_, entries.size() - r);
        std::swap(entries[r], entries[j]);
    }
    entries.resize(take);
    for (QueryRequest &req : entries) {
        req.confidence = ensemble_.pairwise[req.pair_index].predict(features_.row(req.instance)).confidence();
    }
    return entries;
}

void FrugalLoop::execute_request(const QueryRequest &request) {
    const double timeout = controller_.current();
    oracle_.execute(request.instance, request.pair.a, timeout, step_index_, ledger_);
    oracle_.execute(request.instance, request.pair.b, timeout, step_index_, ledger_);
    ++requests_;
    refresh_instance(request.instance);
}

std::optional<LoopStep> FrugalLoop::step() {
    while (true) {
        if (pool_.empty()) {
            return std::nullopt;
        }
        bool any = false;
        for (std::size_t k = 0; k < pairs_.size() && !any; ++k) {
            for (const std::size_t i : pool_.instances()) {
                if (actionable(k, i)) {
                    any = true;
                    break;
                }
            }
        }
        if (any) {
            break;
        }
        // everything left waits for a longer timeout
        if (!controller_.force_increase()) {
            return std::nullopt;
        }
    }

    ++step_index_;
    const double timeout = controller_.current();
    const std::vector<QueryRequest> batch = config_.selection == SelectionStrategy::uncertainty ? select_queries_uncertainty(batch_size_) : select_queries_random(batch_size_);
    for (const QueryRequest &request : batch) {
        execute_request(request);
    }
    retrain();
    LoopStep record = evaluate(step_index_, timeout);
    if (config_.dynamic_timeout) {
        controller_.observe(record.validation_par10);
    }
    return record;
}

std::vector<LoopStep> run_loop(const Scenario &scenario, const SplitPlan &plan, std::size_t fold, const LoopConfig &config) {
    FrugalLoop loop{ scenario, plan, fold, config };
    std::vector<LoopStep> steps{ loop.initial_step() };
    while (auto next = loop.step()) {
        steps.push_back(*next);
    }
    return steps;
}

}  // namespace frugal
