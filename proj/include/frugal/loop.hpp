#pragma once

// Active-learning engine: per-pair candidate pools, query selection, replayed
// execution with cost accounting, and a dynamic timeout that grows when the
// validation score stops improving.

#include "frugal/forest.hpp"
#include "frugal/labels.hpp"
#include "frugal/preprocess.hpp"
#include "frugal/rng.hpp"
#include "frugal/scenario.hpp"
#include "frugal/selector.hpp"

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace frugal {

class DynamicTimeoutController {
  public:
    DynamicTimeoutController(double initial, double cap, double growth_factor, std::size_t plateau_window, double plateau_tolerance);

    /// A controller pinned at `cap` (dynamic timeouts disabled).
    [[nodiscard]] static DynamicTimeoutController fixed(double cap) { return { cap, cap, 1.0, 1, 0.0 }; }

    [[nodiscard]] double current() const noexcept { return current_; }
    [[nodiscard]] double initial() const noexcept { return initial_; }
    [[nodiscard]] double cap() const noexcept { return cap_; }
    [[nodiscard]] bool at_cap() const noexcept { return current_ >= cap_; }
    [[nodiscard]] const std::vector<double> &history() const noexcept { return history_; }

    /// Records a validation PAR10 score. When the best of the last
    /// `plateau_window` scores improves on the oldest of them by less than
    /// `plateau_tolerance` (relative), the timeout grows by `growth_factor`
    /// (capped) and the history is cleared. Returns whether it grew.
    bool observe(double validation_par10);

    /// Grows the timeout unconditionally (used when no query can make progress
    /// at the current level). Returns false at the cap.
    bool force_increase();

  private:
    double current_;
    double initial_;
    double cap_;
    double growth_factor_;
    std::size_t plateau_window_;
    double plateau_tolerance_;
    std::vector<double> history_;
};

struct LedgerEntry {
    std::size_t step{};
    std::size_t instance{};
    std::size_t algorithm{};
    double charged_s{};
    Observation result;
};

/// Append-only record of charged CPU seconds.
class CostLedger {
  public:
    void charge(const LedgerEntry &entry);

    [[nodiscard]] double total() const noexcept { return total_; }
    [[nodiscard]] const std::vector<LedgerEntry> &entries() const noexcept { return entries_; }

  private:
    double total_{ 0.0 };
    std::vector<LedgerEntry> entries_;
};

/// Replays recorded runs as if the solvers were executed, caching the best
/// observation per (instance, algorithm).
class RunOracle {
  public:
    explicit RunOracle(const Scenario &scenario);

    /// solved(r) iff the recorded run is ok with r <= timeout, censored(timeout) otherwise.
    [[nodiscard]] Observation simulate(std::size_t instance, std::size_t algorithm, double timeout) const;
    /// CPU seconds one attempt at `timeout` consumes: min(recorded runtime, timeout).
    [[nodiscard]] double attempt_cost(std::size_t instance, std::size_t algorithm, double timeout) const;

    /// Runs from scratch at `timeout` unless the cache already covers that
    /// level; charges the ledger and returns the seconds charged (0 if cached).
    double execute(std::size_t instance, std::size_t algorithm, double timeout, std::size_t step, CostLedger &ledger);

    [[nodiscard]] const LabelStore &cache() const noexcept { return cache_; }
    [[nodiscard]] const Scenario &scenario() const noexcept { return *scenario_; }

  private:
    const Scenario *scenario_;
    LabelStore cache_;
};

/// Per-pair sets of training instances still worth querying.
class QueryPool {
  public:
    QueryPool() = default;
    QueryPool(std::size_t n_pairs, std::span<const std::size_t> instances, std::size_t n_total_instances);

    [[nodiscard]] bool contains(std::size_t pair_index, std::size_t instance) const { return member_[pair_index * stride_ + instance] != 0; }
    void remove(std::size_t pair_index, std::size_t instance);

    [[nodiscard]] std::size_t n_pairs() const noexcept { return sizes_.size(); }
    [[nodiscard]] std::size_t size(std::size_t pair_index) const { return sizes_[pair_index]; }
    [[nodiscard]] std::size_t size() const noexcept { return total_; }
    [[nodiscard]] bool empty() const noexcept { return total_ == 0; }
    /// Instances the pools were built over, ascending.
    [[nodiscard]] const std::vector<std::size_t> &instances() const noexcept { return instances_; }

  private:
    std::size_t stride_{ 0 };
    std::vector<std::size_t> instances_;
    std::vector<char> member_;
    std::vector<std::size_t> sizes_;
    std::size_t total_{ 0 };
};

struct QueryRequest {
    std::size_t pair_index{};
    AlgorithmPair pair;
    std::size_t instance{};
    double confidence{ 0.5 };  // max posterior of the pair's model; 0.5 when it abstains

    friend bool operator==(const QueryRequest &, const QueryRequest &) = default;
};

enum class SelectionStrategy { uncertainty, random };

struct TimeoutControllerConfig {
    double initial_fraction{ 1.0 / 64.0 };  // of the cutoff
    double growth_factor{ 2.0 };
    std::size_t plateau_window{ 3 };
    double plateau_tolerance{ 0.01 };
};

struct LoopConfig {
    SelectionStrategy selection{ SelectionStrategy::uncertainty };
    bool timeout_predictor{ false };
    bool dynamic_timeout{ false };
    /// Requests per step as a fraction of the fold's training instances (rounded up).
    double batch_fraction{ 0.01 };
    std::optional<std::size_t> batch_size{};
    /// Instances run on every algorithm before the first step; defaults to the batch size.
    std::optional<std::size_t> initial_size{};
    std::uint64_t seed{ 0 };
    ForestConfig forest{};
    TimeoutControllerConfig controller{};
};

/// Forest settings (including the seed) for a run seed; shared with the passive baseline.
[[nodiscard]] ForestConfig ensemble_forest_config(const ForestConfig &base, std::uint64_t run_seed) noexcept;

/// ceil(fraction * n_train), at least 1.
[[nodiscard]] std::size_t batch_size_for(double fraction, std::size_t n_train);

struct LoopStep {
    std::size_t step{};
    double timeout_s{};         // timeout in force while the step's runs executed
    std::size_t requests{};     // cumulative (pair, instance) requests served
    double cost_s{};            // cumulative charged CPU seconds
    std::size_t observed_cells{};  // observed (training instance, algorithm) cells
    std::size_t total_cells{};
    double validation_par10{};
    double test_par10{};
};

class FrugalLoop {
  public:
    /// Runs a seeded random initial set on every algorithm at the initial
    /// timeout, builds the pools and trains the first ensemble.
    FrugalLoop(const Scenario &scenario, const SplitPlan &plan, std::size_t fold, LoopConfig config);

    [[nodiscard]] std::vector<QueryRequest> select_queries_uncertainty(std::size_t n) const;
    [[nodiscard]] std::vector<QueryRequest> select_queries_random(std::size_t n);
    void execute_request(const QueryRequest &request);

    /// One select/execute/retrain/evaluate iteration; nullopt once the pools are exhausted.
    [[nodiscard]] std::optional<LoopStep> step();

    [[nodiscard]] const LoopStep &initial_step() const noexcept { return initial_step_; }
    [[nodiscard]] const LabelStore &labels() const noexcept { return oracle_.cache(); }
    [[nodiscard]] const CostLedger &ledger() const noexcept { return ledger_; }
    [[nodiscard]] const QueryPool &pool() const noexcept { return pool_; }
    [[nodiscard]] const SelectorEnsemble &ensemble() const noexcept { return ensemble_; }
    [[nodiscard]] const DynamicTimeoutController &controller() const noexcept { return controller_; }
    [[nodiscard]] const std::vector<std::size_t> &initial_instances() const noexcept { return initial_instances_; }
    [[nodiscard]] const std::vector<AlgorithmPair> &pairs() const noexcept { return pairs_; }
    [[nodiscard]] std::size_t batch_size() const noexcept { return batch_size_; }
    [[nodiscard]] const LoopConfig &config() const noexcept { return config_; }

    /// Pool entries that a run at the current timeout could still change.
    [[nodiscard]] bool actionable(std::size_t pair_index, std::size_t instance) const;

  private:
    void refresh_instance(std::size_t instance);
    void retrain();
    LoopStep evaluate(std::size_t step_index, double timeout);

    const Scenario *scenario_;
    LoopConfig config_;
    FoldSplit fold_;
    std::vector<std::size_t> test_;
    std::vector<AlgorithmPair> pairs_;
    ImputerModel imputer_;
    DenseMatrix features_;
    RunOracle oracle_;
    CostLedger ledger_;
    QueryPool pool_;
    DynamicTimeoutController controller_;
    SelectorEnsemble ensemble_;
    Rng rng_;
    ForestConfig forest_;
    std::size_t batch_size_{};
    std::size_t step_index_{ 0 };
    std::size_t requests_{ 0 };
    std::vector<std::size_t> initial_instances_;
    LoopStep initial_step_{};
};

/// Initial step followed by every step until the pools are exhausted.
[[nodiscard]] std::vector<LoopStep> run_loop(const Scenario &scenario, const SplitPlan &plan, std::size_t fold, const LoopConfig &config);

}  // namespace frugal
