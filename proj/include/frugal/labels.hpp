#pragma once

// What has been observed about each (instance, algorithm) run so far.

#include <cstddef>
#include <span>
#include <vector>

namespace frugal {

struct Observation {
    enum class Kind { unlabelled, censored, solved };

    Kind kind{ Kind::unlabelled };
    double seconds{ 0.0 };  // censoring level or solved runtime

    [[nodiscard]] static constexpr Observation unlabelled() noexcept { return {}; }
    [[nodiscard]] static constexpr Observation censored(double at) noexcept { return { Kind::censored, at }; }
    [[nodiscard]] static constexpr Observation solved(double runtime) noexcept { return { Kind::solved, runtime }; }

    [[nodiscard]] constexpr bool is_unlabelled() const noexcept { return kind == Kind::unlabelled; }
    [[nodiscard]] constexpr bool is_censored() const noexcept { return kind == Kind::censored; }
    [[nodiscard]] constexpr bool is_solved() const noexcept { return kind == Kind::solved; }

    /// True when running again with `timeout` cannot reveal anything new.
    [[nodiscard]] constexpr bool covers(double timeout) const noexcept {
        return is_solved() || (is_censored() && seconds >= timeout);
    }

    friend constexpr bool operator==(const Observation &, const Observation &) = default;
};

/// Dense (instance, algorithm) -> Observation table. Observations only improve:
/// a censoring level can rise or turn into a solve, and a solve is final.
class LabelStore {
  public:
    LabelStore() = default;
    LabelStore(std::size_t n_instances, std::size_t n_algorithms) :
        n_algorithms_{ n_algorithms },
        cells_(n_instances * n_algorithms) {}

    [[nodiscard]] std::size_t n_instances() const noexcept { return n_algorithms_ == 0 ? 0 : cells_.size() / n_algorithms_; }
    [[nodiscard]] std::size_t n_algorithms() const noexcept { return n_algorithms_; }

    [[nodiscard]] const Observation &get(std::size_t instance, std::size_t algorithm) const { return cells_[instance * n_algorithms_ + algorithm]; }

    /// Stores `obs` if it improves on the current cell; returns whether it did.
    bool record(std::size_t instance, std::size_t algorithm, Observation obs);

    /// Number of observed (not unlabelled) cells among `instances`.
    [[nodiscard]] std::size_t count_observed(std::span<const std::size_t> instances) const;

  private:
    std::size_t n_algorithms_{ 0 };
    std::vector<Observation> cells_;
};

enum class PairwiseLabel { a_faster, b_faster, no_label };

/// Which of two observed runs is faster. A solved run beats a run censored at
/// or above its runtime; two censored runs, an exact runtime tie, or a solve
/// slower than the other side's censoring level give no_label. Throws
/// ConfigError if either side is unlabelled.
[[nodiscard]] PairwiseLabel pairwise_label(const Observation &a, const Observation &b);

[[nodiscard]] inline PairwiseLabel pairwise_label(const LabelStore &store, std::size_t instance, std::size_t a, std::size_t b) {
    return pairwise_label(store.get(instance, a), store.get(instance, b));
}

}  // namespace frugal
