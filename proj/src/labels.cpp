#include "frugal/labels.hpp"

#include "frugal/errors.hpp"

namespace frugal {

bool LabelStore::record(std::size_t instance, std::size_t algorithm, Observation obs) {
    Observation &cell = cells_[instance * n_algorithms_ + algorithm];
    if (obs.is_unlabelled() || cell.is_solved()) {
        return false;
    }
    if (cell.is_censored() && obs.is_censored() && obs.seconds <= cell.seconds) {
        return false;
    }
    cell = obs;
    return true;
}

std::size_t LabelStore::count_observed(std::span<const std::size_t> instances) const {
    std::size_t count = 0;
    for (const std::size_t i : instances) {
        for (std::size_t a = 0; a < n_algorithms_; ++a) {
            count += get(i, a).is_unlabelled() ? 0 : 1;
        }
    }
    return count;
}

PairwiseLabel pairwise_label(const Observation &a, const Observation &b) {
    if (a.is_unlabelled() || b.is_unlabelled()) {
        throw ConfigError{ "pairwise_label: both runs must be observed" };
    }
    if (a.is_solved() && b.is_solved()) {
        if (a.seconds < b.seconds) {
            return PairwiseLabel::a_faster;
        }
        if (b.seconds < a.seconds) {
            return PairwiseLabel::b_faster;
        }
        return PairwiseLabel::no_label;
    }
    if (a.is_solved()) {
        return a.seconds <= b.seconds ? PairwiseLabel::a_faster : PairwiseLabel::no_label;
    }
    if (b.is_solved()) {
        return b.seconds <= a.seconds ? PairwiseLabel::b_faster : PairwiseLabel::no_label;
    }
    return PairwiseLabel::no_label;
}

}  // namespace frugal
