#include "frugal/uncertainty.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace frugal {

double least_confidence(const ProbabilityEstimate &p) noexcept {
    return 1.0 - p.confidence();
}

double margin(const ProbabilityEstimate &p) noexcept {
    return std::fabs(p.p_class0 - p.p_class1);
}

double entropy(const ProbabilityEstimate &p) noexcept {
    const auto term = [](double q) { return q > 0.0 ? -q * std::log2(q) : 0.0; };
    return term(p.p_class0) + term(p.p_class1);
}

double uncertainty_score(UncertaintyMeasure measure, const ProbabilityEstimate &p) noexcept {
    switch (measure) {
        case UncertaintyMeasure::least_confidence:
            return least_confidence(p);
        case UncertaintyMeasure::margin:
            return -margin(p);
        case UncertaintyMeasure::entropy:
            return entropy(p);
    }
    return 0.0;
}

std::vector<std::size_t> rank_by_uncertainty(std::span<const ProbabilityEstimate> candidates, UncertaintyMeasure measure) {
    std::vector<double> scores(candidates.size());
    std::transform(candidates.begin(), candidates.end(), scores.begin(), [measure](const ProbabilityEstimate &p) { return uncertainty_score(measure, p); });
    std::vector<std::size_t> order(candidates.size());
    std::iota(order.begin(), order.end(), std::size_t{ 0 });
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return scores[x] > scores[y]; });
    return order;
}

}  // namespace frugal
