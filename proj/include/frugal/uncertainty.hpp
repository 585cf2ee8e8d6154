#pragma once

// Uncertainty-sampling scores for a binary posterior. Each score is oriented
// so that a larger value means a more uncertain prediction; on two classes
// all three induce the same ordering of candidates.

#include "frugal/forest.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace frugal {

enum class UncertaintyMeasure { least_confidence, margin, entropy };

/// 1 - max posterior.
[[nodiscard]] double least_confidence(const ProbabilityEstimate &p) noexcept;
/// Gap between the two posteriors (smaller = less certain; not negated).
[[nodiscard]] double margin(const ProbabilityEstimate &p) noexcept;
/// Shannon entropy in bits.
[[nodiscard]] double entropy(const ProbabilityEstimate &p) noexcept;

/// Larger = more uncertain, for every measure.
[[nodiscard]] double uncertainty_score(UncertaintyMeasure measure, const ProbabilityEstimate &p) noexcept;

/// Candidate indices, most uncertain first; equal scores keep input order.
[[nodiscard]] std::vector<std::size_t> rank_by_uncertainty(std::span<const ProbabilityEstimate> candidates, UncertaintyMeasure measure);

}  // namespace frugal
