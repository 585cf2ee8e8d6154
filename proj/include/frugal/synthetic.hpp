#pragma once

// Seeded synthetic scenarios for tests, demos and the acceptance suite.
//
// Feature x0 in [0, 1) decides the fastest algorithm (floor(x0 * n)); x1 is a
// hardness feature that scales runtimes and the chance that a non-best
// algorithm times out. The remaining features are uniform noise.

#include "frugal/scenario.hpp"

#include <cstddef>
#include <cstdint>
#include <string>

namespace frugal {

struct SyntheticSpec {
    std::size_t n_instances{ 200 };
    std::size_t n_algorithms{ 3 };
    std::size_t n_noise_features{ 2 };
    double cutoff{ 3600.0 };
    /// Expected fraction of all (instance, algorithm) runs that time out.
    double timeout_rate{ 0.3 };
    /// Fraction of noise-feature cells left missing.
    double missing_rate{ 0.0 };
    std::uint64_t seed{ 0 };
    std::string id{ "synthetic" };
};

[[nodiscard]] Scenario make_synthetic_scenario(const SyntheticSpec &spec);

/// floor(x0 * n_algorithms), clamped to the portfolio.
[[nodiscard]] std::size_t synthetic_best_algorithm(double x0, std::size_t n_algorithms) noexcept;

}  // namespace frugal
