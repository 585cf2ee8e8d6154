#include "frugal/synthetic.hpp"

#include "frugal/errors.hpp"
#include "frugal/rng.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>

namespace frugal {

std::size_t synthetic_best_algorithm(double x0, std::size_t n_algorithms) noexcept {
    const auto k = static_cast<std::size_t>(std::floor(std::max(0.0, x0) * static_cast<double>(n_algorithms)));
    return std::min(k, n_algorithms - 1);
}

Scenario make_synthetic_scenario(const SyntheticSpec &spec) {
    if (spec.n_instances == 0 || spec.n_algorithms < 2) {
        throw ConfigError{ "synthetic scenario needs instances and at least two algorithms" };
    }
    if (!(spec.cutoff > 0.0) || spec.timeout_rate < 0.0 || spec.timeout_rate >= 1.0 || spec.missing_rate < 0.0 || spec.missing_rate >= 1.0) {
        throw ConfigError{ "synthetic scenario: cutoff must be positive and rates in [0, 1)" };
    }
    Rng rng{ mix_seed(spec.seed) };
    const std::size_t n_alg = spec.n_algorithms;

    Scenario s;
    s.id = spec.id;
    s.cutoff = spec.cutoff;
    for (std::size_t a = 0; a < n_alg; ++a) {
        s.algorithms.push_back(fmt::format("algo{}", a));
    }
    s.features = { "x0", "hardness" };
    for (std::size_t f = 0; f < spec.n_noise_features; ++f) {
        s.features.push_back(fmt::format("noise{}", f));
    }

    // only non-best runs may time out, so rescale to hit the overall rate
    const double q = spec.timeout_rate * static_cast<double>(n_alg) / static_cast<double>(n_alg - 1);
    // best solver runtimes stay well below the cutoff
    const double fast_ceiling = std::log10(spec.cutoff / 100.0);

    for (std::size_t i = 0; i < spec.n_instances; ++i) {
        s.instances.push_back(fmt::format("inst{:04}", i));
        const double x0 = uniform01(rng);
        const double h = uniform01(rng);
        std::vector<FeatureValue> row{ x0, h };
        for (std::size_t f = 0; f < spec.n_noise_features; ++f) {
            const double v = uniform01(rng);
            const bool drop = spec.missing_rate > 0.0 && uniform01(rng) < spec.missing_rate;
            row.push_back(drop ? FeatureValue{} : FeatureValue{ v });
        }
        s.feature_values.push_back(std::move(row));

        const std::size_t best = synthetic_best_algorithm(x0, n_alg);
        const double best_runtime = std::pow(10.0, fast_ceiling * (0.25 + 0.75 * h) * uniform01(rng)) * (1.0 + h);
        for (std::size_t a = 0; a < n_alg; ++a) {
            RunRecord run{ i, a, best_runtime, RunStatus::ok };
            if (a != best) {
                const double p_timeout = std::min(1.0, q * (0.5 + h));
                if (uniform01(rng) < p_timeout) {
                    run.runtime = spec.cutoff;
                    run.status = RunStatus::timeout;
                } else {
                    run.runtime = std::min(best_runtime * std::pow(10.0, 0.3 + 1.2 * uniform01(rng)), 0.95 * spec.cutoff);
                }
            }
            s.runs.push_back(run);
        }
    }
    s.validate();
    return s;
}

}  // namespace frugal
