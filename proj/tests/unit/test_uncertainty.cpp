#include "frugal/rng.hpp"
#include "frugal/uncertainty.hpp"

#include <doctest.h>

#include <cmath>

using namespace frugal;

TEST_SUITE("uncertainty") {
    TEST_CASE("scores on known posteriors") {
        const ProbabilityEstimate p{ 0.8, 0.2 };
        CHECK(least_confidence(p) == doctest::Approx(0.2));
        CHECK(margin(p) == doctest::Approx(0.6));
        CHECK(entropy(p) == doctest::Approx(-(0.8 * std::log2(0.8) + 0.2 * std::log2(0.2))));
        CHECK(entropy({ 0.5, 0.5 }) == 1.0);
        CHECK(entropy({ 1.0, 0.0 }) == 0.0);
        CHECK(least_confidence({ 0.5, 0.5 }) == 0.5);
    }

    TEST_CASE("orientation: larger score means less certain") {
        const ProbabilityEstimate sure{ 0.95, 0.05 };
        const ProbabilityEstimate unsure{ 0.45, 0.55 };
        for (const auto m : { UncertaintyMeasure::least_confidence, UncertaintyMeasure::margin, UncertaintyMeasure::entropy }) {
            CHECK(uncertainty_score(m, unsure) > uncertainty_score(m, sure));
        }
    }

    TEST_CASE("ties keep input order") {
        const std::vector<ProbabilityEstimate> c{ { 0.7, 0.3 }, { 0.3, 0.7 }, { 0.5, 0.5 } };
        CHECK(rank_by_uncertainty(c, UncertaintyMeasure::least_confidence) == std::vector<std::size_t>{ 2, 0, 1 });
    }

    TEST_CASE("property: the three measures order binary candidates identically up to ties") {
        Rng rng{ 1 };
        const auto sign = [](double d) { return std::fabs(d) <= 1e-12 ? 0 : (d > 0 ? 1 : -1); };
        for (int set = 0; set < 200; ++set) {
            std::vector<ProbabilityEstimate> c;
            const std::size_t n = 1 + uniform_index(rng, 30);
            for (std::size_t k = 0; k < n; ++k) {
                // vote fractions of a 100-tree forest, so exact ties occur
                const double p1 = static_cast<double>(uniform_index(rng, 101)) / 100.0;
                c.push_back({ 1.0 - p1, p1 });
            }
            for (std::size_t x = 0; x < n; ++x) {
                for (std::size_t y = 0; y < n; ++y) {
                    const int lc = sign(uncertainty_score(UncertaintyMeasure::least_confidence, c[x]) - uncertainty_score(UncertaintyMeasure::least_confidence, c[y]));
                    CHECK(sign(uncertainty_score(UncertaintyMeasure::margin, c[x]) - uncertainty_score(UncertaintyMeasure::margin, c[y])) == lc);
                    CHECK(sign(uncertainty_score(UncertaintyMeasure::entropy, c[x]) - uncertainty_score(UncertaintyMeasure::entropy, c[y])) == lc);
                }
            }
        }
    }
}
