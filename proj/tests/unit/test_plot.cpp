#include "fixtures.hpp"

#include "frugal/errors.hpp"
#include "frugal/plot.hpp"

#include <doctest.h>

using namespace frugal;

namespace {

std::size_t count(const std::string &text, const std::string &needle) {
    std::size_t n = 0;
    for (auto pos = text.find(needle); pos != std::string::npos; pos = text.find(needle, pos + 1)) {
        ++n;
    }
    return n;
}

// Flat curves: config k sits at 0.1 * (k + 1) with stderr 0.01.
CurveSummary flat_summary(const std::vector<std::string> &configs) {
    CurveSummary s;
    for (std::size_t k = 0; k < configs.size(); ++k) {
        ConfigCurve c;
        c.config = configs[k];
        for (const double r : ratio_grid()) {
            c.points.push_back({ r, 0.1 * static_cast<double>(k + 1), 0.01, 0.05, 0.0, 5 });
        }
        s.curves.push_back(c);
    }
    return s;
}

std::vector<std::string> eight_ids() {
    std::vector<std::string> ids;
    for (const ExperimentConfig &c : ExperimentConfig::all_frugal()) {
        ids.push_back(c.id());
    }
    return ids;
}

}  // namespace

TEST_SUITE("plot") {
    TEST_CASE("one config: one polyline and one ribbon") {
        const std::string svg = render_svg(flat_summary({ "random" }), {});
        CHECK(svg.find("<svg") != std::string::npos);
        CHECK(count(svg, "<polyline") == 1);
        CHECK(count(svg, "class=\"ribbon\"") == 1);
        CHECK(svg.find(">random<") != std::string::npos);
    }

    TEST_CASE("aggregating by DT over eight configs gives two series") {
        PlotOptions opt;
        opt.aggregate = AggregateBy::dynamic_timeout;
        const auto series = plot_series(flat_summary(eight_ids()), opt);
        REQUIRE(series.size() == 2);
        // DT configs sit at positions 1,3,5,7 -> means 0.2,0.4,0.6,0.8
        const PlotSeries &dt = series[0].label == "DT" ? series[0] : series[1];
        const PlotSeries &no = series[0].label == "DT" ? series[1] : series[0];
        CHECK(dt.label == "DT");
        CHECK(no.label == "no DT");
        CHECK(dt.mean.front() == doctest::Approx(0.5));
        CHECK(no.mean.front() == doctest::Approx(0.4));
        CHECK(dt.stderr_.front() == doctest::Approx(std::sqrt(4 * 0.0001) / 4));
        const std::string svg = render_svg(flat_summary(eight_ids()), opt);
        CHECK(count(svg, "<polyline") == 2);
    }

    TEST_CASE("aggregate modes and their groups") {
        CHECK(parse_aggregate_by("none") == AggregateBy::none);
        CHECK(parse_aggregate_by("selection") == AggregateBy::selection);
        CHECK(parse_aggregate_by("to") == AggregateBy::timeout_predictor);
        CHECK(parse_aggregate_by("dt") == AggregateBy::dynamic_timeout);
        CHECK_THROWS_AS((void)parse_aggregate_by("seed"), ConfigError);
        PlotOptions opt;
        opt.aggregate = AggregateBy::selection;
        auto ids = eight_ids();
        ids.push_back("passive");
        const auto series = plot_series(flat_summary(ids), opt);
        REQUIRE(series.size() == 2);
        // uncertainty configs are the first four
        const PlotSeries &u = series[0].label == "uncertainty" ? series[0] : series[1];
        CHECK(u.mean.front() == doctest::Approx(0.25));
    }

    TEST_CASE("data metric switches the plotted column") {
        PlotOptions opt;
        opt.metric = PlotMetric::data_fraction;
        const auto series = plot_series(flat_summary({ "random" }), opt);
        REQUIRE(series.size() == 1);
        CHECK(series[0].mean.front() == doctest::Approx(0.05));
        CHECK(series[0].ratio.size() == 51);
    }

    TEST_CASE("a filter that matches nothing is an error and writes nothing") {
        fixtures::TempDir dir;
        PlotOptions opt;
        opt.configs = { "nonexistent" };
        CHECK_THROWS_AS((void)render_svg(flat_summary({ "random" }), opt), DataError);
        CHECK_THROWS_AS(emit_plot(flat_summary({ "random" }), dir / "p.svg", opt), DataError);
        CHECK_FALSE(std::filesystem::exists(dir / "p.svg"));
        CHECK(std::filesystem::is_empty(dir.path()));
    }

    TEST_CASE("emit_plot writes the rendered document") {
        fixtures::TempDir dir;
        PlotOptions opt;
        opt.title = "a & b";
        emit_plot(flat_summary({ "random", "uncertainty" }), dir / "p.svg", opt);
        const std::string text = fixtures::read_text(dir / "p.svg");
        CHECK(text == render_svg(flat_summary({ "random", "uncertainty" }), opt));
        CHECK(text.find("a &amp; b") != std::string::npos);
    }
}
