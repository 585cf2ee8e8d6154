#pragma once

// SVG line+ribbon plots of curve summaries: performance ratio on the
// horizontal axis, minimum cost (or data) fraction on the vertical axis.

#include "frugal/harness.hpp"

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace frugal {

enum class AggregateBy { none, selection, timeout_predictor, dynamic_timeout };

/// "none", "selection", "to", "dt"; throws ConfigError otherwise.
[[nodiscard]] AggregateBy parse_aggregate_by(std::string_view text);

enum class PlotMetric { cost_fraction, data_fraction };

struct PlotOptions {
    AggregateBy aggregate{ AggregateBy::none };
    PlotMetric metric{ PlotMetric::cost_fraction };
    /// Restrict to these config ids (empty: all).
    std::vector<std::string> configs;
    std::string title;
    int width{ 720 };
    int height{ 480 };
};

struct PlotSeries {
    std::string label;
    std::vector<double> ratio;
    std::vector<double> mean;
    std::vector<double> stderr_;
};

/// Series after filtering and aggregation. Aggregated groups average the
/// member means; their standard error is sqrt(sum se^2) / k. Passive
/// baselines only appear when not aggregating.
[[nodiscard]] std::vector<PlotSeries> plot_series(const CurveSummary &summary, const PlotOptions &options);

/// Throws DataError when no series remain.
[[nodiscard]] std::string render_svg(const CurveSummary &summary, const PlotOptions &options);

/// Renders and writes atomically; nothing is written on error.
void emit_plot(const CurveSummary &summary, const std::filesystem::path &path, const PlotOptions &options = {});

}  // namespace frugal
