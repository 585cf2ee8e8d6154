#include "frugal/plot.hpp"

#include "frugal/errors.hpp"
#include "text_util.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <map>

namespace frugal {

namespace fs = std::filesystem;

AggregateBy parse_aggregate_by(std::string_view text) {
    const std::string t = detail::to_lower(detail::trim(text));
    if (t == "none") {
        return AggregateBy::none;
    }
    if (t == "selection") {
        return AggregateBy::selection;
    }
    if (t == "to") {
        return AggregateBy::timeout_predictor;
    }
    if (t == "dt") {
        return AggregateBy::dynamic_timeout;
    }
    throw ConfigError{ fmt::format("unknown aggregation '{}' (expected none, selection, to or dt)", text) };
}

namespace {

std::string group_label(AggregateBy by, const ExperimentConfig &c) {
    switch (by) {
    case AggregateBy::selection:
        return c.selection == SelectionStrategy::uncertainty ? "uncertainty" : "random";
    case AggregateBy::timeout_predictor:
        return c.timeout_predictor ? "TO" : "no TO";
    case AggregateBy::dynamic_timeout:
        return c.dynamic_timeout ? "DT" : "no DT";
    case AggregateBy::none:
        break;
    }
    return c.id();
}

}  // namespace

std::vector<PlotSeries> plot_series(const CurveSummary &summary, const PlotOptions &options) {
    const bool use_cost = options.metric == PlotMetric::cost_fraction;
    std::vector<const ConfigCurve *> selected;
    for (const ConfigCurve &curve : summary.curves) {
        if (!options.configs.empty() && std::find(options.configs.begin(), options.configs.end(), curve.config) == options.configs.end()) {
            continue;
        }
        if (curve.points.empty()) {
            continue;
        }
        selected.push_back(&curve);
    }

    std::vector<PlotSeries> out;
    if (options.aggregate == AggregateBy::none) {
        for (const ConfigCurve *curve : selected) {
            PlotSeries s;
            s.label = curve->config;
            for (const CurvePoint &p : curve->points) {
                s.ratio.push_back(p.ratio);
                s.mean.push_back(use_cost ? p.mean_cost_frac : p.mean_data_frac);
                s.stderr_.push_back(use_cost ? p.stderr_cost_frac : p.stderr_data_frac);
            }
            out.push_back(std::move(s));
        }
        return out;
    }

    // group members keyed by label, in order of first appearance
    std::vector<std::string> labels;
    std::map<std::string, std::vector<const ConfigCurve *>> groups;
    for (const ConfigCurve *curve : selected) {
        const ExperimentConfig c = ExperimentConfig::parse(curve->config);
        if (c.kind != ExperimentConfig::Kind::frugal) {
            continue;
        }
        const std::string label = group_label(options.aggregate, c);
        if (!groups.contains(label)) {
            labels.push_back(label);
        }
        groups[label].push_back(curve);
    }
    for (const std::string &label : labels) {
        const auto &members = groups.at(label);
        const std::size_t n_points = members.front()->points.size();
        for (const ConfigCurve *m : members) {
            if (m->points.size() != n_points) {
                throw DataError{ fmt::format("cannot aggregate '{}': curves have different ratio grids", label) };
            }
        }
        PlotSeries s;
        s.label = label;
        const auto k = static_cast<double>(members.size());
        for (std::size_t j = 0; j < n_points; ++j) {
            double mean = 0.0;
            double var = 0.0;
            for (const ConfigCurve *m : members) {
                const CurvePoint &p = m->points[j];
                const double se = use_cost ? p.stderr_cost_frac : p.stderr_data_frac;
                mean += use_cost ? p.mean_cost_frac : p.mean_data_frac;
                var += se * se;
            }
            s.ratio.push_back(members.front()->points[j].ratio);
            s.mean.push_back(mean / k);
            s.stderr_.push_back(std::sqrt(var) / k);
        }
        out.push_back(std::move(s));
    }
    return out;
}

namespace {

constexpr std::array<std::string_view, 10> palette{ "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf" };

std::string escape_xml(std::string_view s) {
    std::string out;
    for (const char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

}  // namespace

std::string render_svg(const CurveSummary &summary, const PlotOptions &options) {
    const std::vector<PlotSeries> series = plot_series(summary, options);
    if (series.empty()) {
        throw DataError{ "nothing to plot: no configurations left after filtering" };
    }
    double x_min = series.front().ratio.front();
    double x_max = x_min;
    for (const PlotSeries &s : series) {
        for (const double r : s.ratio) {
            x_min = std::min(x_min, r);
            x_max = std::max(x_max, r);
        }
    }
    if (x_max <= x_min) {
        x_max = x_min + 1.0;
    }
    const double w = options.width;
    const double h = options.height;
    const double left = 70.0;
    const double right = 170.0;
    const double top = 40.0;
    const double bottom = 60.0;
    const double pw = w - left - right;
    const double ph = h - top - bottom;
    const auto px = [&](double x) { return left + (x - x_min) / (x_max - x_min) * pw; };
    const auto py = [&](double y) { return top + (1.0 - std::clamp(y, 0.0, 1.0)) * ph; };

    std::string svg = fmt::format("<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
                                  "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{}\" height=\"{}\" viewBox=\"0 0 {} {}\" font-family=\"sans-serif\" font-size=\"12\">\n"
                                  "<rect x=\"0\" y=\"0\" width=\"{}\" height=\"{}\" fill=\"white\"/>\n",
                                  options.width, options.height, options.width, options.height, options.width, options.height);
    if (!options.title.empty()) {
        svg += fmt::format("<text x=\"{:.1f}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{}</text>\n", left + pw / 2, escape_xml(options.title));
    }
    // axes and ticks
    svg += fmt::format("<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{2:.1f}\" y2=\"{1:.1f}\" stroke=\"black\"/>\n", left, top + ph, left + pw);
    svg += fmt::format("<line x1=\"{0:.1f}\" y1=\"{1:.1f}\" x2=\"{0:.1f}\" y2=\"{2:.1f}\" stroke=\"black\"/>\n", left, top, top + ph);
    for (int t = 0; t <= 5; ++t) {
        const double x = x_min + (x_max - x_min) * t / 5.0;
        const double y = t / 5.0;
        svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">{:.2f}</text>\n", px(x), top + ph + 18, x);
        svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\">{:.1f}</text>\n", left - 6, py(y) + 4, y);
    }
    svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\">performance ratio (frugal / passive PAR10)</text>\n", left + pw / 2, h - 15);
    const std::string_view y_label = options.metric == PlotMetric::cost_fraction ? "min. cost fraction" : "min. data fraction";
    svg += fmt::format("<text x=\"18\" y=\"{0:.1f}\" text-anchor=\"middle\" transform=\"rotate(-90 18 {0:.1f})\">{1}</text>\n", top + ph / 2, y_label);

    for (std::size_t k = 0; k < series.size(); ++k) {
        const PlotSeries &s = series[k];
        const std::string_view colour = palette[k % palette.size()];
        std::string ribbon = "M";
        for (std::size_t j = 0; j < s.ratio.size(); ++j) {
            ribbon += fmt::format("{}{:.2f},{:.2f}", j == 0 ? "" : " L", px(s.ratio[j]), py(s.mean[j] + s.stderr_[j]));
        }
        for (std::size_t j = s.ratio.size(); j-- > 0;) {
            ribbon += fmt::format(" L{:.2f},{:.2f}", px(s.ratio[j]), py(s.mean[j] - s.stderr_[j]));
        }
        ribbon += " Z";
        svg += fmt::format("<path class=\"ribbon\" d=\"{}\" fill=\"{}\" fill-opacity=\"0.2\" stroke=\"none\"/>\n", ribbon, colour);
        std::string points;
        for (std::size_t j = 0; j < s.ratio.size(); ++j) {
            points += fmt::format("{}{:.2f},{:.2f}", j == 0 ? "" : " ", px(s.ratio[j]), py(s.mean[j]));
        }
        svg += fmt::format("<polyline points=\"{}\" fill=\"none\" stroke=\"{}\" stroke-width=\"2\"/>\n", points, colour);
        const double ly = top + 10 + 20.0 * static_cast<double>(k);
        svg += fmt::format("<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"14\" height=\"4\" fill=\"{}\"/>\n", left + pw + 15, ly - 4, colour);
        svg += fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\">{}</text>\n", left + pw + 35, ly, escape_xml(s.label));
    }
    svg += "</svg>\n";
    return svg;
}

void emit_plot(const CurveSummary &summary, const fs::path &path, const PlotOptions &options) {
    const std::string svg = render_svg(summary, options);
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out{ tmp, std::ios::binary | std::ios::trunc };
        if (!out) {
            throw DataError{ fmt::format("cannot write plot '{}'", path.string()) };
        }
        out << svg;
        if (!out) {
            throw DataError{ fmt::format("failed writing plot '{}'", path.string()) };
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        fs::remove(tmp, ec);
        throw DataError{ fmt::format("cannot write plot '{}'", path.string()) };
    }
}

}  // namespace frugal
