// frugal: command-line front end (stats, run, summarize, plot).
//
// Exit codes: 0 success, 1 usage error, 2 data or parse error.

#include "frugal/config.hpp"
#include "frugal/errors.hpp"
#include "frugal/harness.hpp"
#include "frugal/plot.hpp"
#include "frugal/scenario.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <thread>

namespace fs = std::filesystem;

namespace {

constexpr int exit_usage = 1;
constexpr int exit_data = 2;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

int cmd_stats(const fs::path &dir) {
    const frugal::Scenario s = frugal::load_scenario(dir);
    const frugal::ScenarioStats st = frugal::scenario_stats(s);
    fmt::print("scenario    {}\n", s.id);
    fmt::print("instances   {}\n", st.n_instances);
    fmt::print("algorithms  {}\n", st.n_algorithms);
    fmt::print("features    {}\n", st.n_features);
    fmt::print("total_h     {:.1f}\n", st.total_hours());
    fmt::print("vbs_h       {:.1f}\n", st.vbs_hours());
    fmt::print("sbs_h       {:.1f}\n", st.sbs_hours());
    return 0;
}

struct RunFlags {
    fs::path scenario;
    std::optional<fs::path> config_file;
    std::optional<std::string> configs;
    std::optional<std::string> selection;
    std::optional<bool> timeout_predictor;
    std::optional<bool> dynamic_timeout;
    std::optional<std::size_t> folds;
    std::optional<std::size_t> seeds;
    std::optional<std::uint64_t> seed;
    std::optional<double> batch_frac;
    std::optional<std::size_t> initial_size;
    std::optional<std::size_t> jobs;
    std::optional<std::string> out;
    std::optional<bool> with_passive;
};

void override_key(frugal::RunSettings &settings, std::string_view key, const std::string &value, std::string_view flag) {
    if (settings.explicit_keys.contains(std::string{ key })) {
        fmt::print(stderr, "warning: {} overrides '{}' from the config file\n", flag, key);
    }
    try {
        frugal::apply_setting(settings, key, value);
    } catch (const frugal::ConfigError &e) {
        throw UsageError{ fmt::format("{}: {}", flag, e.what()) };
    }
}

int cmd_run(const RunFlags &f) {
    frugal::RunSettings settings;
    settings.jobs = std::max(1u, std::thread::hardware_concurrency());
    if (f.config_file) {
        settings = frugal::read_run_settings(*f.config_file, settings);
    }
    if (const char *env = std::getenv("FRUGAL_SEED"); env != nullptr && *env != '\0') {
        try {
            frugal::apply_setting(settings, "seed", env);
        } catch (const frugal::ConfigError &e) {
            throw UsageError{ fmt::format("FRUGAL_SEED: {}", e.what()) };
        }
    }

    // Any of --selection / --timeout-predictor / --dynamic-timeout picks a single configuration.
    if (f.selection || f.timeout_predictor || f.dynamic_timeout) {
        if (f.configs) {
            throw UsageError{ "--configs cannot be combined with --selection, --timeout-predictor or --dynamic-timeout" };
        }
        for (const char *key : { "configs", "selection", "timeout_predictor", "dynamic_timeout" }) {
            if (settings.explicit_keys.contains(key)) {
                fmt::print(stderr, "warning: command-line configuration flags override '{}' from the config file\n", key);
                break;
            }
        }
        frugal::ExperimentConfig c;
        if (f.selection) {
            if (*f.selection != "uncertainty" && *f.selection != "random") {
                throw UsageError{ fmt::format("--selection must be uncertainty or random, got '{}'", *f.selection) };
            }
            c.selection = *f.selection == "random" ? frugal::SelectionStrategy::random : frugal::SelectionStrategy::uncertainty;
        }
        c.timeout_predictor = f.timeout_predictor.value_or(false);
        c.dynamic_timeout = f.dynamic_timeout.value_or(false);
        settings.configs = { c };
    } else if (f.configs) {
        override_key(settings, "configs", *f.configs, "--configs");
    }
    if (f.folds) {
        override_key(settings, "folds", std::to_string(*f.folds), "--folds");
    }
    if (f.seeds) {
        override_key(settings, "seeds", std::to_string(*f.seeds), "--seeds");
    }
    if (f.seed) {
        override_key(settings, "seed", std::to_string(*f.seed), "--seed");
    }
    if (f.batch_frac) {
        override_key(settings, "batch_frac", fmt::format("{}", *f.batch_frac), "--batch-frac");
    }
    if (f.initial_size) {
        override_key(settings, "initial_size", std::to_string(*f.initial_size), "--initial-size");
    }
    if (f.jobs) {
        override_key(settings, "jobs", std::to_string(*f.jobs), "--jobs");
    }
    if (f.out) {
        override_key(settings, "out", *f.out, "--out");
    }
    if (f.with_passive) {
        override_key(settings, "with_passive", *f.with_passive ? "true" : "false", "--with-passive");
    }
    if (settings.configs.empty()) {
        throw UsageError{ "no configuration selected" };
    }

    const frugal::Scenario scenario = frugal::load_scenario(f.scenario);
    const frugal::ExperimentSpec spec = settings.to_spec(scenario);
    const std::size_t total = spec.configs.size() * spec.n_folds * spec.seeds_per_fold;
    std::size_t done = 0;
    const auto progress = [&](const frugal::CellResult &r) {
        ++done;
        fmt::print("[{}/{}] {} fold {} seed {}: steps={} perf_ratio={:.4f} cost_frac={:.4f}{}\n", done, total, r.config, r.fold, r.seed, r.steps, r.final_perf_ratio,
                   r.final_cost_frac, r.skipped ? " (existing)" : "");
        std::fflush(stdout);
    };
    frugal::run_grid(spec, progress);
    return 0;
}

int cmd_summarize(const fs::path &log_dir, const std::optional<fs::path> &out) {
    const std::vector<frugal::StepLog> logs = frugal::read_log_tree(log_dir);
    const frugal::CurveSummary summary = frugal::summarize(logs);
    const fs::path target = out.value_or(log_dir / "summary.csv");
    frugal::write_summary_csv(target, summary);
    fmt::print("wrote {} ({} configurations, {} rows)\n", target.string(), summary.curves.size(), summary.curves.size() * frugal::ratio_grid().size());
    return 0;
}

int cmd_plot(const fs::path &summary_file, const fs::path &out, const std::string &aggregate, const std::string &metric, const std::optional<std::string> &configs,
             const std::string &title) {
    frugal::PlotOptions options;
    try {
        options.aggregate = frugal::parse_aggregate_by(aggregate);
    } catch (const frugal::ConfigError &e) {
        throw UsageError{ e.what() };
    }
    if (metric == "cost") {
        options.metric = frugal::PlotMetric::cost_fraction;
    } else if (metric == "data") {
        options.metric = frugal::PlotMetric::data_fraction;
    } else {
        throw UsageError{ fmt::format("--metric must be cost or data, got '{}'", metric) };
    }
    if (configs) {
        std::string item;
        for (const char c : *configs + ",") {
            if (c == ',') {
                if (!item.empty()) {
                    options.configs.push_back(item);
                }
                item.clear();
            } else if (c != ' ') {
                item += c;
            }
        }
    }
    options.title = title;
    const frugal::CurveSummary summary = frugal::read_summary_csv(summary_file);
    frugal::emit_plot(summary, out, options);
    fmt::print("wrote {} ({} series)\n", out.string(), frugal::plot_series(summary, options).size());
    return 0;
}

}  // namespace

int main(int argc, char **argv) {
    CLI::App app{ "Cost-aware algorithm-selection experiments on ASLib scenarios" };
    app.require_subcommand(1);

    auto *stats = app.add_subcommand("stats", "Descriptive statistics of a scenario");
    fs::path stats_dir;
    stats->add_option("scenario", stats_dir, "ASLib scenario directory")->required();

    auto *run = app.add_subcommand("run", "Run the experiment grid and write step logs");
    RunFlags rf;
    run->add_option("scenario", rf.scenario, "ASLib scenario directory")->required();
    run->add_option("--config", rf.config_file, "key = value configuration file");
    run->add_option("--configs", rf.configs, "comma-separated configuration ids, or 'all'");
    run->add_option("--selection", rf.selection, "uncertainty or random (runs a single configuration)");
    run->add_flag("--timeout-predictor", rf.timeout_predictor, "enable the timeout predictor");
    run->add_flag("--dynamic-timeout", rf.dynamic_timeout, "enable the dynamic timeout");
    run->add_option("--folds", rf.folds, "number of folds to run (1-10)");
    run->add_option("--seeds", rf.seeds, "seeds per fold");
    run->add_option("--seed", rf.seed, "base seed");
    run->add_option("--batch-frac", rf.batch_frac, "queries per step as a fraction of training instances");
    run->add_option("--initial-size", rf.initial_size, "instances in the initial fully-run set");
    run->add_option("--jobs", rf.jobs, "worker threads (default: available parallelism)");
    run->add_option("--out", rf.out, "output directory");
    run->add_flag("--with-passive", rf.with_passive, "also log the passive and passive-to baselines");

    auto *summ = app.add_subcommand("summarize", "Aggregate step logs into a summary CSV");
    fs::path log_dir;
    std::optional<fs::path> summ_out;
    summ->add_option("logs", log_dir, "directory written by 'run'")->required();
    summ->add_option("-o,--out", summ_out, "summary CSV (default: <logs>/summary.csv)");

    auto *plot = app.add_subcommand("plot", "Render a summary CSV as an SVG plot");
    fs::path summary_file;
    fs::path plot_out{ "plot.svg" };
    std::string aggregate{ "none" };
    std::string metric{ "cost" };
    std::optional<std::string> plot_configs;
    std::string title;
    plot->add_option("summary", summary_file, "summary CSV written by 'summarize'")->required();
    plot->add_option("-o,--out", plot_out, "output SVG file")->capture_default_str();
    plot->add_option("--aggregate-by", aggregate, "none, selection, to or dt")->capture_default_str();
    plot->add_option("--metric", metric, "cost or data fraction on the vertical axis")->capture_default_str();
    plot->add_option("--configs", plot_configs, "comma-separated configuration ids to include");
    plot->add_option("--title", title, "plot title");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_usage;
    }

    try {
        if (stats->parsed()) {
            return cmd_stats(stats_dir);
        }
        if (run->parsed()) {
            return cmd_run(rf);
        }
        if (summ->parsed()) {
            return cmd_summarize(log_dir, summ_out);
        }
        if (plot->parsed()) {
            return cmd_plot(summary_file, plot_out, aggregate, metric, plot_configs, title);
        }
    } catch (const UsageError &e) {
        fmt::print(stderr, "error: {}\n\n", e.what());
        std::cerr << app.help();
        return exit_usage;
    } catch (const frugal::ConfigError &e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return exit_usage;
    } catch (const frugal::Error &e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return exit_data;
    } catch (const std::exception &e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return exit_data;
    }
    return exit_usage;
}
