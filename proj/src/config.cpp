#include "frugal/config.hpp"

#include "frugal/errors.hpp"
#include "text_util.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

namespace frugal {

namespace {

std::size_t as_count(std::string_view key, std::string_view value, std::size_t min_value) {
    const auto v = detail::parse_int(value);
    if (!v || *v < static_cast<long long>(min_value)) {
        throw ConfigError{ fmt::format("'{}' expects an integer >= {}, got '{}'", key, min_value, value) };
    }
    return static_cast<std::size_t>(*v);
}

double as_real(std::string_view key, std::string_view value) {
    const auto v = detail::parse_double(value);
    if (!v || !std::isfinite(*v)) {
        throw ConfigError{ fmt::format("'{}' expects a number, got '{}'", key, value) };
    }
    return *v;
}

bool as_bool(std::string_view key, std::string_view value) {
    const std::string v = detail::to_lower(value);
    if (v == "true" || v == "yes" || v == "on" || v == "1") {
        return true;
    }
    if (v == "false" || v == "no" || v == "off" || v == "0") {
        return false;
    }
    throw ConfigError{ fmt::format("'{}' expects true or false, got '{}'", key, value) };
}

SelectionStrategy as_selection(std::string_view value) {
    const std::string v = detail::to_lower(value);
    if (v == "uncertainty") {
        return SelectionStrategy::uncertainty;
    }
    if (v == "random") {
        return SelectionStrategy::random;
    }
    throw ConfigError{ fmt::format("'selection' expects uncertainty or random, got '{}'", value) };
}

std::vector<ExperimentConfig> as_configs(std::string_view value) {
    const std::string v = detail::to_lower(detail::trim(value));
    if (v == "all") {
        return ExperimentConfig::all_frugal();
    }
    std::vector<ExperimentConfig> out;
    for (const std::string_view part : detail::split(v, ',')) {
        const std::string id{ detail::trim(part) };
        if (id.empty()) {
            continue;
        }
        const ExperimentConfig c = ExperimentConfig::parse(id);
        for (const ExperimentConfig &seen : out) {
            if (seen == c) {
                throw ConfigError{ fmt::format("configuration '{}' listed twice", id) };
            }
        }
        out.push_back(c);
    }
    if (out.empty()) {
        throw ConfigError{ "'configs' must name at least one configuration" };
    }
    return out;
}

}  // namespace

const std::vector<std::string_view> &config_keys() {
    static const std::vector<std::string_view> keys{
        "configs",      "selection",   "timeout_predictor", "dynamic_timeout",   "folds",     "seeds",      "seed",
        "batch_frac",   "initial_size", "jobs",             "out",               "with_passive", "n_trees", "max_features",
        "min_samples_split", "max_depth", "bootstrap",      "dt_initial_fraction", "dt_growth", "dt_window", "dt_tolerance",
    };
    return keys;
}

ExperimentSpec RunSettings::to_spec(const Scenario &scenario) const {
    ExperimentSpec spec;
    spec.scenario = &scenario;
    spec.configs = configs;
    if (with_passive) {
        for (const std::string_view id : { "passive", "passive-to" }) {
            const ExperimentConfig c = ExperimentConfig::parse(id);
            if (std::find(spec.configs.begin(), spec.configs.end(), c) == spec.configs.end()) {
                spec.configs.push_back(c);
            }
        }
    }
    spec.n_folds = folds;
    spec.seeds_per_fold = seeds;
    spec.base_seed = seed;
    spec.out_dir = out;
    spec.loop = loop;
    spec.jobs = jobs;
    return spec;
}

void apply_setting(RunSettings &s, std::string_view key, std::string_view raw) {
    const std::string value{ detail::trim(raw) };
    if (key == "configs") {
        s.configs = as_configs(value);
    } else if (key == "selection") {
        // narrows the grid to one selection strategy, keeping every TO/DT combination
        const SelectionStrategy sel = as_selection(value);
        std::vector<ExperimentConfig> kept;
        for (const ExperimentConfig &c : s.configs) {
            if (c.kind == ExperimentConfig::Kind::frugal && c.selection == sel) {
                kept.push_back(c);
            }
        }
        s.configs = std::move(kept);
        s.loop.selection = sel;
    } else if (key == "timeout_predictor" || key == "dynamic_timeout") {
        const bool on = as_bool(key, value);
        std::vector<ExperimentConfig> kept;
        for (const ExperimentConfig &c : s.configs) {
            const bool flag = key == "timeout_predictor" ? c.timeout_predictor : c.dynamic_timeout;
            if (c.kind == ExperimentConfig::Kind::frugal && flag == on) {
                kept.push_back(c);
            }
        }
        s.configs = std::move(kept);
        (key == "timeout_predictor" ? s.loop.timeout_predictor : s.loop.dynamic_timeout) = on;
    } else if (key == "folds") {
        s.folds = as_count(key, value, 1);
        if (s.folds > default_fold_count) {
            throw ConfigError{ fmt::format("'folds' must be at most {}", default_fold_count) };
        }
    } else if (key == "seeds") {
        s.seeds = as_count(key, value, 1);
    } else if (key == "seed") {
        s.seed = as_count(key, value, 0);
    } else if (key == "batch_frac") {
        const double v = as_real(key, value);
        if (!(v > 0.0 && v <= 1.0)) {
            throw ConfigError{ "'batch_frac' must be in (0, 1]" };
        }
        s.loop.batch_fraction = v;
    } else if (key == "initial_size") {
        s.loop.initial_size = as_count(key, value, 1);
    } else if (key == "jobs") {
        s.jobs = as_count(key, value, 1);
    } else if (key == "out") {
        if (value.empty()) {
            throw ConfigError{ "'out' must not be empty" };
        }
        s.out = value;
    } else if (key == "with_passive") {
        s.with_passive = as_bool(key, value);
    } else if (key == "n_trees") {
        s.loop.forest.n_trees = as_count(key, value, 1);
    } else if (key == "max_features") {
        if (detail::iequals(value, "sqrt")) {
            s.loop.forest.max_features.reset();
        } else {
            s.loop.forest.max_features = as_count(key, value, 1);
        }
    } else if (key == "min_samples_split") {
        s.loop.forest.min_samples_split = as_count(key, value, 2);
    } else if (key == "max_depth") {
        s.loop.forest.max_depth = as_count(key, value, 1);
    } else if (key == "bootstrap") {
        s.loop.forest.bootstrap = as_bool(key, value);
    } else if (key == "dt_initial_fraction") {
        const double v = as_real(key, value);
        if (!(v > 0.0 && v <= 1.0)) {
            throw ConfigError{ "'dt_initial_fraction' must be in (0, 1]" };
        }
        s.loop.controller.initial_fraction = v;
    } else if (key == "dt_growth") {
        const double v = as_real(key, value);
        if (!(v > 1.0)) {
            throw ConfigError{ "'dt_growth' must be greater than 1" };
        }
        s.loop.controller.growth_factor = v;
    } else if (key == "dt_window") {
        s.loop.controller.plateau_window = as_count(key, value, 1);
    } else if (key == "dt_tolerance") {
        const double v = as_real(key, value);
        if (v < 0.0) {
            throw ConfigError{ "'dt_tolerance' must be non-negative" };
        }
        s.loop.controller.plateau_tolerance = v;
    } else {
        throw ConfigError{ fmt::format("unknown configuration key '{}'", key) };
    }
    s.explicit_keys.insert(std::string{ key });
}

RunSettings parse_run_settings(std::string_view text, std::string_view source, RunSettings base) {
    std::istringstream in{ std::string{ text } };
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        const std::string trimmed{ detail::trim(line) };
        if (trimmed.empty()) {
            continue;
        }
        const auto eq = trimmed.find('=');
        if (eq == std::string::npos) {
            throw ParseError{ std::string{ source }, line_no, "expected 'key = value'" };
        }
        const std::string key = detail::to_lower(detail::trim(std::string_view{ trimmed }.substr(0, eq)));
        if (base.explicit_keys.contains(key)) {
            throw ParseError{ std::string{ source }, line_no, fmt::format("key '{}' given twice", key) };
        }
        try {
            apply_setting(base, key, std::string_view{ trimmed }.substr(eq + 1));
        } catch (const ConfigError &e) {
            throw ParseError{ std::string{ source }, line_no, e.what() };
        }
    }
    if (base.configs.empty()) {
        throw ConfigError{ fmt::format("{}: the configuration selects no experiment arm", source) };
    }
    return base;
}

RunSettings read_run_settings(const std::filesystem::path &path, RunSettings base) {
    std::ifstream in{ path };
    if (!in) {
        throw DataError{ fmt::format("missing file '{}'", path.string()) };
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_run_settings(ss.str(), path.string(), std::move(base));
}

}  // namespace frugal
