#include "frugal/scenario.hpp"

#include "frugal/arff.hpp"
#include "frugal/errors.hpp"
#include "text_util.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <unordered_map>

namespace frugal {

namespace fs = std::filesystem;

std::string_view to_string(RunStatus status) noexcept {
    switch (status) {
        case RunStatus::ok:
            return "ok";
        case RunStatus::timeout:
            return "timeout";
        case RunStatus::other_failure:
            return "other_failure";
    }
    return "other_failure";
}

double capped_runtime(const RunRecord &run, double cutoff) noexcept {
    return std::min(run.runtime, cutoff);
}

void Scenario::validate() const {
    if (algorithms.size() < 2) {
        throw DataError{ fmt::format("scenario '{}': a portfolio needs at least 2 algorithms, found {}", id, algorithms.size()) };
    }
    if (!(cutoff > 0.0) || !std::isfinite(cutoff)) {
        throw DataError{ fmt::format("scenario '{}': cutoff must be a positive number of seconds", id) };
    }
    if (feature_values.size() != instances.size()) {
        throw DataError{ fmt::format("scenario '{}': feature matrix has {} rows for {} instances", id, feature_values.size(), instances.size()) };
    }
    for (std::size_t i = 0; i < feature_values.size(); ++i) {
        if (feature_values[i].size() != features.size()) {
            throw DataError{ fmt::format("scenario '{}': instance '{}' has {} feature values, expected {}", id, instances[i], feature_values[i].size(), features.size()) };
        }
    }
    if (runs.size() != instances.size() * algorithms.size()) {
        throw DataError{ fmt::format("scenario '{}': runs mapping is not total ({} of {} cells)", id, runs.size(), instances.size() * algorithms.size()) };
    }
    for (std::size_t i = 0; i < instances.size(); ++i) {
        for (std::size_t a = 0; a < algorithms.size(); ++a) {
            const RunRecord &r = run(i, a);
            if (r.instance != i || r.algorithm != a) {
                throw DataError{ fmt::format("scenario '{}': runs table is not in instance-major order", id) };
            }
            if (!(r.runtime >= 0.0) || !std::isfinite(r.runtime)) {
                throw DataError{ fmt::format("scenario '{}': run ({}, {}) has invalid runtime", id, instances[i], algorithms[a]) };
            }
            if (r.solved() && r.runtime > cutoff) {
                throw DataError{ fmt::format("scenario '{}': solved run ({}, {}) exceeds the cutoff", id, instances[i], algorithms[a]) };
            }
        }
    }
    if (feature_costs && feature_costs->size() != instances.size()) {
        throw DataError{ fmt::format("scenario '{}': feature costs do not cover every instance", id) };
    }
}

namespace {

std::string read_text_file(const fs::path &path) {
    std::ifstream in{ path, std::ios::binary };
    if (!in) {
        throw DataError{ fmt::format("cannot open file '{}'", path.string()) };
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string strip_yaml_scalar(std::string_view value) {
    value = detail::trim(value);
    if (value.size() >= 2 && value.front() == '[' && value.back() == ']') {
        value = detail::trim(value.substr(1, value.size() - 2));
        // first element of an inline list
        value = detail::trim(value.substr(0, value.find(',')));
    }
    if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front()) {
        value = value.substr(1, value.size() - 2);
    }
    return std::string{ value };
}

// Line-oriented "key: value". A key with an empty value takes the first
// "- item" line that follows it, which covers the YAML list form ASLib uses.
std::map<std::string, std::string> parse_description(const std::string &text, const std::string &source) {
    std::map<std::string, std::string> entries;
    std::istringstream in{ text };
    std::string raw;
    std::string pending_key;
    std::size_t line_no = 0;
    while (std::getline(in, raw)) {
        ++line_no;
        const std::string_view trimmed = detail::trim(raw);
        if (trimmed.empty() || trimmed.front() == '#') {
            continue;
        }
        const bool indented = std::isspace(static_cast<unsigned char>(raw.front())) != 0;
        if (trimmed.front() == '-' || indented) {
            if (!pending_key.empty() && trimmed.front() == '-') {
                entries[pending_key] = strip_yaml_scalar(trimmed.substr(1));
                pending_key.clear();
            }
            continue;
        }
        const std::size_t colon = trimmed.find(':');
        if (colon == std::string_view::npos) {
            throw ParseError{ source, line_no, "expected 'key: value'" };
        }
        const std::string key = detail::to_lower(detail::trim(trimmed.substr(0, colon)));
        const std::string value = strip_yaml_scalar(trimmed.substr(colon + 1));
        entries[key] = value;
        pending_key = value.empty() ? key : std::string{};
    }
    return entries;
}

std::string cell_text(const ArffValue &cell) {
    if (const auto *s = std::get_if<std::string>(&cell)) {
        return *s;
    }
    if (const auto *d = std::get_if<double>(&cell)) {
        return fmt::format("{}", *d);
    }
    return "?";
}

std::size_t require_column(const ArffRelation &relation, std::string_view name, const fs::path &path) {
    const auto idx = relation.find_attribute(name);
    if (!idx) {
        throw DataError{ fmt::format("'{}': missing required column '{}'", path.string(), name) };
    }
    return *idx;
}

bool is_first_repetition(const ArffValue &cell) {
    if (is_missing(cell)) {
        return true;
    }
    if (const auto *d = std::get_if<double>(&cell)) {
        return *d == 1.0;
    }
    return detail::parse_double(std::get<std::string>(cell)).value_or(0.0) == 1.0;
}

fs::path require_file(const fs::path &directory, std::string_view name) {
    fs::path path = directory / name;
    if (!fs::is_regular_file(path)) {
        throw DataError{ fmt::format("missing file '{}'", path.string()) };
    }
    return path;
}

}  // namespace

Scenario load_scenario(const fs::path &directory) {
    if (!fs::is_directory(directory)) {
        throw DataError{ fmt::format("scenario directory '{}' does not exist", directory.string()) };
    }
    const fs::path description_path = require_file(directory, "description.txt");
    const fs::path runs_path = require_file(directory, "algorithm_runs.arff");
    const fs::path features_path = require_file(directory, "feature_values.arff");

    Scenario scenario;
    const auto description = parse_description(read_text_file(description_path), description_path.string());
    const auto lookup = [&](const std::string &key) -> const std::string & {
        const auto it = description.find(key);
        if (it == description.end()) {
            throw DataError{ fmt::format("'{}': missing required key '{}'", description_path.string(), key) };
        }
        return it->second;
    };
    scenario.id = lookup("scenario_id");
    if (!detail::iequals(lookup("performance_type"), "runtime")) {
        throw DataError{ fmt::format("scenario '{}': performance_type is '{}', only runtime scenarios are supported", scenario.id, lookup("performance_type")) };
    }
    if (!detail::iequals(lookup("maximize"), "false")) {
        throw DataError{ fmt::format("scenario '{}': maximize must be false for runtime scenarios", scenario.id) };
    }
    const auto cutoff = detail::parse_double(lookup("algorithm_cutoff_time"));
    if (!cutoff || !(*cutoff > 0.0) || !std::isfinite(*cutoff)) {
        throw DataError{ fmt::format("scenario '{}': algorithm_cutoff_time must be a positive number", scenario.id) };
    }
    scenario.cutoff = *cutoff;

    // features first: they fix the instance order
    const ArffRelation feature_table = read_arff_file(features_path);
    const std::size_t f_instance = require_column(feature_table, "instance_id", features_path);
    const std::size_t f_repetition = require_column(feature_table, "repetition", features_path);
    std::vector<std::size_t> feature_columns;
    for (std::size_t c = 0; c < feature_table.attributes.size(); ++c) {
        if (c == f_instance || c == f_repetition) {
            continue;
        }
        if (feature_table.attributes[c].kind != AttributeKind::numeric) {
            throw DataError{ fmt::format("'{}': feature '{}' is not numeric", features_path.string(), feature_table.attributes[c].name) };
        }
        feature_columns.push_back(c);
        scenario.features.push_back(feature_table.attributes[c].name);
    }
    std::unordered_map<std::string, std::size_t> instance_index;
    for (const auto &row : feature_table.rows) {
        if (!is_first_repetition(row[f_repetition])) {
            continue;
        }
        std::string name = cell_text(row[f_instance]);
        if (!instance_index.emplace(name, scenario.instances.size()).second) {
            throw DataError{ fmt::format("'{}': duplicate instance '{}'", features_path.string(), name) };
        }
        std::vector<FeatureValue> values;
        values.reserve(feature_columns.size());
        for (const std::size_t c : feature_columns) {
            const ArffValue &cell = row[c];
            values.push_back(is_missing(cell) ? FeatureValue{} : FeatureValue{ std::get<double>(cell) });
        }
        scenario.instances.push_back(std::move(name));
        scenario.feature_values.push_back(std::move(values));
    }

    const ArffRelation run_table = read_arff_file(runs_path);
    const std::size_t r_instance = require_column(run_table, "instance_id", runs_path);
    const std::size_t r_repetition = require_column(run_table, "repetition", runs_path);
    const std::size_t r_algorithm = require_column(run_table, "algorithm", runs_path);
    const std::size_t r_runtime = require_column(run_table, "runtime", runs_path);
    const std::size_t r_status = require_column(run_table, "runstatus", runs_path);

    struct PendingRun {
        std::size_t instance;
        std::string algorithm;
        double runtime;
        RunStatus status;
    };
    std::vector<PendingRun> pending;
    std::unordered_map<std::string, std::size_t> algorithm_index;
    for (const auto &row : run_table.rows) {
        if (!is_first_repetition(row[r_repetition])) {
            continue;
        }
        const std::string instance = cell_text(row[r_instance]);
        const auto it = instance_index.find(instance);
        if (it == instance_index.end()) {
            throw DataError{ fmt::format("'{}': unknown instance '{}'", runs_path.string(), instance) };
        }
        std::string algorithm = cell_text(row[r_algorithm]);
        if (algorithm_index.emplace(algorithm, scenario.algorithms.size()).second) {
            scenario.algorithms.push_back(algorithm);
        }
        const bool ok = !is_missing(row[r_status]) && detail::iequals(cell_text(row[r_status]), "ok");
        double runtime = 0.0;
        if (is_missing(row[r_runtime])) {
            if (ok) {
                throw DataError{ fmt::format("'{}': solved run ({}, {}) has no runtime", runs_path.string(), instance, algorithm) };
            }
            runtime = scenario.cutoff;
        } else {
            const auto *value = std::get_if<double>(&row[r_runtime]);
            if (value == nullptr) {
                throw DataError{ fmt::format("'{}': runtime column is not numeric", runs_path.string()) };
            }
            runtime = *value;
        }
        if (!(runtime >= 0.0) || !std::isfinite(runtime)) {
            throw DataError{ fmt::format("'{}': run ({}, {}) has invalid runtime {}", runs_path.string(), instance, algorithm, runtime) };
        }
        RunStatus status = RunStatus::ok;
        if (!ok || runtime > scenario.cutoff) {
            status = runtime >= scenario.cutoff ? RunStatus::timeout : RunStatus::other_failure;
        }
        pending.push_back({ it->second, std::move(algorithm), runtime, status });
    }
    if (scenario.algorithms.size() < 2) {
        throw DataError{ fmt::format("'{}': a portfolio needs at least 2 algorithms", runs_path.string()) };
    }

    const std::size_t n_alg = scenario.algorithms.size();
    std::vector<std::optional<RunRecord>> cells(scenario.instances.size() * n_alg);
    for (const PendingRun &p : pending) {
        const std::size_t a = algorithm_index.at(p.algorithm);
        auto &cell = cells[p.instance * n_alg + a];
        if (cell) {
            throw DataError{ fmt::format("'{}': duplicate run for ({}, {})", runs_path.string(), scenario.instances[p.instance], p.algorithm) };
        }
        cell = RunRecord{ p.instance, a, p.runtime, p.status };
    }
    scenario.runs.reserve(cells.size());
    for (std::size_t k = 0; k < cells.size(); ++k) {
        if (!cells[k]) {
            throw DataError{ fmt::format("'{}': runs mapping is not total, no run for ({}, {})", runs_path.string(), scenario.instances[k / n_alg], scenario.algorithms[k % n_alg]) };
        }
        scenario.runs.push_back(*cells[k]);
    }

    const fs::path costs_path = directory / "feature_costs.arff";
    if (fs::is_regular_file(costs_path)) {
        const ArffRelation cost_table = read_arff_file(costs_path);
        const std::size_t c_instance = require_column(cost_table, "instance_id", costs_path);
        const std::size_t c_repetition = require_column(cost_table, "repetition", costs_path);
        std::vector<double> costs(scenario.instances.size(), 0.0);
        for (const auto &row : cost_table.rows) {
            if (!is_first_repetition(row[c_repetition])) {
                continue;
            }
            const std::string instance = cell_text(row[c_instance]);
            const auto it = instance_index.find(instance);
            if (it == instance_index.end()) {
                throw DataError{ fmt::format("'{}': unknown instance '{}'", costs_path.string(), instance) };
            }
            for (std::size_t c = 0; c < row.size(); ++c) {
                if (c == c_instance || c == c_repetition) {
                    continue;
                }
                if (const auto *d = std::get_if<double>(&row[c])) {
                    costs[it->second] += *d;
                }
            }
        }
        scenario.feature_costs = std::move(costs);
    }

    scenario.validate();
    return scenario;
}

void write_scenario(const Scenario &scenario, const fs::path &directory) {
    scenario.validate();
    fs::create_directories(directory);
    {
        std::ofstream out{ directory / "description.txt", std::ios::binary };
        if (!out) {
            throw DataError{ fmt::format("cannot write '{}'", (directory / "description.txt").string()) };
        }
        out << "scenario_id: " << scenario.id << '\n'
            << "performance_measures: runtime\n"
            << "maximize: false\n"
            << "performance_type: runtime\n"
            << "algorithm_cutoff_time: " << fmt::format("{}", scenario.cutoff) << '\n'
            << "algorithm_cutoff_memory: ?\n"
            << "features_cutoff_time: ?\n";
    }

    ArffRelation runs;
    runs.name = scenario.id + "_algorithm_runs";
    runs.attributes = {
        { "instance_id", AttributeKind::string, {} },
        { "repetition", AttributeKind::numeric, {} },
        { "algorithm", AttributeKind::string, {} },
        { "runtime", AttributeKind::numeric, {} },
        { "runstatus", AttributeKind::nominal, { "ok", "timeout", "crash" } },
    };
    for (const RunRecord &r : scenario.runs) {
        const char *status = r.status == RunStatus::ok ? "ok" : (r.status == RunStatus::timeout ? "timeout" : "crash");
        runs.rows.push_back({ scenario.instances[r.instance], 1.0, scenario.algorithms[r.algorithm], r.runtime, std::string{ status } });
    }
    write_arff_file(runs, directory / "algorithm_runs.arff");

    ArffRelation features;
    features.name = scenario.id + "_feature_values";
    features.attributes = { { "instance_id", AttributeKind::string, {} }, { "repetition", AttributeKind::numeric, {} } };
    for (const std::string &name : scenario.features) {
        features.attributes.push_back({ name, AttributeKind::numeric, {} });
    }
    for (std::size_t i = 0; i < scenario.n_instances(); ++i) {
        std::vector<ArffValue> row{ scenario.instances[i], 1.0 };
        for (const FeatureValue &v : scenario.feature_values[i]) {
            row.push_back(v ? ArffValue{ *v } : ArffValue{ Missing{} });
        }
        features.rows.push_back(std::move(row));
    }
    write_arff_file(features, directory / "feature_values.arff");

    if (scenario.feature_costs) {
        ArffRelation costs;
        costs.name = scenario.id + "_feature_costs";
        costs.attributes = { { "instance_id", AttributeKind::string, {} }, { "repetition", AttributeKind::numeric, {} }, { "all_features", AttributeKind::numeric, {} } };
        for (std::size_t i = 0; i < scenario.n_instances(); ++i) {
            costs.rows.push_back({ scenario.instances[i], 1.0, (*scenario.feature_costs)[i] });
        }
        write_arff_file(costs, directory / "feature_costs.arff");
    }
}

ScenarioStats scenario_stats(const Scenario &scenario) {
    ScenarioStats stats;
    stats.n_instances = scenario.n_instances();
    stats.n_algorithms = scenario.n_algorithms();
    stats.n_features = scenario.n_features();
    std::vector<double> column_sums(scenario.n_algorithms(), 0.0);
    for (std::size_t i = 0; i < scenario.n_instances(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t a = 0; a < scenario.n_algorithms(); ++a) {
            const double t = capped_runtime(scenario.run(i, a), scenario.cutoff);
            stats.total_time_s += t;
            column_sums[a] += t;
            best = std::min(best, t);
        }
        stats.vbs_time_s += best;
    }
    stats.sbs_time_s = *std::min_element(column_sums.begin(), column_sums.end());
    return stats;
}

}  // namespace frugal
