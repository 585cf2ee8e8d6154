#include "frugal/harness.hpp"

#include "frugal/errors.hpp"
#include "frugal/rng.hpp"
#include "text_util.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>
#include <tuple>

namespace frugal {

namespace fs = std::filesystem;

// --- configuration ids ------------------------------------------------------

std::string ExperimentConfig::id() const {
    std::string out = kind == Kind::passive ? "passive" : (selection == SelectionStrategy::uncertainty ? "uncertainty" : "random");
    if (timeout_predictor) {
        out += "-to";
    }
    if (dynamic_timeout && kind == Kind::frugal) {
        out += "-dt";
    }
    return out;
}

ExperimentConfig ExperimentConfig::parse(std::string_view id) {
    const std::string lowered = detail::to_lower(detail::trim(id));
    for (const ExperimentConfig &c : all_frugal()) {
        if (c.id() == lowered) {
            return c;
        }
    }
    if (lowered == "passive") {
        return { Kind::passive, SelectionStrategy::uncertainty, false, false };
    }
    if (lowered == "passive-to") {
        return { Kind::passive, SelectionStrategy::uncertainty, true, false };
    }
    throw ConfigError{ fmt::format("unknown configuration '{}'", id) };
}

std::vector<ExperimentConfig> ExperimentConfig::all_frugal() {
    std::vector<ExperimentConfig> out;
    for (const SelectionStrategy s : { SelectionStrategy::uncertainty, SelectionStrategy::random }) {
        for (const bool to : { false, true }) {
            for (const bool dt : { false, true }) {
                out.push_back({ Kind::frugal, s, to, dt });
            }
        }
    }
    return out;
}

std::size_t canonical_config_rank(std::string_view id) {
    std::vector<ExperimentConfig> order = ExperimentConfig::all_frugal();
    order.push_back(ExperimentConfig::parse("passive"));
    order.push_back(ExperimentConfig::parse("passive-to"));
    for (std::size_t k = 0; k < order.size(); ++k) {
        if (order[k].id() == id) {
            return k;
        }
    }
    return order.size();
}

// --- passive baseline -------------------------------------------------------

double passive_labelling_cost(const Scenario &scenario, std::span<const std::size_t> instances) {
    double total = 0.0;
    for (const std::size_t i : instances) {
        for (std::size_t a = 0; a < scenario.n_algorithms(); ++a) {
            total += capped_runtime(scenario.run(i, a), scenario.cutoff);
        }
    }
    return total;
}

PassiveResult run_passive_baseline(const Scenario &scenario, const SplitPlan &plan, std::size_t fold, std::uint64_t run_seed, bool timeout_models, const ForestConfig &forest) {
    const FoldSplit &split = plan.folds.at(fold);
    const ImputerModel imputer = fit_imputer(scenario, split.train);
    const DenseMatrix features = impute_all(scenario, imputer);
    RunOracle oracle{ scenario };
    CostLedger ledger;
    for (const std::size_t i : split.train) {
        for (std::size_t a = 0; a < scenario.n_algorithms(); ++a) {
            oracle.execute(i, a, scenario.cutoff, 0, ledger);
        }
    }
    const EnsembleTrainingInput input{ oracle.cache(), split.train, features, imputer };
    const SelectorEnsemble ensemble = train_ensemble(input, ensemble_forest_config(forest, run_seed), timeout_models, scenario.cutoff);

    PassiveResult result;
    result.test_par10 = evaluate_selector(ensemble, plan.test, scenario, features);
    result.labelling_cost_s = passive_labelling_cost(scenario, split.train);
    result.labelled_cells = split.train.size() * scenario.n_algorithms();
    return result;
}

// --- step logs ----------------------------------------------------------------

std::string_view step_log_header() noexcept {
    return "config,scenario,fold,seed,step,timeout_s,labels,cost_s,cost_frac,data_frac,test_par10_s,perf_ratio";
}

double performance_ratio(double frugal_par10, double passive_par10) noexcept {
    if (passive_par10 <= 0.0) {
        return frugal_par10 <= 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    }
    return frugal_par10 / passive_par10;
}

std::vector<StepLog> make_step_logs(const ExperimentConfig &config, const std::string &scenario_id, std::size_t fold, std::uint64_t seed, std::span<const LoopStep> steps,
                                    const PassiveResult &reference) {
    std::vector<StepLog> out;
    out.reserve(steps.size());
    for (const LoopStep &s : steps) {
        StepLog log;
        log.config = config.id();
        log.scenario = scenario_id;
        log.fold = fold;
        log.seed = seed;
        log.step = s.step;
        log.timeout_s = s.timeout_s;
        log.labels = s.requests;
        log.cost_s = s.cost_s;
        log.cost_frac = reference.labelling_cost_s > 0.0 ? s.cost_s / reference.labelling_cost_s : 0.0;
        log.data_frac = s.total_cells > 0 ? static_cast<double>(s.observed_cells) / static_cast<double>(s.total_cells) : 0.0;
        log.test_par10_s = s.test_par10;
        log.perf_ratio = performance_ratio(s.test_par10, reference.test_par10);
        out.push_back(std::move(log));
    }
    return out;
}

namespace {

// Shortest round-trip representation keeps files byte-stable and lossless.
std::string num(double v) {
    return fmt::format("{}", v);
}

std::string csv_field(const std::string &s) {
    if (s.find_first_of(",\"\n") == std::string::npos) {
        return s;
    }
    std::string out{ "\"" };
    for (const char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
    return out;
}

std::vector<std::string> split_csv_line(std::string_view line) {
    std::vector<std::string> fields;
    std::string current;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                current += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                current += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(current));
            current.clear();
        } else {
            current += c;
        }
    }
    fields.push_back(std::move(current));
    return fields;
}

std::string read_file(const fs::path &path) {
    std::ifstream in{ path, std::ios::binary };
    if (!in) {
        throw DataError{ fmt::format("cannot open file '{}'", path.string()) };
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Writes through a temporary file so a complete file is never half-written.
void write_file_atomically(const fs::path &path, const std::string &content) {
    if (path.has_parent_path()) {
        std::error_code ec;
        fs::create_directories(path.parent_path(), ec);
        if (ec) {
            throw DataError{ fmt::format("cannot create directory '{}': {}", path.parent_path().string(), ec.message()) };
        }
    }
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out{ tmp, std::ios::binary | std::ios::trunc };
        if (!out) {
            throw DataError{ fmt::format("cannot write file '{}'", path.string()) };
        }
        out << content;
        if (!out) {
            throw DataError{ fmt::format("failed writing '{}'", path.string()) };
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        throw DataError{ fmt::format("cannot move '{}' into place: {}", path.string(), ec.message()) };
    }
}

template <typename T>
T field_as(const std::string &text, std::string_view source, std::size_t line_no, std::string_view column) {
    if constexpr (std::is_same_v<T, double>) {
        if (detail::iequals(text, "inf")) {
            return std::numeric_limits<double>::infinity();
        }
        if (const auto v = detail::parse_double(text)) {
            return *v;
        }
    } else {
        if (const auto v = detail::parse_int(text); v && *v >= 0) {
            return static_cast<T>(*v);
        }
    }
    throw ParseError{ std::string{ source }, line_no, fmt::format("invalid value '{}' in column '{}'", text, column) };
}

}  // namespace

std::string format_step_logs(std::span<const StepLog> logs) {
    std::string out{ step_log_header() };
    out += '\n';
    for (const StepLog &l : logs) {
        out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{}\n", csv_field(l.config), csv_field(l.scenario), l.fold, l.seed, l.step, num(l.timeout_s), l.labels, num(l.cost_s),
                           num(l.cost_frac), num(l.data_frac), num(l.test_par10_s), num(l.perf_ratio));
    }
    return out;
}

void write_step_logs(const fs::path &path, std::span<const StepLog> logs) {
    write_file_atomically(path, format_step_logs(logs));
}

std::vector<StepLog> parse_step_logs(std::string_view text, std::string_view source) {
    std::vector<StepLog> logs;
    std::istringstream in{ std::string{ text } };
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (detail::trim(line).empty()) {
            continue;
        }
        if (!header_seen) {
            if (line != step_log_header()) {
                throw ParseError{ std::string{ source }, line_no, "unexpected step-log header" };
            }
            header_seen = true;
            continue;
        }
        const std::vector<std::string> f = split_csv_line(line);
        if (f.size() != 12) {
            throw ParseError{ std::string{ source }, line_no, fmt::format("expected 12 columns, found {}", f.size()) };
        }
        StepLog l;
        l.config = f[0];
        l.scenario = f[1];
        l.fold = field_as<std::size_t>(f[2], source, line_no, "fold");
        l.seed = field_as<std::uint64_t>(f[3], source, line_no, "seed");
        l.step = field_as<std::size_t>(f[4], source, line_no, "step");
        l.timeout_s = field_as<double>(f[5], source, line_no, "timeout_s");
        l.labels = field_as<std::size_t>(f[6], source, line_no, "labels");
        l.cost_s = field_as<double>(f[7], source, line_no, "cost_s");
        l.cost_frac = field_as<double>(f[8], source, line_no, "cost_frac");
        l.data_frac = field_as<double>(f[9], source, line_no, "data_frac");
        l.test_par10_s = field_as<double>(f[10], source, line_no, "test_par10_s");
        l.perf_ratio = field_as<double>(f[11], source, line_no, "perf_ratio");
        logs.push_back(std::move(l));
    }
    if (!header_seen) {
        throw ParseError{ std::string{ source }, line_no, "empty step-log file" };
    }
    return logs;
}

std::vector<StepLog> read_step_logs(const fs::path &path) {
    return parse_step_logs(read_file(path), path.string());
}

std::vector<StepLog> read_log_tree(const fs::path &directory) {
    if (!fs::is_directory(directory)) {
        throw DataError{ fmt::format("log directory '{}' does not exist", directory.string()) };
    }
    std::vector<fs::path> files;
    for (const auto &entry : fs::recursive_directory_iterator(directory)) {
        if (entry.is_regular_file() && entry.path().extension() == ".csv" && entry.path().filename().string().starts_with("fold")) {
            files.push_back(entry.path());
        }
    }
    if (files.empty()) {
        throw DataError{ fmt::format("no step-log CSV files under '{}'", directory.string()) };
    }
    std::sort(files.begin(), files.end());
    std::vector<StepLog> logs;
    for (const fs::path &p : files) {
        std::vector<StepLog> part = read_step_logs(p);
        logs.insert(logs.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
    }
    return logs;
}

// --- grid ---------------------------------------------------------------------

std::uint64_t cell_run_seed(std::uint64_t seed, std::size_t fold) noexcept {
    return derive_seed(seed, fold);
}

fs::path cell_path(const fs::path &out_dir, const std::string &config_id, std::size_t fold, std::uint64_t seed) {
    return out_dir / config_id / fmt::format("fold{}-seed{}.csv", fold, seed);
}

std::vector<CellResult> run_grid(const ExperimentSpec &spec, const std::function<void(const CellResult &)> &on_cell) {
    if (spec.scenario == nullptr) {
        throw ConfigError{ "run_grid: no scenario" };
    }
    if (spec.configs.empty()) {
        throw ConfigError{ "run_grid: no configurations selected" };
    }
    if (spec.n_folds == 0 || spec.n_folds > default_fold_count) {
        throw ConfigError{ fmt::format("run_grid: folds must be in [1, {}]", default_fold_count) };
    }
    if (spec.seeds_per_fold == 0) {
        throw ConfigError{ "run_grid: at least one seed per fold is required" };
    }
    for (std::size_t x = 0; x < spec.configs.size(); ++x) {
        for (std::size_t y = x + 1; y < spec.configs.size(); ++y) {
            if (spec.configs[x] == spec.configs[y]) {
                throw ConfigError{ fmt::format("run_grid: configuration '{}' listed twice", spec.configs[x].id()) };
            }
        }
    }
    {
        std::error_code ec;
        fs::create_directories(spec.out_dir, ec);
        if (ec || !fs::is_directory(spec.out_dir)) {
            throw DataError{ fmt::format("cannot create output directory '{}'", spec.out_dir.string()) };
        }
        const fs::path probe = spec.out_dir / ".write-probe";
        std::ofstream out{ probe };
        if (!out) {
            throw DataError{ fmt::format("output directory '{}' is not writable", spec.out_dir.string()) };
        }
        out.close();
        fs::remove(probe, ec);
    }

    const Scenario &scenario = *spec.scenario;
    const SplitPlan plan = make_splits(scenario, spec.base_seed);

    struct Cell {
        ExperimentConfig config;
        std::size_t fold;
        std::uint64_t seed;
    };
    std::vector<Cell> cells;
    for (const ExperimentConfig &config : spec.configs) {
        for (std::size_t fold = 0; fold < spec.n_folds; ++fold) {
            for (std::size_t s = 0; s < spec.seeds_per_fold; ++s) {
                cells.push_back({ config, fold, run_seed_value(spec.base_seed, s) });
            }
        }
    }

    std::vector<CellResult> results(cells.size());
    std::atomic<std::size_t> next{ 0 };
    std::mutex report_mutex;
    std::exception_ptr failure;

    const auto run_cell = [&](const Cell &cell) {
        CellResult result;
        result.config = cell.config.id();
        result.fold = cell.fold;
        result.seed = cell.seed;
        result.path = cell_path(spec.out_dir, result.config, cell.fold, cell.seed);
        if (fs::exists(result.path)) {
            const std::vector<StepLog> existing = read_step_logs(result.path);
            result.skipped = true;
            result.steps = existing.size();
            if (!existing.empty()) {
                result.final_perf_ratio = existing.back().perf_ratio;
                result.final_cost_frac = existing.back().cost_frac;
            }
            return result;
        }
        const std::uint64_t run_seed = cell_run_seed(cell.seed, cell.fold);
        const PassiveResult reference = run_passive_baseline(scenario, plan, cell.fold, run_seed, false, spec.loop.forest);
        std::vector<StepLog> logs;
        if (cell.config.kind == ExperimentConfig::Kind::passive) {
            const PassiveResult own = cell.config.timeout_predictor ? run_passive_baseline(scenario, plan, cell.fold, run_seed, true, spec.loop.forest) : reference;
            LoopStep step;
            step.timeout_s = scenario.cutoff;
            step.requests = own.labelled_cells / scenario.n_algorithms() * (scenario.n_algorithms() * (scenario.n_algorithms() - 1) / 2);
            step.cost_s = own.labelling_cost_s;
            step.observed_cells = own.labelled_cells;
            step.total_cells = own.labelled_cells;
            step.test_par10 = own.test_par10;
            logs = make_step_logs(cell.config, scenario.id, cell.fold, cell.seed, std::span<const LoopStep>{ &step, 1 }, reference);
        } else {
            LoopConfig cfg = spec.loop;
            cfg.selection = cell.config.selection;
            cfg.timeout_predictor = cell.config.timeout_predictor;
            cfg.dynamic_timeout = cell.config.dynamic_timeout;
            cfg.seed = run_seed;
            const std::vector<LoopStep> steps = run_loop(scenario, plan, cell.fold, cfg);
            logs = make_step_logs(cell.config, scenario.id, cell.fold, cell.seed, steps, reference);
        }
        write_step_logs(result.path, logs);
        result.steps = logs.size();
        result.final_perf_ratio = logs.back().perf_ratio;
        result.final_cost_frac = logs.back().cost_frac;
        return result;
    };

    const auto worker = [&] {
        while (true) {
            const std::size_t k = next.fetch_add(1);
            if (k >= cells.size()) {
                return;
            }
            {
                std::lock_guard lock{ report_mutex };
                if (failure) {
                    return;
                }
            }
            try {
                results[k] = run_cell(cells[k]);
                std::lock_guard lock{ report_mutex };
                if (on_cell) {
                    on_cell(results[k]);
                }
            } catch (...) {
                std::lock_guard lock{ report_mutex };
                if (!failure) {
                    failure = std::current_exception();
                }
                return;
            }
        }
    };

    const std::size_t jobs = std::clamp<std::size_t>(spec.jobs, 1, cells.size());
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(jobs);
        for (std::size_t w = 0; w < jobs; ++w) {
            pool.emplace_back(worker);
        }
    }
    if (failure) {
        std::rethrow_exception(failure);
    }
    return results;
}

// --- summaries ------------------------------------------------------------------

std::vector<double> ratio_grid() {
    std::vector<double> grid;
    for (int k = 0; k <= 50; ++k) {
        grid.push_back(1.0 + 0.02 * k);
    }
    return grid;
}

namespace {

std::pair<double, double> mean_and_stderr(const std::vector<double> &xs) {
    const auto n = static_cast<double>(xs.size());
    double mean = 0.0;
    for (const double x : xs) {
        mean += x;
    }
    mean /= n;
    if (xs.size() < 2) {
        return { mean, 0.0 };
    }
    double ss = 0.0;
    for (const double x : xs) {
        ss += (x - mean) * (x - mean);
    }
    const double sample_sd = std::sqrt(ss / (n - 1.0));
    return { mean, sample_sd / std::sqrt(n) };
}

// Grid ratios carry representation error (1 + 0.02 * 5 = 1.1000000000000001).
constexpr double ratio_slack = 1e-9;

}  // namespace

CurveSummary summarize(std::span<const StepLog> logs) {
    if (logs.empty()) {
        throw DataError{ "summarize: no step logs" };
    }
    using RunKey = std::tuple<std::string, std::size_t, std::uint64_t>;
    std::map<std::string, std::map<RunKey, std::vector<const StepLog *>>> by_config;
    for (const StepLog &l : logs) {
        by_config[l.config][RunKey{ l.scenario, l.fold, l.seed }].push_back(&l);
    }
    std::vector<std::string> configs;
    for (const auto &[config, runs] : by_config) {
        configs.push_back(config);
    }
    std::stable_sort(configs.begin(), configs.end(), [](const std::string &x, const std::string &y) { return canonical_config_rank(x) < canonical_config_rank(y); });

    const std::vector<double> grid = ratio_grid();
    CurveSummary summary;
    for (const std::string &config : configs) {
        auto &runs = by_config.at(config);
        for (auto &[key, steps] : runs) {
            std::stable_sort(steps.begin(), steps.end(), [](const StepLog *x, const StepLog *y) { return x->step < y->step; });
        }
        ConfigCurve curve;
        curve.config = config;
        for (const double r : grid) {
            std::vector<double> cost_fracs;
            std::vector<double> data_fracs;
            for (const auto &[key, steps] : runs) {
                double cost = 1.0;
                double data = 1.0;
                for (const StepLog *s : steps) {
                    if (s->perf_ratio <= r + ratio_slack) {
                        cost = s->cost_frac;
                        data = s->data_frac;
                        break;
                    }
                }
                cost_fracs.push_back(cost);
                data_fracs.push_back(data);
            }
            CurvePoint point;
            point.ratio = r;
            std::tie(point.mean_cost_frac, point.stderr_cost_frac) = mean_and_stderr(cost_fracs);
            std::tie(point.mean_data_frac, point.stderr_data_frac) = mean_and_stderr(data_fracs);
            point.n_runs = runs.size();
            curve.points.push_back(point);
        }
        summary.curves.push_back(std::move(curve));
    }
    return summary;
}

std::string format_summary_csv(const CurveSummary &summary) {
    std::string out = "config,ratio,mean_cost_frac,stderr_cost_frac,mean_data_frac,stderr_data_frac,n_runs\n";
    for (const ConfigCurve &curve : summary.curves) {
        for (const CurvePoint &p : curve.points) {
            out += fmt::format("{},{:.2f},{},{},{},{},{}\n", csv_field(curve.config), p.ratio, num(p.mean_cost_frac), num(p.stderr_cost_frac), num(p.mean_data_frac),
                               num(p.stderr_data_frac), p.n_runs);
        }
    }
    return out;
}

void write_summary_csv(const fs::path &path, const CurveSummary &summary) {
    write_file_atomically(path, format_summary_csv(summary));
}

CurveSummary parse_summary_csv(std::string_view text, std::string_view source) {
    CurveSummary summary;
    std::istringstream in{ std::string{ text } };
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') {
            line.pop_back();
        }
        if (detail::trim(line).empty()) {
            continue;
        }
        if (!header_seen) {
            if (line != "config,ratio,mean_cost_frac,stderr_cost_frac,mean_data_frac,stderr_data_frac,n_runs") {
                throw ParseError{ std::string{ source }, line_no, "unexpected summary header" };
            }
            header_seen = true;
            continue;
        }
        const std::vector<std::string> f = split_csv_line(line);
        if (f.size() != 7) {
            throw ParseError{ std::string{ source }, line_no, fmt::format("expected 7 columns, found {}", f.size()) };
        }
        CurvePoint p;
        p.ratio = field_as<double>(f[1], source, line_no, "ratio");
        p.mean_cost_frac = field_as<double>(f[2], source, line_no, "mean_cost_frac");
        p.stderr_cost_frac = field_as<double>(f[3], source, line_no, "stderr_cost_frac");
        p.mean_data_frac = field_as<double>(f[4], source, line_no, "mean_data_frac");
        p.stderr_data_frac = field_as<double>(f[5], source, line_no, "stderr_data_frac");
        p.n_runs = field_as<std::size_t>(f[6], source, line_no, "n_runs");
        if (summary.curves.empty() || summary.curves.back().config != f[0]) {
            summary.curves.push_back({ f[0], {} });
        }
        summary.curves.back().points.push_back(p);
    }
    if (!header_seen) {
        throw ParseError{ std::string{ source }, line_no, "empty summary file" };
    }
    return summary;
}

CurveSummary read_summary_csv(const fs::path &path) {
    return parse_summary_csv(read_file(path), path.string());
}

}  // namespace frugal
