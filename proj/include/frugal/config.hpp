#pragma once

// "key = value" experiment configuration files. Keys are documented in
// docs/config.md; unknown keys and ill-typed values are rejected.

#include "frugal/harness.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace frugal {

struct RunSettings {
    std::vector<ExperimentConfig> configs = ExperimentConfig::all_frugal();
    std::size_t folds{ default_fold_count };
    std::size_t seeds{ 5 };
    std::uint64_t seed{ 0 };
    std::size_t jobs{ 1 };
    std::filesystem::path out{ "runs" };
    bool with_passive{ false };
    LoopConfig loop{};

    /// Keys explicitly given in the parsed file, for override warnings.
    std::set<std::string> explicit_keys;

    [[nodiscard]] ExperimentSpec to_spec(const Scenario &scenario) const;
};

/// Every accepted key, in documentation order.
[[nodiscard]] const std::vector<std::string_view> &config_keys();

/// Applies one key to `settings`; throws ConfigError on unknown keys or bad values.
void apply_setting(RunSettings &settings, std::string_view key, std::string_view value);

/// '#' starts a comment; blank lines are ignored. Errors carry source:line.
[[nodiscard]] RunSettings parse_run_settings(std::string_view text, std::string_view source = "<config>", RunSettings base = {});
[[nodiscard]] RunSettings read_run_settings(const std::filesystem::path &path, RunSettings base = {});

}  // namespace frugal
