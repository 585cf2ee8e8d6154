// frugal-synth: writes a seeded synthetic scenario in ASLib layout.

#include "frugal/errors.hpp"
#include "frugal/synthetic.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

int main(int argc, char **argv) {
    CLI::App app{ "Generate a synthetic ASLib scenario" };
    frugal::SyntheticSpec spec;
    std::string out;
    app.add_option("out", out, "output directory")->required();
    app.add_option("--instances", spec.n_instances)->capture_default_str();
    app.add_option("--algorithms", spec.n_algorithms)->capture_default_str();
    app.add_option("--noise-features", spec.n_noise_features)->capture_default_str();
    app.add_option("--cutoff", spec.cutoff)->capture_default_str();
    app.add_option("--timeout-rate", spec.timeout_rate)->capture_default_str();
    app.add_option("--missing-rate", spec.missing_rate)->capture_default_str();
    app.add_option("--seed", spec.seed)->capture_default_str();
    app.add_option("--id", spec.id)->capture_default_str();
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        return app.exit(e) == 0 ? 0 : 1;
    }
    try {
        frugal::write_scenario(frugal::make_synthetic_scenario(spec), out);
    } catch (const frugal::ConfigError &e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 1;
    } catch (const std::exception &e) {
        fmt::print(stderr, "error: {}\n", e.what());
        return 2;
    }
    fmt::print("wrote {}\n", out);
    return 0;
}
