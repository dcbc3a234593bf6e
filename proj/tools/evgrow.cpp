// evgrow: batch front-end for GROW e-variables and CSC concentration bounds.
//
// Exit codes: 0 success, 1 configuration error, 2 falsified bound or failed
// verification property, 3 computation error inside a module.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "evgrow/runner.hpp"
#include "evgrow/verify.hpp"

namespace {

std::optional<std::uint64_t> env_seed() {
    if (const char* s = std::getenv("EVGROW_SEED")) return std::strtoull(s, nullptr, 10);
    return std::nullopt;
}

int cmd_run(const std::string& path) {
    std::vector<evgrow::ExperimentConfig> configs;
    try {
        configs = evgrow::parse_config_file(path, env_seed());
    } catch (const evgrow::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    }

    // rows are buffered and written in config order; nothing is written on error
    std::vector<evgrow::CsvRow> rows;
    bool falsified = false;
    std::string csv_path, svg_path;
    const evgrow::ExperimentConfig* plot_cfg = nullptr;
    try {
        for (const auto& cfg : configs) {
            if (cfg.mode == "verify") {
                const auto results = evgrow::run_verify_suite(cfg.seed, cfg.mc_samples);
                int failed = 0;
                for (const auto& r : results) {
                    std::cout << (r.pass ? "PASS" : "FAIL") << " " << r.name << " ["
                              << r.config << "] " << r.detail << "\n";
                    failed += r.pass ? 0 : 1;
                }
                std::cout << results.size() - failed << "/" << results.size()
                          << " properties passed\n";
                if (failed > 0) falsified = true;
                continue;
            }
            const auto out = evgrow::run_experiment(cfg);
            falsified = falsified || out.falsified;
            rows.insert(rows.end(), out.rows.begin(), out.rows.end());
            if (!cfg.csv_path.empty()) csv_path = cfg.csv_path;
            if (!cfg.svg_path.empty()) {
                svg_path = cfg.svg_path;
                plot_cfg = &cfg;
            }
        }
    } catch (const evgrow::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 1;
    } catch (const evgrow::Error& e) {
        std::cerr << "computation error: " << e.what() << "\n";
        return 3;
    }

    if (!rows.empty()) {
        const std::string csv = evgrow::render_csv(rows);
        if (csv_path.empty()) {
            std::cout << csv;
        } else {
            std::ofstream out(csv_path);
            if (!out) {
                std::cerr << "cannot write CSV to '" << csv_path << "'\n";
                return 3;
            }
            out << csv;
        }
        if (!svg_path.empty() && plot_cfg) {
            std::ofstream out(svg_path);
            if (!out) {
                std::cerr << "cannot write SVG to '" << svg_path << "'\n";
                return 3;
            }
            out << evgrow::render_run_svg(*plot_cfg, rows);
        }
    }
    if (falsified) {
        std::cerr << "falsified bound: an oracle exceeded its bound beyond the slack\n";
        return 2;
    }
    return 0;
}

int cmd_verify(std::uint64_t seed, std::int64_t mc_samples) {
    if (const auto s = env_seed()) seed = *s;
    std::vector<evgrow::PropertyResult> results;
    try {
        results = evgrow::run_verify_suite(seed, mc_samples);
    } catch (const evgrow::Error& e) {
        std::cerr << "computation error: " << e.what() << "\n";
        return 3;
    }
    int failed = 0;
    for (const auto& r : results) {
        std::cout << (r.pass ? "PASS" : "FAIL") << " " << r.name << " [" << r.config
                  << "] " << r.detail << "\n";
        failed += r.pass ? 0 : 1;
    }
    std::cout << results.size() - failed << "/" << results.size()
              << " properties passed\n";
    return failed == 0 ? 0 : 2;
}

void cmd_families() {
    std::cout << "gaussian          d-dimensional unit-covariance location family\n"
                 "                  params: d (positive integer)\n"
                 "scaled_bernoulli  two atoms {1/p, -1/(1-p)} with zero null mean\n"
                 "                  params: p in (0,1)\n"
                 "poisson           Poisson(lambda0) shifted to zero mean, support\n"
                 "                  truncated at null tail mass 1e-14\n"
                 "                  params: lambda0 > 0\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"GROW e-variables and CSC concentration bounds"};
    app.require_subcommand(1);

    std::string config_path;
    auto* run = app.add_subcommand("run", "run the experiment in a config file");
    run->add_option("config", config_path, "TOML experiment file")->required();

    std::string suite = "default";
    std::uint64_t seed = 0;
    std::int64_t mc_samples = 200'000;
    auto* verify = app.add_subcommand("verify", "run the verification suite");
    verify->add_option("--suite", suite, "suite name (only 'default')");
    verify->add_option("--seed", seed, "Monte Carlo seed");
    verify->add_option("--mc", mc_samples, "Monte Carlo samples per check");

    auto* families = app.add_subcommand("families", "list built-in families");

    CLI11_PARSE(app, argc, argv);

    if (run->parsed()) return cmd_run(config_path);
    if (verify->parsed()) {
        if (suite != "default") {
            std::cerr << "unknown suite '" << suite << "'\n";
            return 1;
        }
        return cmd_verify(seed, mc_samples);
    }
    if (families->parsed()) cmd_families();
    return 0;
}
