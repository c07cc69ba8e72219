// Command-line front end: backtests, the prior-sensitivity grid, numerical
// theory verification, prior calibration, timing-signal construction and
// synthetic dataset generation.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "bppp/config.hpp"
#include "bppp/csv.hpp"
#include "bppp/runner.hpp"
#include "bppp/verification.hpp"

namespace {

struct StagedConfig {
    std::string config_file;
    std::map<std::string, std::string> staging;
    std::vector<std::pair<std::string, CLI::Option*>> options;

    void add_flags(CLI::App* cmd) {
        cmd->add_option("--config", config_file, "key=value config file; flags override it");
        for (const auto& key : bppp::config_keys()) {
            CLI::Option* opt = cmd->add_option("--" + key, staging[key], "config key " + key);
            options.emplace_back(key, opt);
        }
    }

    bppp::RunSettings resolve() const {
        bppp::RunSettings settings;
        if (!config_file.empty()) bppp::apply_config(settings, bppp::parse_config_file(config_file));
        bppp::ConfigMap overrides;
        for (const auto& [key, opt] : options)
            if (opt->count() > 0) overrides[key] = staging.at(key);
        bppp::apply_config(settings, overrides);
        return settings;
    }
};

int run_backtest_cmd(const StagedConfig& staged) {
    bppp::RunSettings settings = staged.resolve();
    std::vector<std::string> notices;
    const auto [returns, signals] = bppp::load_input_panels(settings, &notices);
    for (const auto& n : notices) std::clog << "[notice] " << n << '\n';
    bppp::run_experiment(settings, returns, signals, /*write_output=*/true, notices);
    std::cout << "results written to " << settings.out_dir.string() << '\n';
    return 0;
}

int run_sensitivity_cmd(const StagedConfig& staged, const std::string& deltas_arg, const std::string& dynamic_arg) {
    bppp::RunSettings settings = staged.resolve();
    std::vector<double> deltas;
    {
        std::stringstream ss(deltas_arg);
        std::string cell;
        while (std::getline(ss, cell, ','))
            if (!cell.empty()) deltas.push_back(std::stod(cell));
    }
    std::vector<bool> dynamics;
    if (dynamic_arg == "both")
        dynamics = {false, true};
    else if (dynamic_arg == "yes" || dynamic_arg == "on")
        dynamics = {true};
    else if (dynamic_arg == "no" || dynamic_arg == "off")
        dynamics = {false};
    else
        throw bppp::ConfigError("--dynamic expects both|yes|no");

    std::vector<std::string> notices;
    const auto [returns, signals] = bppp::load_input_panels(settings, &notices);
    const auto cells = bppp::run_sensitivity(settings, returns, signals, deltas, dynamics);
    bppp::write_sensitivity_report(settings.out_dir, cells);
    int failures = 0;
    for (const auto& c : cells)
        if (!c.ok) ++failures;
    std::cout << cells.size() << " grid cells written to " << settings.out_dir.string();
    if (failures > 0) std::cout << " (" << failures << " failed, recorded in sensitivity.csv)";
    std::cout << '\n';
    return 0;
}

int run_verify_theory_cmd(std::uint64_t seed, int experiments, int draws, const std::string& out) {
    bppp::TheorySuiteConfig config;
    config.seed = seed;
    config.gap_experiments = experiments;
    config.mc_draws = draws;
    const auto checks = bppp::run_theory_suite(config);
    bool all_pass = true;
    for (const auto& c : checks) {
        std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << "  (" << c.detail << ")\n";
        all_pass = all_pass && c.pass;
    }
    if (!out.empty()) {
        std::filesystem::create_directories(std::filesystem::path(out).parent_path().empty()
                                                ? "."
                                                : std::filesystem::path(out).parent_path());
        bppp::write_theory_report(out, checks);
        std::cout << "report written to " << out << '\n';
    }
    return all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Parametric portfolio policies with posterior-averaged (Bayesian) weights"};
    app.require_subcommand(1);
    int threads = 0;
    app.add_option("--threads", threads, "worker thread count (0 = library default)");

    auto* backtest = app.add_subcommand("backtest", "run strategies out of sample and write reports");
    StagedConfig backtest_cfg;
    backtest_cfg.add_flags(backtest);

    auto* sensitivity = app.add_subcommand("sensitivity", "BPPP delta x prior-mean sensitivity grid");
    StagedConfig sensitivity_cfg;
    sensitivity_cfg.add_flags(sensitivity);
    std::string deltas_arg = "0.35,0.5,0.7,0.9";
    std::string dynamic_arg = "both";
    sensitivity->add_option("--deltas", deltas_arg, "comma-separated target-tilt standard deviations");
    sensitivity->add_option("--dynamic", dynamic_arg, "prior-mean setting: both|yes|no");

    auto* verify = app.add_subcommand("verify-theory", "numerical checks of the utility gap and variance split");
    std::uint64_t vt_seed = 7;
    int vt_experiments = 50;
    int vt_draws = 4000;
    std::string vt_out = "theory_report.csv";
    verify->add_option("--seed", vt_seed, "base seed");
    verify->add_option("--experiments", vt_experiments, "strictly-concave experiments");
    verify->add_option("--draws", vt_draws, "outer Monte-Carlo draws");
    verify->add_option("--out", vt_out, "CSV report path");

    auto* calibrate = app.add_subcommand("calibrate-prior", "echo sigma_theta and nu for delta, L, T");
    double cp_delta = 0.35;
    int cp_signals = 242;
    int cp_window = 120;
    calibrate->add_option("--delta", cp_delta, "target-tilt standard deviation")->required();
    calibrate->add_option("--signals", cp_signals, "signal count L")->required();
    calibrate->add_option("--window", cp_window, "window length T")->required();

    auto* signals_cmd = app.add_subcommand("signals", "signal utilities");
    auto* build_timing = signals_cmd->add_subcommand("build-timing", "build Val/Rev/Vol timing signals");
    std::string bt_factors, bt_out = "timing_signals.csv";
    build_timing->add_option("--factors", bt_factors, "factor returns CSV")->required();
    build_timing->add_option("--out", bt_out, "output signal CSV");

    auto* synth_cmd = app.add_subcommand("synth", "synthetic data utilities");
    auto* generate = synth_cmd->add_subcommand("generate", "write a seeded synthetic dataset");
    bppp::SyntheticSpec synth_spec;
    std::string synth_out = "synthetic";
    generate->add_option("--assets", synth_spec.n_assets, "asset count K");
    generate->add_option("--signals", synth_spec.n_signals, "signal count L");
    generate->add_option("--months", synth_spec.n_months, "sample length T");
    generate->add_option("--active", synth_spec.n_active, "nonzero true-policy entries");
    generate->add_option("--theta", synth_spec.theta_scale, "true coefficient magnitude");
    generate->add_option("--noise", synth_spec.noise_scale, "return noise scale");
    generate->add_option("--seed", synth_spec.seed, "seed");
    generate->add_option("--out-dir", synth_out, "output directory");

    CLI11_PARSE(app, argc, argv);
    bppp::set_thread_count(threads);

    try {
        if (backtest->parsed()) return run_backtest_cmd(backtest_cfg);
        if (sensitivity->parsed()) return run_sensitivity_cmd(sensitivity_cfg, deltas_arg, dynamic_arg);
        if (verify->parsed()) return run_verify_theory_cmd(vt_seed, vt_experiments, vt_draws, vt_out);
        if (calibrate->parsed()) {
            const bppp::PriorCalibration c = bppp::calibrate_prior(cp_delta, cp_signals, cp_window);
            std::cout << "sigma_theta = " << bppp::format_double(c.sigma_theta) << '\n';
            std::cout << "nu = " << bppp::format_double(c.nu) << '\n';
            return 0;
        }
        if (build_timing->parsed()) {
            std::vector<std::string> notices;
            const bppp::ReturnsPanel factors = bppp::load_factors(bt_factors, &notices);
            for (const auto& n : notices) std::clog << "[notice] " << n << '\n';
            bppp::save_signals(bt_out, bppp::build_timing_signals(factors));
            std::cout << "timing signals written to " << bt_out << '\n';
            return 0;
        }
        if (generate->parsed()) {
            const bppp::SyntheticDataset data = bppp::synthetic_dataset(synth_spec);
            std::filesystem::create_directories(synth_out);
            bppp::save_returns(std::filesystem::path(synth_out) / "returns.csv", data.returns);
            bppp::save_signals(std::filesystem::path(synth_out) / "signals.csv", data.signals);
            std::vector<std::string> header = {"asset"};
            for (const auto& name : data.signals.signal_names()) header.push_back(name);
            std::vector<std::vector<std::string>> rows;
            for (int k = 0; k < data.true_policy.theta.rows(); ++k) {
                std::vector<std::string> row = {data.returns.asset_names()[k]};
                for (int l = 0; l < data.true_policy.theta.cols(); ++l)
                    row.push_back(bppp::format_double(data.true_policy.theta(k, l)));
                rows.push_back(row);
            }
            bppp::write_plain_csv(std::filesystem::path(synth_out) / "true_theta.csv", header, rows);
            std::cout << "synthetic dataset written to " << synth_out << '\n';
            return 0;
        }
    } catch (const bppp::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const bppp::DataError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
