// runner.hpp
// Experiment orchestration shared by the CLI and the acceptance suite: data
// loading, multi-strategy backtests, the analytics report files, the prior
// sensitivity grid, and the run manifest.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "bppp/backtest.hpp"
#include "bppp/ingestion.hpp"

namespace bppp {

inline constexpr const char* kProjectVersion = "0.1.0";

struct RunSettings {
    BacktestConfig base;
    std::vector<Strategy> strategies = {Strategy::Benchmark, Strategy::PPP, Strategy::BPPP};
    std::vector<double> ce_gammas = {2.0, 5.0, 10.0};

    // Data source: explicit CSVs, a manifest, or a seeded synthetic dataset.
    std::filesystem::path factors_csv;
    std::filesystem::path signals_csv;
    std::filesystem::path manifest;
    bool use_synthetic = false;
    SyntheticSpec synth;

    std::filesystem::path out_dir = "results";
};

std::pair<ReturnsPanel, SignalPanel> load_input_panels(const RunSettings& settings,
                                                       std::vector<std::string>* notices = nullptr);

struct ExperimentOutcome {
    std::vector<BacktestResult> results;     // one per strategy, settings order
    Eigen::VectorXd benchmark_excess;        // market leg used by the test reports
    std::vector<MonthCode> dates;
};

// Runs every configured strategy. Writes per-strategy result directories plus
// performance.csv, ce_gamma.csv, tests.csv, subperiods.csv, rolling_sharpe.csv,
// tc_sweep.csv, summary.md and run_manifest.json under settings.out_dir when
// write_output is true.
ExperimentOutcome run_experiment(const RunSettings& settings, const ReturnsPanel& returns,
                                 const SignalPanel& signals, bool write_output = true,
                                 const std::vector<std::string>& notices = {});

struct SensitivityCell {
    double delta = 0.0;
    bool dynamic_prior_mean = true;
    bool ok = true;
    std::string error;
    double sharpe = 0.0;
    double ce = 0.0;
    double turnover = 0.0;
    double mean_tilt_norm = 0.0;
    double mean_abs_theta = 0.0;
};

// delta grid x {dynamic, static} prior-mean cells; per-cell failures are
// recorded and the grid continues.
std::vector<SensitivityCell> run_sensitivity(const RunSettings& settings, const ReturnsPanel& returns,
                                             const SignalPanel& signals, const std::vector<double>& deltas,
                                             const std::vector<bool>& dynamic_settings);

void write_sensitivity_report(const std::filesystem::path& out_dir, const std::vector<SensitivityCell>& cells);

// (sigma_theta, nu) echo of the prior calibration at a given window length.
struct PriorCalibration {
    double sigma_theta = 0.0;
    double nu = 0.0;
};

PriorCalibration calibrate_prior(double delta, int n_signals, int window_length);

}  // namespace bppp
