// backtest.hpp
// Expanding-window out-of-sample engine: per-window standardization, strategy
// estimation with warm starts and dynamic prior means, weight generation,
// return realization, and turnover/transaction-cost accounting.

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "bppp/estimation.hpp"
#include "bppp/horseshoe.hpp"
#include "bppp/panels.hpp"
#include "bppp/policy.hpp"

namespace bppp {

enum class Strategy { Benchmark, MeanVariance, SimpleMomentum, PPP, BPPP, Horseshoe };

std::string strategy_name(Strategy s);
Strategy parse_strategy(const std::string& name);

struct BacktestConfig {
    int initial_window = 120;
    double gamma = 5.0;   // CRRA coefficient used for estimation
    double delta = 0.35;  // target-tilt standard deviation
    bool dynamic_prior_mean = true;
    std::vector<double> tc_bps = {0.0, 10.0};  // one-way costs, basis points
    Strategy strategy = Strategy::BPPP;
    std::uint64_t seed = 42;

    int draws = 1000;              // Laplace draws per rebalance
    bool degenerate_draws = false;  // force zero posterior variances
    double nu_override = 0.0;       // > 0 pins the Gaussian prior variance

    ConstraintSet constraints{};
    MapSolverConfig solver{};
    HorseshoeConfig horseshoe{};

    int benchmark_asset = 0;      // single-asset benchmark allocation
    bool sample_std = false;      // standardization variance convention
    bool drift_turnover = true;   // drift prior weights before differencing
    int mv_window = 120;          // rolling window of the mean-variance rule
    std::string momentum_signal;  // named signal column for SimpleMomentum

    void validate(int n_assets, int n_signals) const;
};

struct DateDiagnostics {
    MonthCode date = 0;
    bool estimation_ok = true;  // false: weights carried from the previous date
    bool converged = true;
    int iterations = 0;
    double gradient_norm = 0.0;
    // Horseshoe shrinkage summary; NaN for other strategies.
    double kappa_mean = 0.0;
    double kappa_median = 0.0;
    double kappa_below_03 = 0.0;
};

struct BacktestResult {
    Strategy strategy = Strategy::Benchmark;
    std::vector<MonthCode> dates;  // weight-formation months
    std::vector<std::string> asset_names;
    Eigen::MatrixXd weights;       // N x K
    Eigen::VectorXd gross_returns;  // realized the month after formation
    Eigen::VectorXd risk_free;      // realized risk-free leg, same months
    Eigen::VectorXd turnover;       // one-way, first entry 0
    Eigen::MatrixXd net_returns;    // N x n_tc
    std::vector<double> tc_bps;
    Eigen::VectorXd theta_fro;       // ||theta||_F per rebalance
    Eigen::VectorXd theta_mean_abs;  // mean |theta| per rebalance
    Eigen::VectorXd tilt_norm;       // ||theta z_t|| per rebalance
    std::vector<DateDiagnostics> diagnostics;

    Eigen::VectorXd excess_returns() const { return gross_returns - risk_free; }
};

// One-way turnover between consecutive formations: sum_k |w_t,k - w+_{t-1,k}|
// where w+ drifts the previous weights by the returns realized in between and
// renormalizes by portfolio growth (drift=false compares raw weights).
// realized_excess/realized_rf are aligned with the weight rows; entry i uses
// row i of the realizations. Output length is one less than the path.
Eigen::VectorXd turnover_series(const Eigen::MatrixXd& weights_path, const Eigen::MatrixXd& realized_excess,
                                const Eigen::VectorXd& realized_rf, bool drift = true);

// net_t = gross_t - (tc_bps/10000) * turnover_t (aligned series).
Eigen::VectorXd apply_costs(const Eigen::VectorXd& gross_returns, const Eigen::VectorXd& turnover, double tc_bps);

// Runs the configured strategy over the aligned panels. Estimation at month
// index t uses data through t only; weights form at t and realize with the
// returns of t+1. Deterministic given the seed.
BacktestResult run_backtest(const BacktestConfig& config, const ReturnsPanel& returns, const SignalPanel& signals);

// Result files (weights.csv, returns.csv, turnover.csv, theta_summary.csv,
// diagnostics.csv) under dir, YYYYMM date keys.
void write_backtest_result(const std::filesystem::path& dir, const BacktestResult& result);

}  // namespace bppp
