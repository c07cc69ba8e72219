// analytics.hpp
// Performance statistics over monthly return series: Sharpe ratios (gross and
// net), certainty equivalents and performance fees, drawdowns, tail measures,
// market-spanning regressions, the studentized circular-block-bootstrap
// Sharpe-difference test, and rolling/subperiod summaries.

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "bppp/types.hpp"

namespace bppp {

// Annualized Sharpe ratio of monthly excess returns: (mean*12)/(sd*sqrt(12))
// with the sample (N-1) standard deviation. Throws on zero variance.
double sharpe(const Eigen::VectorXd& excess_returns, int annualization = 12);

// Annualized certainty equivalent of monthly total returns under exact CRRA
// utility: monthly CE from the mean utility, compounded to a year.
double certainty_equivalent(const Eigen::VectorXd& net_returns, double gamma);

// Annual basis points a benchmark investor would pay to switch; both CEs must
// be computed at the same gamma.
inline double performance_fee(double ce_strategy, double ce_benchmark) {
    return (ce_strategy - ce_benchmark) * 1e4;
}

struct DrawdownStats {
    double max_drawdown = 0.0;     // most negative dip from peak wealth
    Eigen::VectorXd drawdown_path;  // W_t / max_{s<=t} W_s - 1
};

DrawdownStats drawdown_stats(const Eigen::VectorXd& returns);

struct TailStats {
    double var95 = 0.0;   // empirical 5th percentile of monthly returns
    double cvar95 = 0.0;  // mean of returns <= var95
    double skewness = 0.0;
    double excess_kurtosis = 0.0;
};

TailStats tail_stats(const Eigen::VectorXd& returns);

struct SpanningRegression {
    double alpha_annual = 0.0;  // intercept * 12
    double beta = 0.0;
    double t_alpha = 0.0;
    double p_value = 1.0;
    double r_squared = 0.0;
};

// OLS of strategy excess returns on market excess returns, intercept included,
// homoskedastic standard errors (robust=true switches to HC0).
SpanningRegression spanning_regression(const Eigen::VectorXd& strategy_excess,
                                       const Eigen::VectorXd& market_excess, bool robust = false);

struct SharpeDiffTest {
    double diff = 0.0;          // annualized Sharpe difference
    double bootstrap_se = 0.0;  // sd of the difference over replicates
    double t_stat = 0.0;
    double p_value = 1.0;
    int block_length = 0;
};

inline int bootstrap_block_length(int n) {
    return static_cast<int>(std::floor(std::cbrt(static_cast<double>(n))));
}

// Circular block bootstrap of the joint series with block length
// floor(T^(1/3)); studentized difference of annualized Sharpe ratios with a
// two-sided normal p-value. Deterministic per seed, replicates on per-stream
// engines.
SharpeDiffTest sharpe_diff_test(const Eigen::VectorXd& strategy_excess, const Eigen::VectorXd& market_excess,
                                std::uint64_t seed, int n_boot = 4999);

struct SubperiodRow {
    std::string label;
    MonthCode first = 0;
    MonthCode last = 0;
    int months = 0;
    double sharpe = 0.0;
    bool skipped = false;  // segment shorter than 12 months
};

struct RollingAndSubperiods {
    std::vector<MonthCode> rolling_dates;  // window-end months
    Eigen::VectorXd rolling_sharpe;
    std::vector<SubperiodRow> decades;
    std::vector<SubperiodRow> crises;  // GFC 2006-2011 and COVID 2018-2022
};

RollingAndSubperiods rolling_and_subperiod(const std::vector<MonthCode>& dates,
                                           const Eigen::VectorXd& excess_returns, int window = 36);

// Sharpe over an explicit month range; skipped if under 12 months of data.
SubperiodRow subperiod_sharpe(const std::vector<MonthCode>& dates, const Eigen::VectorXd& excess_returns,
                              MonthCode first, MonthCode last, const std::string& label);

}  // namespace bppp
