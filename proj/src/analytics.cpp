#include "bppp/analytics.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <vector>

#include "bppp/parallel.hpp"
#include "bppp/rng.hpp"
#include "bppp/utility.hpp"

namespace bppp {

namespace {

double sample_sd(const Eigen::VectorXd& x) {
    const auto n = x.size();
    const double mean = x.mean();
    return std::sqrt((x.array() - mean).square().sum() / (n - 1));
}

double annualized_sharpe(const Eigen::VectorXd& x, int annualization) {
    const double sd = sample_sd(x);
    return x.mean() * annualization / (sd * std::sqrt(static_cast<double>(annualization)));
}

}  // namespace

double sharpe(const Eigen::VectorXd& excess_returns, int annualization) {
    if (excess_returns.size() < 2) throw DataError("sharpe: need at least 2 observations");
    const double sd = sample_sd(excess_returns);
    if (!(sd > 0.0)) throw DataError("sharpe: zero-variance return series");
    return annualized_sharpe(excess_returns, annualization);
}

double certainty_equivalent(const Eigen::VectorXd& net_returns, double gamma) {
    if (net_returns.size() < 1) throw DataError("certainty_equivalent: empty series");
    double monthly;
    if (gamma == 1.0) {
        double acc = 0.0;
        for (Eigen::Index t = 0; t < net_returns.size(); ++t) acc += crra(net_returns(t), 1.0);
        monthly = std::exp(acc / net_returns.size()) - 1.0;
    } else {
        double acc = 0.0;
        for (Eigen::Index t = 0; t < net_returns.size(); ++t) acc += crra(net_returns(t), gamma);
        monthly = std::pow((1.0 - gamma) * acc / net_returns.size(), 1.0 / (1.0 - gamma)) - 1.0;
    }
    return std::pow(1.0 + monthly, 12.0) - 1.0;
}

DrawdownStats drawdown_stats(const Eigen::VectorXd& returns) {
    if (returns.size() < 1) throw DataError("drawdown_stats: empty series");
    DrawdownStats out;
    out.drawdown_path.resize(returns.size());
    double wealth = 1.0, peak = 1.0;
    for (Eigen::Index t = 0; t < returns.size(); ++t) {
        wealth *= 1.0 + returns(t);
        peak = std::max(peak, wealth);
        out.drawdown_path(t) = wealth / peak - 1.0;
        out.max_drawdown = std::min(out.max_drawdown, out.drawdown_path(t));
    }
    return out;
}

TailStats tail_stats(const Eigen::VectorXd& returns) {
    const auto n = returns.size();
    if (n < 20) throw DataError("tail_stats: need at least 20 observations");
    std::vector<double> sorted(returns.data(), returns.data() + n);
    std::sort(sorted.begin(), sorted.end());
    const auto idx = static_cast<size_t>(std::ceil(0.05 * n)) - 1;
    TailStats out;
    out.var95 = sorted[idx];
    double tail_sum = 0.0;
    int tail_n = 0;
    for (Eigen::Index t = 0; t < n; ++t)
        if (returns(t) <= out.var95) {
            tail_sum += returns(t);
            ++tail_n;
        }
    out.cvar95 = tail_sum / tail_n;

    const double mean = returns.mean();
    double m2 = 0.0, m3 = 0.0, m4 = 0.0;
    for (Eigen::Index t = 0; t < n; ++t) {
        const double d = returns(t) - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    m2 /= n;
    m3 /= n;
    m4 /= n;
    out.skewness = m2 > 1e-30 ? m3 / std::pow(m2, 1.5) : 0.0;
    out.excess_kurtosis = m2 > 1e-30 ? m4 / (m2 * m2) - 3.0 : 0.0;
    return out;
}

SpanningRegression spanning_regression(const Eigen::VectorXd& strategy_excess, const Eigen::VectorXd& market_excess,
                                       bool robust) {
    const auto n = strategy_excess.size();
    if (n != market_excess.size()) throw DataError("spanning_regression: length mismatch");
    if (n < 30) throw DataError("spanning_regression: need at least 30 observations");
    const double xbar = market_excess.mean();
    const double ybar = strategy_excess.mean();
    const Eigen::ArrayXd xc = market_excess.array() - xbar;
    const Eigen::ArrayXd yc = strategy_excess.array() - ybar;
    const double sxx = xc.square().sum();
    if (!(sxx > 1e-30)) throw DataError("spanning_regression: degenerate regressor");

    SpanningRegression out;
    out.beta = (xc * yc).sum() / sxx;
    const double alpha = ybar - out.beta * xbar;
    out.alpha_annual = 12.0 * alpha;

    const Eigen::ArrayXd resid = strategy_excess.array() - alpha - out.beta * market_excess.array();
    const double rss = resid.square().sum();
    const double tss = yc.square().sum();
    out.r_squared = tss > 1e-30 ? 1.0 - rss / tss : 1.0;

    double se_alpha;
    if (robust) {
        // HC0: alpha_hat = sum_t w_t y_t with w_t = 1/n - xbar (x_t - xbar)/sxx.
        double meat = 0.0;
        for (Eigen::Index t = 0; t < n; ++t) {
            const double w_t = 1.0 / n - xbar * (market_excess(t) - xbar) / sxx;
            meat += w_t * w_t * resid(t) * resid(t);
        }
        se_alpha = std::sqrt(meat);
    } else {
        const double s2 = rss / (n - 2);
        se_alpha = std::sqrt(s2 * (1.0 / n + xbar * xbar / sxx));
    }

    if (se_alpha > 1e-30) {
        out.t_alpha = alpha / se_alpha;
        boost::math::students_t dist(static_cast<double>(n - 2));
        out.p_value = 2.0 * boost::math::cdf(dist, -std::abs(out.t_alpha));
    } else {
        out.t_alpha = 0.0;
        out.p_value = std::abs(alpha) < 1e-12 ? 1.0 : 0.0;
    }
    return out;
}

SharpeDiffTest sharpe_diff_test(const Eigen::VectorXd& strategy_excess, const Eigen::VectorXd& market_excess,
                                std::uint64_t seed, int n_boot) {
    const int n = static_cast<int>(strategy_excess.size());
    if (n != market_excess.size()) throw DataError("sharpe_diff_test: length mismatch");
    if (n < 60) throw DataError("sharpe_diff_test: need at least 60 observations");

    SharpeDiffTest out;
    out.block_length = bootstrap_block_length(n);
    out.diff = annualized_sharpe(strategy_excess, 12) - annualized_sharpe(market_excess, 12);

    const int b = out.block_length;
    const int n_blocks = (n + b - 1) / b;
    const int nc = num_chunks(n_boot);
    std::vector<double> sum(nc, 0.0), sumsq(nc, 0.0);
#pragma omp parallel for schedule(static)
    for (int c = 0; c < nc; ++c) {
        const int lo = c * kReduceChunk;
        const int hi = std::min(lo + kReduceChunk, n_boot);
        double s = 0.0, s2 = 0.0;
        Eigen::VectorXd x(n), y(n);
        for (int rep = lo; rep < hi; ++rep) {
            RngEngine rng = make_stream(seed, static_cast<std::uint64_t>(rep));
            std::uniform_int_distribution<int> start(0, n - 1);
            int pos = 0;
            for (int blk = 0; blk < n_blocks && pos < n; ++blk) {
                const int s0 = start(rng);
                for (int j = 0; j < b && pos < n; ++j, ++pos) {
                    const int idx = (s0 + j) % n;  // circular wrap, pairs resampled jointly
                    x(pos) = strategy_excess(idx);
                    y(pos) = market_excess(idx);
                }
            }
            const double d = annualized_sharpe(x, 12) - annualized_sharpe(y, 12);
            s += d;
            s2 += d * d;
        }
        sum[c] = s;
        sumsq[c] = s2;
    }
    double total = 0.0, total_sq = 0.0;
    for (int c = 0; c < nc; ++c) {
        total += sum[c];
        total_sq += sumsq[c];
    }
    const double mean = total / n_boot;
    const double var = std::max(0.0, (total_sq - n_boot * mean * mean) / (n_boot - 1));
    out.bootstrap_se = std::sqrt(var);

    if (out.bootstrap_se > 1e-15) {
        out.t_stat = out.diff / out.bootstrap_se;
        boost::math::normal dist;
        out.p_value = 2.0 * boost::math::cdf(dist, -std::abs(out.t_stat));
    } else {
        out.t_stat = 0.0;
        out.p_value = 1.0;
    }
    return out;
}

SubperiodRow subperiod_sharpe(const std::vector<MonthCode>& dates, const Eigen::VectorXd& excess_returns,
                              MonthCode first, MonthCode last, const std::string& label) {
    SubperiodRow row;
    row.label = label;
    row.first = first;
    row.last = last;
    std::vector<double> seg;
    for (size_t t = 0; t < dates.size(); ++t)
        if (dates[t] >= first && dates[t] <= last) seg.push_back(excess_returns(static_cast<Eigen::Index>(t)));
    row.months = static_cast<int>(seg.size());
    if (row.months < 12) {
        row.skipped = true;
        return row;
    }
    row.sharpe = annualized_sharpe(Eigen::Map<const Eigen::VectorXd>(seg.data(), row.months), 12);
    return row;
}

RollingAndSubperiods rolling_and_subperiod(const std::vector<MonthCode>& dates,
                                           const Eigen::VectorXd& excess_returns, int window) {
    const auto n = static_cast<int>(dates.size());
    if (excess_returns.size() != n) throw DataError("rolling_and_subperiod: length mismatch");
    RollingAndSubperiods out;
    for (int t = window - 1; t < n; ++t) {
        out.rolling_dates.push_back(dates[t]);
        const Eigen::VectorXd seg = excess_returns.segment(t - window + 1, window);
        const double sd = sample_sd(seg);
        out.rolling_sharpe.conservativeResize(out.rolling_dates.size());
        out.rolling_sharpe(out.rolling_dates.size() - 1) = sd > 0.0 ? annualized_sharpe(seg, 12) : 0.0;
    }

    // Decade bins anchored at the first observation's year.
    const int y0 = year_of(dates.front());
    const int y_last = year_of(dates.back());
    for (int y = y0; y <= y_last; y += 10) {
        const int ye = std::min(y + 9, y_last);
        const std::string label = std::to_string(y) + "-" + std::to_string(ye);
        out.decades.push_back(subperiod_sharpe(dates, excess_returns, y * 100 + 1, ye * 100 + 12, label));
    }
    out.crises.push_back(subperiod_sharpe(dates, excess_returns, 200601, 201112, "GFC"));
    out.crises.push_back(subperiod_sharpe(dates, excess_returns, 201801, 202212, "COVID"));
    return out;
}

}  // namespace bppp
