#include "bppp/window.hpp"

#include <cmath>

namespace bppp {

Eigen::MatrixXd standardize_window(const Eigen::MatrixXd& signals, int window_end, bool sample_variance) {
    if (window_end < 1 || window_end >= signals.rows())
        throw DataError("standardize_window: window_end must be in [1, rows)");
    const int n = window_end + 1;
    const int L = static_cast<int>(signals.cols());
    Eigen::MatrixXd out(n, L);
    for (int l = 0; l < L; ++l) {
        double sum = 0.0;
        int count = 0;
        for (int t = 0; t < n; ++t) {
            const double v = signals(t, l);
            if (!std::isnan(v)) {
                sum += v;
                ++count;
            }
        }
        if (count == 0) {
            out.col(l).setZero();
            continue;
        }
        const double mean = sum / count;
        double ss = 0.0;
        for (int t = 0; t < n; ++t) {
            const double v = signals(t, l);
            if (!std::isnan(v)) ss += (v - mean) * (v - mean);
        }
        const int denom = sample_variance ? std::max(count - 1, 1) : count;
        const double var = ss / denom;
        if (var <= 1e-24) {
            out.col(l).setZero();
            continue;
        }
        const double inv_sd = 1.0 / std::sqrt(var);
        for (int t = 0; t < n; ++t) {
            const double v = signals(t, l);
            out(t, l) = std::isnan(v) ? 0.0 : (v - mean) * inv_sd;
        }
    }
    return out;
}

EstimationWindow build_window(const ReturnsPanel& returns, const SignalPanel& signals, int t, bool sample_variance,
                              Eigen::VectorXd* current_signals) {
    if (returns.length() != signals.length()) throw DataError("build_window: panels are not aligned");
    if (t < 1 || t >= returns.length()) throw DataError("build_window: t out of range");
    const Eigen::MatrixXd std_signals = standardize_window(signals.raw(), t, sample_variance);
    EstimationWindow w;
    w.signals = std_signals.topRows(t);
    w.excess_returns = returns.excess().middleRows(1, t);
    w.risk_free = returns.risk_free().segment(1, t);
    if (current_signals) *current_signals = std_signals.row(t).transpose();
    return w;
}

}  // namespace bppp
