// window.hpp
// Estimation windows: the (z_s, R_{s+1}) pairs the MAP objective sums over,
// plus the in-sample standardization/imputation step that produces them.

#pragma once

#include <Eigen/Dense>

#include "bppp/panels.hpp"

namespace bppp {

// Row s holds the standardized signal vector observed at month s together
// with the returns realized the following month.
struct EstimationWindow {
    Eigen::MatrixXd signals;         // S x L
    Eigen::MatrixXd excess_returns;  // S x K
    Eigen::VectorXd risk_free;       // S

    int length() const { return static_cast<int>(signals.rows()); }
    int n_signals() const { return static_cast<int>(signals.cols()); }
    int n_assets() const { return static_cast<int>(excess_returns.cols()); }
    // Squared column norms ||z_l||^2, used by the horseshoe shrinkage factor.
    Eigen::VectorXd signal_norms() const { return signals.colwise().squaredNorm(); }
};

// Standardizes each column of `signals` to zero mean and unit variance using
// only rows 0..window_end (inclusive); moments are taken over non-missing
// cells, missing cells become exactly 0 afterwards (mean imputation on the
// standardized scale) and zero-variance columns are set identically to 0.
// Population (1/N) variance by default; sample_variance switches to 1/(N-1).
Eigen::MatrixXd standardize_window(const Eigen::MatrixXd& signals, int window_end, bool sample_variance = false);

// Builds the estimation sample available at month index `t` of an aligned
// panel pair: standardized signal rows 0..t-1 paired with returns 1..t.
// `current_signals` (optional out) receives the standardized row t that forms
// the next weights.
EstimationWindow build_window(const ReturnsPanel& returns, const SignalPanel& signals, int t,
                              bool sample_variance = false, Eigen::VectorXd* current_signals = nullptr);

}  // namespace bppp
