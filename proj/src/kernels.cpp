#include "bppp/kernels.hpp"

#include <vector>

#include "bppp/utility.hpp"

namespace bppp {

namespace {

// S x K matrix of frozen-policy weights at theta: ref + active .* (dtheta z).
Eigen::MatrixXd frozen_weights(const FrozenPolicy& frozen, const Eigen::MatrixXd& theta,
                               const EstimationWindow& window) {
    if (theta.rows() != frozen.theta_ref.rows() || theta.cols() != frozen.theta_ref.cols())
        throw DataError("kernel: theta shape does not match frozen reference");
    const Eigen::MatrixXd delta = theta - frozen.theta_ref;
    Eigen::MatrixXd w = frozen.ref_weights;
    if (delta.size() > 0) w.array() += frozen.active.array() * (window.signals * delta.transpose()).array();
    return w;
}

double penalty_value(const QuadraticPenalty* penalty, const Eigen::MatrixXd& theta) {
    if (!penalty) return 0.0;
    return 0.5 * (penalty->precision.array() * (theta - penalty->mean).array().square()).sum();
}

}  // namespace

FrozenPolicy freeze_policy(const Eigen::MatrixXd& theta, const EstimationWindow& window,
                           const Eigen::VectorXd& benchmark, const ConstraintSet& constraints, MaskMode mask_mode,
                           ExecMode exec) {
    const int S = window.length();
    const int K = window.n_assets();
    FrozenPolicy out;
    out.theta_ref = theta;
    out.ref_weights.resize(S, K);
    out.active.resize(S, K);

    const Eigen::MatrixXd tilt = theta.size() > 0 ? Eigen::MatrixXd(window.signals * theta.transpose())
                                                  : Eigen::MatrixXd::Zero(S, K);
    const bool par = parallel_enabled(exec);
#pragma omp parallel for schedule(static) if (par)
    for (int s = 0; s < S; ++s) {
        const Eigen::VectorXd raw = benchmark + tilt.row(s).transpose();
        const Projection proj = project(raw, constraints);
        out.ref_weights.row(s) = proj.weights.transpose();
        if (mask_mode == MaskMode::AllActive)
            out.active.row(s).setOnes();
        else
            out.active.row(s) = proj.active.cast<double>().transpose();
    }
    return out;
}

Eigen::VectorXd frozen_returns(const FrozenPolicy& frozen, const Eigen::MatrixXd& theta,
                               const EstimationWindow& window) {
    const Eigen::MatrixXd w = frozen_weights(frozen, theta, window);
    return window.risk_free + (w.array() * window.excess_returns.array()).rowwise().sum().matrix();
}

double penalized_objective(const FrozenPolicy& frozen, const Eigen::MatrixXd& theta, const EstimationWindow& window,
                           const QuadraticPenalty* penalty, double gamma, ExecMode exec) {
    const Eigen::VectorXd rp = frozen_returns(frozen, theta, window);
    const int S = window.length();
    const int nc = num_chunks(S);
    std::vector<double> partial(nc, 0.0);
    const bool par = parallel_enabled(exec);
#pragma omp parallel for schedule(static) if (par)
    for (int c = 0; c < nc; ++c) {
        const int lo = c * kReduceChunk;
        const int hi = std::min(lo + kReduceChunk, S);
        double acc = 0.0;
        for (int s = lo; s < hi; ++s) acc += crra_extended(1.0 + rp(s), gamma);
        partial[c] = acc;
    }
    double total = 0.0;
    for (int c = 0; c < nc; ++c) total += partial[c];
    return total - penalty_value(penalty, theta);
}

Eigen::MatrixXd penalized_gradient(const FrozenPolicy& frozen, const Eigen::MatrixXd& theta,
                                   const EstimationWindow& window, const QuadraticPenalty* penalty, double gamma,
                                   ExecMode exec) {
    const Eigen::VectorXd rp = frozen_returns(frozen, theta, window);
    const int S = window.length();
    const int K = window.n_assets();
    const int L = window.n_signals();
    const int nc = num_chunks(S);
    std::vector<Eigen::MatrixXd> partial(nc);
    const bool par = parallel_enabled(exec);
#pragma omp parallel for schedule(static) if (par)
    for (int c = 0; c < nc; ++c) {
        const int lo = c * kReduceChunk;
        const int hi = std::min(lo + kReduceChunk, S);
        Eigen::MatrixXd coeff(hi - lo, K);  // rows: U' .* active .* excess
        for (int s = lo; s < hi; ++s) {
            const double u1 = crra_extended_marginal(1.0 + rp(s), gamma);
            coeff.row(s - lo) =
                u1 * (frozen.active.row(s).array() * window.excess_returns.row(s).array()).matrix();
        }
        partial[c] = coeff.transpose() * window.signals.middleRows(lo, hi - lo);
    }
    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(K, L);
    for (int c = 0; c < nc; ++c) grad += partial[c];
    if (penalty) grad.array() -= penalty->precision.array() * (theta - penalty->mean).array();
    return grad;
}

Eigen::MatrixXd curvature_matrix(const FrozenPolicy& frozen, const Eigen::MatrixXd& theta,
                                 const EstimationWindow& window, double gamma, bool use_mask, ExecMode exec) {
    const Eigen::VectorXd rp = frozen_returns(frozen, theta, window);
    const int S = window.length();
    const int K = window.n_assets();
    const int L = window.n_signals();
    const int nc = num_chunks(S);
    std::vector<Eigen::MatrixXd> partial(nc);
    const bool par = parallel_enabled(exec);
#pragma omp parallel for schedule(static) if (par)
    for (int c = 0; c < nc; ++c) {
        const int lo = c * kReduceChunk;
        const int hi = std::min(lo + kReduceChunk, S);
        Eigen::MatrixXd coeff(hi - lo, K);  // rows: c_s .* [active .*] excess^2
        for (int s = lo; s < hi; ++s) {
            const double cs = crra_extended_curvature(1.0 + rp(s), gamma);
            Eigen::ArrayXd row = cs * window.excess_returns.row(s).array().square();
            if (use_mask) row *= frozen.active.row(s).array();
            coeff.row(s - lo) = row.matrix();
        }
        partial[c] = coeff.transpose() * window.signals.middleRows(lo, hi - lo).array().square().matrix();
    }
    Eigen::MatrixXd curv = Eigen::MatrixXd::Zero(K, L);
    for (int c = 0; c < nc; ++c) curv += partial[c];
    return curv;
}

double penalized_objective_reference(const FrozenPolicy& frozen, const Eigen::MatrixXd& theta,
                                     const EstimationWindow& window, const QuadraticPenalty* penalty, double gamma) {
    const Eigen::MatrixXd delta = theta - frozen.theta_ref;
    double total = 0.0;
    for (int s = 0; s < window.length(); ++s) {
        double rp = window.risk_free(s);
        for (int k = 0; k < window.n_assets(); ++k) {
            double w = frozen.ref_weights(s, k);
            if (frozen.active(s, k) != 0.0) w += delta.row(k).dot(window.signals.row(s));
            rp += w * window.excess_returns(s, k);
        }
        total += crra_extended(1.0 + rp, gamma);
    }
    return total - penalty_value(penalty, theta);
}

Eigen::MatrixXd penalized_gradient_reference(const FrozenPolicy& frozen, const Eigen::MatrixXd& theta,
                                             const EstimationWindow& window, const QuadraticPenalty* penalty,
                                             double gamma) {
    const Eigen::VectorXd rp = frozen_returns(frozen, theta, window);
    Eigen::MatrixXd grad = Eigen::MatrixXd::Zero(theta.rows(), theta.cols());
    for (int s = 0; s < window.length(); ++s) {
        const double u1 = crra_extended_marginal(1.0 + rp(s), gamma);
        for (int k = 0; k < window.n_assets(); ++k) {
            if (frozen.active(s, k) == 0.0) continue;
            grad.row(k) += u1 * window.excess_returns(s, k) * window.signals.row(s);
        }
    }
    if (penalty) grad.array() -= penalty->precision.array() * (theta - penalty->mean).array();
    return grad;
}

Eigen::MatrixXd curvature_matrix_reference(const FrozenPolicy& frozen, const Eigen::MatrixXd& theta,
                                           const EstimationWindow& window, double gamma, bool use_mask) {
    const Eigen::VectorXd rp = frozen_returns(frozen, theta, window);
    Eigen::MatrixXd curv = Eigen::MatrixXd::Zero(theta.rows(), theta.cols());
    for (int s = 0; s < window.length(); ++s) {
        const double cs = crra_extended_curvature(1.0 + rp(s), gamma);
        for (int k = 0; k < window.n_assets(); ++k) {
            if (use_mask && frozen.active(s, k) == 0.0) continue;
            const double xk2 = window.excess_returns(s, k) * window.excess_returns(s, k);
            curv.row(k) += cs * xk2 * window.signals.row(s).array().square().matrix().transpose();
        }
    }
    return curv;
}

}  // namespace bppp
