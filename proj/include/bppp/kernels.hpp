// kernels.hpp
// Per-date sum kernels behind the MAP objective, its straight-through
// gradient and the Laplace curvature diagonal.
//
// All evaluation happens against a FrozenPolicy captured at a reference
// policy: coordinates the projection touched at the reference stay frozen at
// their projected values, active coordinates move one-for-one with theta.
// At theta == theta_ref the frozen values coincide with the true projected
// objective/straight-through gradient; within a line search the reference
// stays fixed so the surrogate is smooth.
//
// Production kernels reduce over fixed 64-date chunks and accumulate the
// partials in chunk order: results are bitwise reproducible for any thread
// count. The *_reference functions are naive serial loops kept for tests and
// the benchmark.

#pragma once

#include <Eigen/Dense>

#include "bppp/parallel.hpp"
#include "bppp/policy.hpp"
#include "bppp/window.hpp"

namespace bppp {

// How the straight-through mask is formed: from the projection (coordinates
// untouched by it), or passing gradients through everywhere.
enum class MaskMode { FromProjection, AllActive };

struct FrozenPolicy {
    Eigen::MatrixXd theta_ref;    // K x L reference point
    Eigen::MatrixXd ref_weights;  // S x K projected weights at the reference
    Eigen::MatrixXd active;       // S x K, 1.0 where the gradient flows
};

// 1/2 * sum_kl precision_kl * (theta_kl - mean_kl)^2; the log-prior term of
// the MAP objective. A null penalty means a flat prior (plain PPP).
struct QuadraticPenalty {
    Eigen::MatrixXd mean;
    Eigen::MatrixXd precision;

    static QuadraticPenalty gaussian(const Eigen::MatrixXd& mean, double nu) {
        return {mean, Eigen::MatrixXd::Constant(mean.rows(), mean.cols(), 1.0 / nu)};
    }
};

FrozenPolicy freeze_policy(const Eigen::MatrixXd& theta, const EstimationWindow& window,
                           const Eigen::VectorXd& benchmark, const ConstraintSet& constraints,
                           MaskMode mask_mode = MaskMode::FromProjection, ExecMode exec = ExecMode::Parallel);

// Net portfolio returns r_p per date implied by the frozen policy at theta.
Eigen::VectorXd frozen_returns(const FrozenPolicy& frozen, const Eigen::MatrixXd& theta,
                               const EstimationWindow& window);

// sum_s U(1 + r_p,s) - penalty, with the linearly extended CRRA branch so a
// domain breach yields a large finite penalty rather than an exception.
double penalized_objective(const FrozenPolicy& frozen, const Eigen::MatrixXd& theta, const EstimationWindow& window,
                           const QuadraticPenalty* penalty, double gamma, ExecMode exec = ExecMode::Parallel);

// d/dtheta_kl = sum_s U'(1+r_p,s) * x_{s+1,k} * z_{s,l} * 1{k active at s}
//             - precision_kl * (theta_kl - mean_kl),
// where x is the excess return entering the portfolio-return product.
Eigen::MatrixXd penalized_gradient(const FrozenPolicy& frozen, const Eigen::MatrixXd& theta,
                                   const EstimationWindow& window, const QuadraticPenalty* penalty, double gamma,
                                   ExecMode exec = ExecMode::Parallel);

// sum_s c_s * x_{s+1,k}^2 * z_{s,l}^2 [* 1{k active at s}], the utility part
// of the Hessian diagonal; c_s = -U'' at the date-s portfolio return.
Eigen::MatrixXd curvature_matrix(const FrozenPolicy& frozen, const Eigen::MatrixXd& theta,
                                 const EstimationWindow& window, double gamma, bool use_mask,
                                 ExecMode exec = ExecMode::Parallel);

// Serial reference implementations (straight per-date loops).
double penalized_objective_reference(const FrozenPolicy& frozen, const Eigen::MatrixXd& theta,
                                     const EstimationWindow& window, const QuadraticPenalty* penalty, double gamma);
Eigen::MatrixXd penalized_gradient_reference(const FrozenPolicy& frozen, const Eigen::MatrixXd& theta,
                                             const EstimationWindow& window, const QuadraticPenalty* penalty,
                                             double gamma);
Eigen::MatrixXd curvature_matrix_reference(const FrozenPolicy& frozen, const Eigen::MatrixXd& theta,
                                           const EstimationWindow& window, double gamma, bool use_mask);

}  // namespace bppp
