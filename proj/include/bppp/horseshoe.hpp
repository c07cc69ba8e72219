// horseshoe.hpp
// Regularized-horseshoe estimation of the policy matrix: coordinate ascent
// over (theta, sigma^2, tau, lambda), shrinkage-factor diagnostics, and the
// matching diagonal Laplace variances.

#pragma once

#include <Eigen/Dense>

#include "bppp/estimation.hpp"
#include "bppp/policy.hpp"
#include "bppp/window.hpp"

namespace bppp {

// Which residual feeds the sigma^2 update: per-asset residuals of the
// policy-scaled linear predictor theta*z against realized excess returns
// (default), or the squared gap between the projected-rule and raw-rule
// portfolio returns.
enum class ResidualConvention { AssetPredictor, PortfolioGap };

struct HorseshoeConfig {
    double slab_c = 1.0;
    double rho = 0.9;   // blend weight of the tau update
    double p0 = 0.0;    // expected active signals; <= 0 means auto
    int max_sweeps = 50;
    double tolerance = 1e-5;
    ResidualConvention residual = ResidualConvention::AssetPredictor;

    // min(L/2, max(10, L/10)), kept strictly inside (0, L).
    static double default_p0(int n_signals);
};

struct HorseshoeState {
    Eigen::MatrixXd theta;   // K x L
    Eigen::MatrixXd lambda;  // K x L local scales
    double tau = 1.0;        // global scale
    double sigma2 = 1.0;     // residual variance
    double slab_c = 1.0;
    double p0 = 10.0;
    double rho = 0.9;

    static HorseshoeState initial(int n_assets, int n_signals, const HorseshoeConfig& config);
    void validate(int n_signals) const;
};

struct HorseshoeFit {
    PolicyMatrix theta_hat;
    HorseshoeState state;
    bool converged = false;
    int sweeps = 0;
};

// lambda_tilde^2 = c^2 lambda^2 tau^2 / (c^2 + lambda^2 tau^2), elementwise;
// always in (0, c^2).
Eigen::MatrixXd regularized_variance(const Eigen::MatrixXd& lambda, double tau, double slab_c);

// tau_0 = p0/(L - p0) * sigma/sqrt(T).
double tau_pv(double p0, int n_signals, double sigma, int window_length);

// Coordinate ascent: (i) theta-step maximizes mean utility minus
// (1/2T) sum (theta-M)^2/lambda_tilde^2 with analytic gradients; (ii) sigma^2
// from the residual convention; (iii) tau blended toward tau_pv;
// (iv) lambda^2 <- |theta - M|/(sigma tau) + 1. Converged when the max change
// in theta, tau and lambda all fall below the tolerance.
HorseshoeFit fit_horseshoe(const EstimationWindow& window, const Eigen::MatrixXd& prior_mean,
                           const HorseshoeState& initial_state, const Eigen::VectorXd& benchmark,
                           const ConstraintSet& constraints, double gamma, const HorseshoeConfig& config,
                           const MapSolverConfig& solver);

// kappa_kl = 1 / (1 + lambda_tilde_kl^2 ||z_l||^2 / sigma^2) in (0, 1];
// near 0 the signal survives, near 1 it is shrunk to the prior mean.
Eigen::MatrixXd kappa(const HorseshoeState& state, const Eigen::VectorXd& signal_norms);

// v_kl = ( (1/K^2) sum_s c_s x_{s+1,k}^2 z_{s,l}^2 + 1/lambda_tilde_kl^2 )^{-1}
// with c_s the CRRA curvature at the MAP portfolio return.
Eigen::MatrixXd horseshoe_laplace_variances(const Eigen::MatrixXd& theta_hat, const EstimationWindow& window,
                                            const HorseshoeState& state, const Eigen::VectorXd& benchmark,
                                            const ConstraintSet& constraints, double gamma,
                                            ExecMode exec = ExecMode::Parallel);

}  // namespace bppp
