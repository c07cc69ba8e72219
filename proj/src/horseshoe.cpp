#include "bppp/horseshoe.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace bppp {

namespace {

constexpr double kLambdaFloor = 1e-6;
constexpr double kTauFloor = 1e-8;
constexpr double kSigma2Floor = 1e-10;

double residual_variance(const Eigen::MatrixXd& theta, const EstimationWindow& window,
                         const Eigen::VectorXd& benchmark, const ConstraintSet& constraints,
                         ResidualConvention convention, ExecMode exec) {
    if (convention == ResidualConvention::AssetPredictor) {
        // Pooled MSE of the policy-scaled linear predictor theta*z against
        // realized excess returns.
        const Eigen::MatrixXd predicted = window.signals * theta.transpose();  // S x K
        const double mse = (window.excess_returns - predicted).array().square().mean();
        return std::max(mse, kSigma2Floor);
    }
    // Squared gap between the projected-rule and raw-rule portfolio returns.
    const FrozenPolicy frozen = freeze_policy(theta, window, benchmark, constraints, MaskMode::FromProjection, exec);
    const Eigen::VectorXd projected = frozen_returns(frozen, theta, window);
    const Eigen::MatrixXd raw_w =
        (window.signals * theta.transpose()).rowwise() + benchmark.transpose();  // S x K
    const Eigen::VectorXd raw =
        window.risk_free + (raw_w.array() * window.excess_returns.array()).rowwise().sum().matrix();
    const double mse = (projected - raw).array().square().mean();
    return std::max(mse, kSigma2Floor);
}

}  // namespace

double HorseshoeConfig::default_p0(int n_signals) {
    const double L = static_cast<double>(n_signals);
    return std::min(L / 2.0, std::max(10.0, L / 10.0));
}

HorseshoeState HorseshoeState::initial(int n_assets, int n_signals, const HorseshoeConfig& config) {
    HorseshoeState s;
    s.theta = Eigen::MatrixXd::Zero(n_assets, n_signals);
    s.lambda = Eigen::MatrixXd::Ones(n_assets, n_signals);
    // The global scale starts loose and is blended toward the calibration
    // target sweep by sweep; starting at the target would pin every
    // coefficient at the prior mean before the local scales can adapt.
    s.tau = 0.5;
    s.sigma2 = 1.0;
    s.slab_c = config.slab_c;
    s.rho = config.rho;
    s.p0 = config.p0 > 0.0 ? config.p0 : HorseshoeConfig::default_p0(n_signals);
    s.validate(n_signals);
    return s;
}

void HorseshoeState::validate(int n_signals) const {
    if ((lambda.array() <= 0.0).any()) throw ConfigError("horseshoe state: lambda must be positive");
    if (!(tau > 0.0)) throw ConfigError("horseshoe state: tau must be positive");
    if (!(sigma2 > 0.0)) throw ConfigError("horseshoe state: sigma2 must be positive");
    if (!(slab_c > 0.0)) throw ConfigError("horseshoe state: slab_c must be positive");
    if (!(rho > 0.0 && rho < 1.0)) throw ConfigError("horseshoe state: rho must lie in (0, 1)");
    if (!(p0 > 0.0 && p0 < static_cast<double>(n_signals)))
        throw ConfigError("horseshoe state: p0 must lie in (0, L)");
}

Eigen::MatrixXd regularized_variance(const Eigen::MatrixXd& lambda, double tau, double slab_c) {
    if (!(tau > 0.0) || !(slab_c > 0.0) || (lambda.array() <= 0.0).any())
        throw ConfigError("regularized_variance: inputs must be positive");
    const double c2 = slab_c * slab_c;
    const Eigen::ArrayXXd lt2 = lambda.array().square() * (tau * tau);
    return (c2 * lt2 / (c2 + lt2)).matrix();
}

double tau_pv(double p0, int n_signals, double sigma, int window_length) {
    if (!(p0 > 0.0) || p0 >= static_cast<double>(n_signals))
        throw ConfigError("tau_pv: requires 0 < p0 < L");
    if (window_length < 1) throw ConfigError("tau_pv: requires T >= 1");
    return p0 / (static_cast<double>(n_signals) - p0) * sigma / std::sqrt(static_cast<double>(window_length));
}

HorseshoeFit fit_horseshoe(const EstimationWindow& window, const Eigen::MatrixXd& prior_mean,
                           const HorseshoeState& initial_state, const Eigen::VectorXd& benchmark,
                           const ConstraintSet& constraints, double gamma, const HorseshoeConfig& config,
                           const MapSolverConfig& solver) {
    const int L = window.n_signals();
    initial_state.validate(L);
    const int T = window.length();

    HorseshoeFit fit;
    fit.state = initial_state;
    Eigen::MatrixXd theta = initial_state.theta;

    MapSolverConfig step_solver = solver;
    for (int sweep = 1; sweep <= config.max_sweeps; ++sweep) {
        fit.sweeps = sweep;
        const Eigen::MatrixXd theta_prev = theta;
        const double tau_prev = fit.state.tau;
        const Eigen::MatrixXd lambda_prev = fit.state.lambda;

        // (i) theta-step. In unaveraged form the penalty precision is exactly
        // 1/lambda_tilde^2 (the 1/T factors of the mean objective cancel).
        const Eigen::MatrixXd lt2 = regularized_variance(fit.state.lambda, fit.state.tau, fit.state.slab_c);
        QuadraticPenalty penalty{prior_mean, lt2.array().inverse().matrix()};
        step_solver.warm_start = theta;
        theta = solve_map(window, benchmark, constraints, &penalty, gamma, step_solver).theta;

        // (ii) residual variance.
        fit.state.sigma2 =
            std::max(residual_variance(theta, window, benchmark, constraints, config.residual, solver.exec),
                     kSigma2Floor);
        const double sigma = std::sqrt(fit.state.sigma2);

        // (iii) global scale blended toward the calibration target.
        const double target = tau_pv(fit.state.p0, L, sigma, T);
        fit.state.tau = std::max(fit.state.rho * fit.state.tau + (1.0 - fit.state.rho) * target, kTauFloor);

        // (iv) local scales: lambda^2 = |theta - M|/(sigma tau) + 1, so
        // lambda >= 1 by construction.
        fit.state.lambda = ((theta - prior_mean).array().abs() / (sigma * fit.state.tau) + 1.0)
                               .sqrt()
                               .max(kLambdaFloor)
                               .matrix();
        assert((fit.state.lambda.array() >= 1.0 - 1e-12).all());

        const double dtheta = (theta - theta_prev).array().abs().maxCoeff();
        const double dtau = std::abs(fit.state.tau - tau_prev);
        const double dlambda = (fit.state.lambda - lambda_prev).array().abs().maxCoeff();
        if (dtheta < config.tolerance && dtau < config.tolerance && dlambda < config.tolerance) {
            fit.converged = true;
            break;
        }
    }

    fit.state.theta = theta;
    fit.theta_hat = PolicyMatrix{theta, benchmark};
    return fit;
}

Eigen::MatrixXd kappa(const HorseshoeState& state, const Eigen::VectorXd& signal_norms) {
    if ((signal_norms.array() < 0.0).any()) throw DataError("kappa: signal norms must be nonnegative");
    const Eigen::MatrixXd lt2 = regularized_variance(state.lambda, state.tau, state.slab_c);
    Eigen::MatrixXd out(lt2.rows(), lt2.cols());
    for (Eigen::Index k = 0; k < lt2.rows(); ++k)
        for (Eigen::Index l = 0; l < lt2.cols(); ++l)
            out(k, l) = 1.0 / (1.0 + lt2(k, l) * signal_norms(l) / state.sigma2);
    return out;
}

Eigen::MatrixXd horseshoe_laplace_variances(const Eigen::MatrixXd& theta_hat, const EstimationWindow& window,
                                            const HorseshoeState& state, const Eigen::VectorXd& benchmark,
                                            const ConstraintSet& constraints, double gamma, ExecMode exec) {
    const FrozenPolicy frozen =
        freeze_policy(theta_hat, window, benchmark, constraints, MaskMode::FromProjection, exec);
    const Eigen::MatrixXd curv = curvature_matrix(frozen, theta_hat, window, gamma, /*use_mask=*/false, exec);
    const double K = static_cast<double>(window.n_assets());
    const Eigen::MatrixXd lt2 = regularized_variance(state.lambda, state.tau, state.slab_c);
    return (curv.array() / (K * K) + lt2.array().inverse()).inverse().matrix();
}

}  // namespace bppp
