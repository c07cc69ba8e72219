#include "bppp/estimation.hpp"

#include <cmath>
#include <vector>

#include "bppp/rng.hpp"

namespace bppp {

namespace {

Eigen::Map<const Eigen::MatrixXd> as_matrix(const Eigen::VectorXd& x, Eigen::Index K, Eigen::Index L) {
    return Eigen::Map<const Eigen::MatrixXd>(x.data(), K, L);
}

}  // namespace

double map_objective(const Eigen::MatrixXd& theta, const EstimationWindow& window, const Eigen::VectorXd& benchmark,
                     const ConstraintSet& constraints, const QuadraticPenalty* penalty, double gamma,
                     MaskMode mask_mode, ExecMode exec) {
    if (window.length() < 2) throw DataError("map_objective: window length must be >= 2");
    const FrozenPolicy frozen = freeze_policy(theta, window, benchmark, constraints, mask_mode, exec);
    return penalized_objective(frozen, theta, window, penalty, gamma, exec);
}

Eigen::MatrixXd map_gradient(const Eigen::MatrixXd& theta, const EstimationWindow& window,
                             const Eigen::VectorXd& benchmark, const ConstraintSet& constraints,
                             const QuadraticPenalty* penalty, double gamma, MaskMode mask_mode, ExecMode exec) {
    if (window.length() < 2) throw DataError("map_gradient: window length must be >= 2");
    const FrozenPolicy frozen = freeze_policy(theta, window, benchmark, constraints, mask_mode, exec);
    return penalized_gradient(frozen, theta, window, penalty, gamma, exec);
}

PolicyMatrix solve_map(const EstimationWindow& window, const Eigen::VectorXd& benchmark,
                       const ConstraintSet& constraints, const QuadraticPenalty* penalty, double gamma,
                       const MapSolverConfig& config, SolveReport* report) {
    const Eigen::Index K = window.n_assets();
    const Eigen::Index L = window.n_signals();

    Eigen::MatrixXd theta0 = Eigen::MatrixXd::Zero(K, L);
    if (config.warm_start) {
        if (config.warm_start->rows() != K || config.warm_start->cols() != L)
            throw DataError("solve_map: warm start has the wrong shape");
        theta0 = *config.warm_start;
    } else if (penalty) {
        theta0 = penalty->mean;
    }

    if (L == 0) {  // nothing to estimate: the policy is the benchmark
        if (report) *report = {true, 0, 0.0, 0.0};
        return PolicyMatrix{theta0, benchmark};
    }

    FrozenPolicy frozen = freeze_policy(theta0, window, benchmark, constraints, config.mask_mode, config.exec);

    const auto fg = [&](const Eigen::VectorXd& x, Eigen::VectorXd* grad) -> double {
        const auto theta = as_matrix(x, K, L);
        const double value = penalized_objective(frozen, theta, window, penalty, gamma, config.exec);
        if (grad) {
            const Eigen::MatrixXd g = penalized_gradient(frozen, theta, window, penalty, gamma, config.exec);
            *grad = -Eigen::Map<const Eigen::VectorXd>(g.data(), g.size());
        }
        return -value;
    };
    const auto refreeze = [&](const Eigen::VectorXd& x) {
        frozen = freeze_policy(as_matrix(x, K, L), window, benchmark, constraints, config.mask_mode, config.exec);
    };

    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(theta0.data(), theta0.size());
    LbfgsOptions opt;
    opt.max_iterations = config.max_iterations;
    opt.gradient_tolerance = config.gradient_tolerance;
    opt.step_tolerance = config.step_tolerance;
    opt.memory_pairs = config.memory_pairs;
    const LbfgsReport rep = lbfgs_minimize(fg, x, opt, refreeze);
    if (report) *report = {rep.converged, rep.iterations, rep.gradient_norm, -rep.value};

    PolicyMatrix out;
    out.theta = Eigen::Map<const Eigen::MatrixXd>(x.data(), K, L);
    out.benchmark = benchmark;
    return out;
}

Eigen::MatrixXd laplace_variances(const Eigen::MatrixXd& theta_hat, const EstimationWindow& window,
                                  const Eigen::VectorXd& benchmark, const ConstraintSet& constraints, double nu,
                                  double gamma, MaskMode mask_mode, ExecMode exec) {
    if (!(nu > 0.0)) throw ConfigError("laplace_variances: nu must be positive");
    const FrozenPolicy frozen = freeze_policy(theta_hat, window, benchmark, constraints, mask_mode, exec);
    const Eigen::MatrixXd curv = curvature_matrix(frozen, theta_hat, window, gamma, /*use_mask=*/true, exec);
    return (curv.array() + 1.0 / nu).inverse().matrix();
}

Eigen::VectorXd bppp_weights(const PosteriorApprox& posterior, const Eigen::VectorXd& z,
                             const ConstraintSet& constraints, std::uint64_t rng_seed, ExecMode exec) {
    posterior.validate();
    const Eigen::MatrixXd& theta_hat = posterior.map_point.theta;
    const Eigen::VectorXd& benchmark = posterior.map_point.benchmark;
    const Eigen::Index K = theta_hat.rows();
    const Eigen::Index L = theta_hat.cols();
    const Eigen::MatrixXd noise_sd = posterior.variances.array().sqrt().matrix();
    const int M = posterior.draw_count;

    const int nc = num_chunks(M);
    std::vector<Eigen::VectorXd> partial(nc);
    const bool par = parallel_enabled(exec);
#pragma omp parallel for schedule(static) if (par)
    for (int c = 0; c < nc; ++c) {
        const int lo = c * kReduceChunk;
        const int hi = std::min(lo + kReduceChunk, M);
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(K);
        Eigen::MatrixXd eps(K, L);
        for (int m = lo; m < hi; ++m) {
            RngEngine rng = make_stream(rng_seed, static_cast<std::uint64_t>(m));
            std::normal_distribution<double> normal(0.0, 1.0);
            for (Eigen::Index l = 0; l < L; ++l)
                for (Eigen::Index k = 0; k < K; ++k) eps(k, l) = noise_sd(k, l) * normal(rng);
            const Eigen::VectorXd w = benchmark + (theta_hat + eps) * z;
            acc += project(w, constraints).weights;
        }
        partial[c] = acc;
    }
    Eigen::VectorXd mean_w = Eigen::VectorXd::Zero(K);
    for (int c = 0; c < nc; ++c) mean_w += partial[c];
    mean_w /= static_cast<double>(M);
    return project(mean_w, constraints).weights;
}

}  // namespace bppp
