// estimation.hpp
// Point estimation of the policy matrix (flat prior), MAP estimation under a
// Gaussian prior, the diagonal Laplace approximation around the MAP, and the
// posterior-averaged portfolio weights.

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>

#include "bppp/kernels.hpp"
#include "bppp/lbfgs.hpp"
#include "bppp/policy.hpp"
#include "bppp/prior.hpp"
#include "bppp/window.hpp"

namespace bppp {

struct MapSolverConfig {
    int max_iterations = 500;
    double gradient_tolerance = 1e-6;
    double step_tolerance = 1e-12;
    int memory_pairs = 10;
    std::optional<Eigen::MatrixXd> warm_start;
    MaskMode mask_mode = MaskMode::FromProjection;
    ExecMode exec = ExecMode::Parallel;
};

struct SolveReport {
    bool converged = false;
    int iterations = 0;
    double gradient_norm = 0.0;
    double objective = 0.0;
};

// MAP point plus per-coefficient diagonal Laplace variances.
struct PosteriorApprox {
    PolicyMatrix map_point;
    Eigen::MatrixXd variances;  // K x L, nonnegative
    int draw_count = 1000;

    void validate() const {
        if ((variances.array() < 0.0).any()) throw DataError("posterior variances must be nonnegative");
        if (draw_count < 1) throw DataError("draw_count must be >= 1");
    }
};

// Penalized sample-utility objective and its straight-through gradient,
// evaluated with the projection masks taken at theta itself. A null penalty
// is the flat-prior (plain point-estimation) objective.
double map_objective(const Eigen::MatrixXd& theta, const EstimationWindow& window, const Eigen::VectorXd& benchmark,
                     const ConstraintSet& constraints, const QuadraticPenalty* penalty, double gamma,
                     MaskMode mask_mode = MaskMode::FromProjection, ExecMode exec = ExecMode::Parallel);

Eigen::MatrixXd map_gradient(const Eigen::MatrixXd& theta, const EstimationWindow& window,
                             const Eigen::VectorXd& benchmark, const ConstraintSet& constraints,
                             const QuadraticPenalty* penalty, double gamma,
                             MaskMode mask_mode = MaskMode::FromProjection, ExecMode exec = ExecMode::Parallel);

// Maximizes the penalized objective by L-BFGS with analytic gradients; masks
// are recomputed at each accepted iterate and frozen within a line search.
// Deterministic given identical inputs and warm start.
PolicyMatrix solve_map(const EstimationWindow& window, const Eigen::VectorXd& benchmark,
                       const ConstraintSet& constraints, const QuadraticPenalty* penalty, double gamma,
                       const MapSolverConfig& config, SolveReport* report = nullptr);

// v_kl = [ sum_s c_s x_{s+1,k}^2 z_{s,l}^2 1{k active at s} + 1/nu ]^{-1},
// the inverse Hessian diagonal of the negative log posterior; entries lie in
// (0, nu].
Eigen::MatrixXd laplace_variances(const Eigen::MatrixXd& theta_hat, const EstimationWindow& window,
                                  const Eigen::VectorXd& benchmark, const ConstraintSet& constraints, double nu,
                                  double gamma, MaskMode mask_mode = MaskMode::FromProjection,
                                  ExecMode exec = ExecMode::Parallel);

// Averages the projected weights of draw_count policies drawn around the MAP
// with elementwise Gaussian noise of the given variances, then re-projects
// the average onto the constraint set. Deterministic given the seed; draws
// run on per-draw counter-seeded streams.
Eigen::VectorXd bppp_weights(const PosteriorApprox& posterior, const Eigen::VectorXd& z,
                             const ConstraintSet& constraints, std::uint64_t rng_seed,
                             ExecMode exec = ExecMode::Parallel);

}  // namespace bppp
