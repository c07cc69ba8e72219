// theory.hpp
// Numerical verification harness for the posterior-averaging utility gap and
// the portfolio-variance decomposition. Used as an acceptance-test oracle and
// by the verify-theory CLI report.
//
// The object under study is G(theta) = E_R[ U(w(theta)' R) ] with the raw
// linear rule w(theta) = w_b + theta z. Finite-support return models keep the
// inner expectation exact so only the outer Monte-Carlo error remains.

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <variant>

#include "bppp/types.hpp"

namespace bppp {

enum class UtilityKind { Crra, Quadratic };

// Joint atoms: row a of `atoms` is a K-vector of gross returns with
// probability probs[a].
struct FiniteReturnModel {
    Eigen::VectorXd probs;
    Eigen::MatrixXd atoms;

    void validate() const;
    Eigen::VectorXd mean() const { return atoms.transpose() * probs; }
    Eigen::MatrixXd covariance() const;
};

// Independent per-asset Gaussian returns; evaluated by materializing
// inner_draws equal-weight atoms (common random numbers across policies).
struct GaussianReturnModel {
    Eigen::VectorXd mean;
    Eigen::VectorXd sd;
    int inner_draws = 2000;
};

struct GapExperiment {
    Eigen::MatrixXd policy_mean;  // posterior mean m, K x L
    Eigen::VectorXd benchmark;    // w_b
    Eigen::VectorXd signal;       // z

    // Posterior covariance of vec(theta): either iso_variance * I, or a full
    // (KL) x (KL) matrix. The variance-decomposition check instead uses the
    // row-separable structure below.
    bool isotropic = true;
    double iso_variance = 0.0;
    Eigen::MatrixXd full_cov;

    // Per-row L x L covariance (rows of theta i.i.d.); empty means
    // iso_variance * I. This is the separable structure under which
    // Var(theta z) = (z' Sigma z) I.
    Eigen::MatrixXd row_cov;

    std::variant<FiniteReturnModel, GaussianReturnModel> returns;
    UtilityKind utility = UtilityKind::Crra;
    double gamma = 5.0;
    int mc_draws = 4000;

    void validate() const;
};

struct GapEstimate {
    double gap = 0.0;        // G(m) - E_theta[G(theta)]
    double std_error = 0.0;  // outer Monte-Carlo standard error
    double utility_at_mean = 0.0;
};

// Outer Monte Carlo over posterior draws of theta; G per draw is exact for
// finite-support models. iso_variance == 0 (or a zero full_cov) gives a gap
// of exactly 0.
GapEstimate jensen_gap_mc(const GapExperiment& experiment, std::uint64_t seed);

// Same quantity, with the outer expectation evaluated by Gauss-Hermite
// quadrature over the (univariate Gaussian, per atom) policy-induced return.
// Deterministic; finite-support models only.
double jensen_gap_quadrature(const GapExperiment& experiment, int nodes = 64);

// Second-order approximation -1/2 tr(Hess G(m) Sigma), with the exact Hessian
// of G for finite-support models.
double gap_second_order(const GapExperiment& experiment);

// Closed form (gamma/2) z'Sigma z E||R||^2, exact for quadratic utility with
// isotropic posterior covariance.
double quadratic_gap_closed_form(const GapExperiment& experiment);

struct VarianceDecomposition {
    double total_mc = 0.0;          // Var of r_p over joint (theta, R) draws
    double market_mc = 0.0;         // E_theta[ Var_R(r_p | theta) ]
    double estimation_exact = 0.0;  // z'Sigma z * ||mu||^2
    double residual = 0.0;          // total - market - estimation
    double residual_se = 0.0;       // batch-means standard error
};

// Verifies Var(r_p) = E_theta[Var(r_p|theta)] + z'Sigma z ||mu||^2 under the
// row-separable covariance structure; the estimation term is exact and the
// other two are Monte Carlo with batch-means errors.
VarianceDecomposition variance_decomposition_check(const GapExperiment& experiment, std::uint64_t seed,
                                                   int batches = 20);

}  // namespace bppp
