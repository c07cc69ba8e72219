#include <doctest.h>

#include "bppp/kernels.hpp"
#include "helpers.hpp"

using namespace bppp;
using namespace bppp::testing;

namespace {

double rel_diff(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-12}); }

double rel_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
    const double scale = std::max(a.array().abs().maxCoeff(), 1e-12);
    return (a - b).array().abs().maxCoeff() / scale;
}

}  // namespace

TEST_CASE("production kernels match the serial reference") {
    const ConstraintSet constraints{};
    for (const std::uint64_t seed : {1ull, 2ull, 3ull, 4ull}) {
        const int S = 150 + static_cast<int>(seed) * 37;  // straddles chunk boundaries
        const EstimationWindow w = random_window(seed, S, 4, 6);
        const Eigen::VectorXd benchmark = unit_benchmark(4);
        const Eigen::MatrixXd theta_ref = random_theta(seed + 10, 4, 6, 0.2);  // big enough to clip sometimes
        const Eigen::MatrixXd theta = theta_ref + random_theta(seed + 20, 4, 6, 0.02);
        QuadraticPenalty penalty = QuadraticPenalty::gaussian(Eigen::MatrixXd::Zero(4, 6), 0.01);

        const FrozenPolicy frozen = freeze_policy(theta_ref, w, benchmark, constraints);
        for (const ExecMode exec : {ExecMode::Serial, ExecMode::Parallel}) {
            CHECK(rel_diff(penalized_objective(frozen, theta, w, &penalty, 5.0, exec),
                           penalized_objective_reference(frozen, theta, w, &penalty, 5.0)) <= 1e-12);
            CHECK(rel_diff(penalized_gradient(frozen, theta, w, &penalty, 5.0, exec),
                           penalized_gradient_reference(frozen, theta, w, &penalty, 5.0)) <= 1e-12);
            CHECK(rel_diff(curvature_matrix(frozen, theta, w, 5.0, true, exec),
                           curvature_matrix_reference(frozen, theta, w, 5.0, true)) <= 1e-12);
            CHECK(rel_diff(curvature_matrix(frozen, theta, w, 5.0, false, exec),
                           curvature_matrix_reference(frozen, theta, w, 5.0, false)) <= 1e-12);
        }
    }
}

TEST_CASE("serial and parallel production kernels agree bitwise") {
    const ConstraintSet constraints{};
    const EstimationWindow w = random_window(9, 321, 3, 5);
    const Eigen::VectorXd benchmark = unit_benchmark(3);
    const Eigen::MatrixXd theta = random_theta(29, 3, 5, 0.1);
    const FrozenPolicy frozen = freeze_policy(theta, w, benchmark, constraints);
    const double a = penalized_objective(frozen, theta, w, nullptr, 5.0, ExecMode::Serial);
    const double b = penalized_objective(frozen, theta, w, nullptr, 5.0, ExecMode::Parallel);
    CHECK(a == b);
    const Eigen::MatrixXd ga = penalized_gradient(frozen, theta, w, nullptr, 5.0, ExecMode::Serial);
    const Eigen::MatrixXd gb = penalized_gradient(frozen, theta, w, nullptr, 5.0, ExecMode::Parallel);
    CHECK((ga - gb).array().abs().maxCoeff() == 0.0);
}

TEST_CASE("frozen gradient matches finite differences of the frozen objective") {
    const ConstraintSet constraints{};
    const EstimationWindow w = random_window(42, 60, 3, 4);
    const Eigen::VectorXd benchmark = unit_benchmark(3);
    const Eigen::MatrixXd theta0 = random_theta(43, 3, 4, 0.15);
    QuadraticPenalty penalty = QuadraticPenalty::gaussian(random_theta(44, 3, 4, 0.01), 0.005);

    const FrozenPolicy frozen = freeze_policy(theta0, w, benchmark, constraints);
    const Eigen::MatrixXd grad = penalized_gradient(frozen, theta0, w, &penalty, 5.0);
    const double h = 1e-6;
    for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 4; ++l) {
            Eigen::MatrixXd up = theta0, dn = theta0;
            up(k, l) += h;
            dn(k, l) -= h;
            const double fd = (penalized_objective(frozen, up, w, &penalty, 5.0) -
                               penalized_objective(frozen, dn, w, &penalty, 5.0)) /
                              (2.0 * h);
            CHECK(grad(k, l) == doctest::Approx(fd).epsilon(1e-6));
        }
}

TEST_CASE("gradient respects the straight-through mask") {
    // Clip asset 0 at every date: its utility gradient vanishes and only the
    // penalty term survives.
    const ConstraintSet constraints{};
    EstimationWindow w = random_window(7, 40, 2, 3);
    Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(2, 3);
    theta(0, 0) = 50.0;  // raw weight far beyond the position cap for every z
    w.signals.col(0).array() = w.signals.col(0).array().abs() + 0.5;

    const Eigen::VectorXd benchmark = unit_benchmark(2);
    QuadraticPenalty penalty = QuadraticPenalty::gaussian(Eigen::MatrixXd::Zero(2, 3), 0.01);
    const FrozenPolicy frozen = freeze_policy(theta, w, benchmark, constraints);
    REQUIRE(frozen.active.col(0).sum() == 0.0);

    const Eigen::MatrixXd grad = penalized_gradient(frozen, theta, w, &penalty, 5.0);
    const Eigen::MatrixXd penalty_only = (-(theta - penalty.mean).array() * penalty.precision.array()).matrix();
    CHECK((grad.row(0) - penalty_only.row(0)).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("all-active mask switch passes gradients through the projection") {
    const ConstraintSet constraints{};
    EstimationWindow w = random_window(8, 30, 2, 2);
    Eigen::MatrixXd theta = Eigen::MatrixXd::Zero(2, 2);
    theta(0, 0) = 50.0;
    const Eigen::VectorXd benchmark = unit_benchmark(2);
    const FrozenPolicy frozen = freeze_policy(theta, w, benchmark, constraints, MaskMode::AllActive);
    CHECK(frozen.active.minCoeff() == 1.0);
    const Eigen::MatrixXd grad = penalized_gradient(frozen, theta, w, nullptr, 5.0);
    CHECK(grad.row(0).lpNorm<Eigen::Infinity>() > 0.0);
}
