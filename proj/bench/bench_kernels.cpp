// Benchmark: serial reference loops vs. the chunked production kernels (run
// serial and with OpenMP) on realistically sized windows, plus the
// posterior-draw averaging loop.

#include <chrono>
#include <cstdio>
#include <random>

#include "bppp/estimation.hpp"
#include "bppp/kernels.hpp"
#include "bppp/parallel.hpp"

using namespace bppp;

namespace {

EstimationWindow make_window(int S, int K, int L) {
    std::mt19937_64 rng(1234);
    std::normal_distribution<double> normal(0.0, 1.0);
    EstimationWindow w;
    w.signals.resize(S, L);
    w.excess_returns.resize(S, K);
    w.risk_free = Eigen::VectorXd::Constant(S, 0.003);
    for (int s = 0; s < S; ++s) {
        for (int l = 0; l < L; ++l) w.signals(s, l) = normal(rng);
        for (int k = 0; k < K; ++k) w.excess_returns(s, k) = 0.03 * normal(rng) + 0.004;
    }
    return w;
}

template <typename Fn>
double time_ms(int reps, Fn&& fn) {
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) fn();
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count() / reps;
}

void bench_case(int S, int K, int L, int reps) {
    const EstimationWindow w = make_window(S, K, L);
    Eigen::VectorXd benchmark = Eigen::VectorXd::Zero(K);
    benchmark(0) = 1.0;
    std::mt19937_64 rng(7);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd theta(K, L);
    for (int k = 0; k < K; ++k)
        for (int l = 0; l < L; ++l) theta(k, l) = 0.05 * normal(rng);
    const QuadraticPenalty penalty = QuadraticPenalty::gaussian(Eigen::MatrixXd::Zero(K, L), 0.01);
    const FrozenPolicy frozen = freeze_policy(theta, w, benchmark, ConstraintSet{});

    double sink = 0.0;
    const double obj_ref = time_ms(reps, [&] { sink += penalized_objective_reference(frozen, theta, w, &penalty, 5.0); });
    const double obj_ser =
        time_ms(reps, [&] { sink += penalized_objective(frozen, theta, w, &penalty, 5.0, ExecMode::Serial); });
    const double obj_par =
        time_ms(reps, [&] { sink += penalized_objective(frozen, theta, w, &penalty, 5.0, ExecMode::Parallel); });
    const double grad_ref =
        time_ms(reps, [&] { sink += penalized_gradient_reference(frozen, theta, w, &penalty, 5.0).sum(); });
    const double grad_ser = time_ms(
        reps, [&] { sink += penalized_gradient(frozen, theta, w, &penalty, 5.0, ExecMode::Serial).sum(); });
    const double grad_par = time_ms(
        reps, [&] { sink += penalized_gradient(frozen, theta, w, &penalty, 5.0, ExecMode::Parallel).sum(); });
    const double curv_ref =
        time_ms(reps, [&] { sink += curvature_matrix_reference(frozen, theta, w, 5.0, true).sum(); });
    const double curv_par =
        time_ms(reps, [&] { sink += curvature_matrix(frozen, theta, w, 5.0, true, ExecMode::Parallel).sum(); });

    PosteriorApprox post{PolicyMatrix{theta, benchmark}, Eigen::MatrixXd::Constant(K, L, 1e-4), 1000};
    const Eigen::VectorXd z = w.signals.row(S - 1).transpose();
    const double draws_ser =
        time_ms(std::max(reps / 4, 1), [&] { sink += bppp_weights(post, z, ConstraintSet{}, 3, ExecMode::Serial).sum(); });
    const double draws_par = time_ms(
        std::max(reps / 4, 1), [&] { sink += bppp_weights(post, z, ConstraintSet{}, 3, ExecMode::Parallel).sum(); });

    std::printf("S=%-5d K=%-3d L=%-4d threads=%d\n", S, K, L, hardware_threads());
    std::printf("  objective  ms/call: reference %8.4f  serial %8.4f  parallel %8.4f\n", obj_ref, obj_ser, obj_par);
    std::printf("  gradient   ms/call: reference %8.4f  serial %8.4f  parallel %8.4f\n", grad_ref, grad_ser,
                grad_par);
    std::printf("  curvature  ms/call: reference %8.4f  parallel %8.4f\n", curv_ref, curv_par);
    std::printf("  1000 draws ms/call: serial    %8.4f  parallel %8.4f\n", draws_ser, draws_par);
    if (sink == 0.12345) std::puts("sink");
}

}  // namespace

int main(int argc, char** argv) {
    int reps = 20;
    if (argc > 1) reps = std::max(1, std::atoi(argv[1]));
    bench_case(240, 3, 10, reps * 5);
    bench_case(725, 6, 242, reps);
    bench_case(2000, 4, 50, reps);
    return 0;
}
