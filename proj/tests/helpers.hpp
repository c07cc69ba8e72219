// Shared builders for the test suites.

#pragma once

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "bppp/ingestion.hpp"
#include "bppp/panels.hpp"
#include "bppp/window.hpp"

namespace bppp::testing {

// Random estimation window with standardized-looking signals and small
// monthly excess returns; scale keeps CRRA arguments comfortably positive.
inline EstimationWindow random_window(std::uint64_t seed, int S, int K, int L, double return_scale = 0.03) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    EstimationWindow w;
    w.signals.resize(S, L);
    w.excess_returns.resize(S, K);
    w.risk_free.resize(S);
    for (int s = 0; s < S; ++s) {
        for (int l = 0; l < L; ++l) w.signals(s, l) = normal(rng);
        for (int k = 0; k < K; ++k) w.excess_returns(s, k) = return_scale * normal(rng) + 0.004;
        w.risk_free(s) = 0.003;
    }
    return w;
}

inline Eigen::VectorXd unit_benchmark(int K) {
    Eigen::VectorXd b = Eigen::VectorXd::Zero(K);
    b(0) = 1.0;
    return b;
}

inline Eigen::MatrixXd random_theta(std::uint64_t seed, int K, int L, double scale = 0.05) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::MatrixXd t(K, L);
    for (int k = 0; k < K; ++k)
        for (int l = 0; l < L; ++l) t(k, l) = scale * normal(rng);
    return t;
}

inline std::vector<MonthCode> month_grid(MonthCode start, int n) {
    std::vector<MonthCode> d(n);
    for (int i = 0; i < n; ++i) d[i] = add_months(start, i);
    return d;
}

}  // namespace bppp::testing
