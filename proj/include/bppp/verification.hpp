// verification.hpp
// The numerical verification suite behind `verify-theory`: seeded experiment
// generators and the pass/fail checks for the posterior-averaging gap, its
// second-order approximation, and the variance decomposition.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bppp/theory.hpp"

namespace bppp {

struct TheoryCheck {
    std::string name;
    bool pass = false;
    double value = 0.0;      // measured quantity
    double threshold = 0.0;  // bound it was compared against
    std::string detail;
};

// Strictly concave CRRA experiment with a finite-support return model, sized
// so the gap estimate clears its Monte-Carlo error by a wide margin.
GapExperiment random_gap_experiment(std::uint64_t seed, int mc_draws = 4000);

// K=3, L=4 instance with a random PSD per-row covariance for the variance
// decomposition.
GapExperiment random_decomposition_experiment(std::uint64_t seed, int mc_draws = 20000);

struct TheorySuiteConfig {
    std::uint64_t seed = 7;
    int gap_experiments = 50;
    int quadratic_experiments = 10;
    int decomposition_experiments = 20;
    int mc_draws = 4000;
};

// Runs every check; a failed check keeps the suite going.
std::vector<TheoryCheck> run_theory_suite(const TheorySuiteConfig& config);

void write_theory_report(const std::filesystem::path& path, const std::vector<TheoryCheck>& checks);

}  // namespace bppp
