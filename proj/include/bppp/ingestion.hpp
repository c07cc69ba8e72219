// ingestion.hpp
// Loads factor-return and signal panels from CSV (with percent-vs-decimal and
// sentinel handling), constructs the per-factor timing signals from return
// history, and generates seeded synthetic datasets with a known true policy
// for oracle testing.

#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bppp/panels.hpp"
#include "bppp/policy.hpp"

namespace bppp {

// Percent-vs-decimal heuristic: if any finite |value| exceeds 1 in a return
// file, the whole file is read as percent and divided by 100 (noted in
// `notices`). The -99.99 sentinel marks a missing cell and is checked before
// the heuristic. A column named RF (case-insensitive) becomes the risk-free
// series; without one the risk-free rate is zero, with a notice.
ReturnsPanel load_factors(const std::filesystem::path& path, std::vector<std::string>* notices = nullptr);

// Same sentinel handling; missing signal cells stay missing.
SignalPanel load_signals(const std::filesystem::path& path, std::vector<std::string>* notices = nullptr);

// Three timing signals per factor, from the factor's cumulative gross value
// index C (built from 1 + rf + excess starting at 1.0 unless supplied):
//   Val = -log(C_t / exp[(1/60) sum_{j=0..59} log C_{t-j}])
//   Rev = -(r_{t-1} - (1/36) sum_{j=0..35} r_{t-j})
//   Vol = -sqrt((12/11) * Var over the trailing 12 months of r)
// Months with insufficient history are missing, not errors. Names follow
// Val_<k>, Rev_<k>, Vol_<k> with k the factor index.
SignalPanel build_timing_signals(const ReturnsPanel& returns,
                                 const std::optional<Eigen::MatrixXd>& cum_index = std::nullopt);

struct SyntheticSpec {
    int n_assets = 3;
    int n_signals = 10;
    int n_months = 240;
    int n_active = 1;            // nonzero entries of the true policy
    double theta_scale = 0.05;   // magnitude of active entries
    double noise_scale = 0.03;   // sd of the return noise
    double mean_excess = 0.004;  // unconditional mean excess return
    double risk_free = 0.003;
    MonthCode start = 199001;
    std::uint64_t seed = 1;
};

struct SyntheticDataset {
    ReturnsPanel returns;
    SignalPanel signals;
    PolicyMatrix true_policy;  // benchmark = first asset
};

// Signals i.i.d. standard normal; excess returns mean_excess + theta* z_t
// plus Gaussian noise (returns at t+1 react to signals at t). Bit-reproducible
// from the seed; independent per-column streams.
SyntheticDataset synthetic_dataset(const SyntheticSpec& spec);

struct DataManifest {
    std::filesystem::path factors;
    std::filesystem::path signals;
    std::optional<MonthCode> first;
    std::optional<MonthCode> last;
};

DataManifest load_manifest(const std::filesystem::path& path);

}  // namespace bppp
