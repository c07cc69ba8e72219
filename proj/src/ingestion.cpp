#include "bppp/ingestion.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <limits>

#include <nlohmann/json.hpp>

#include "bppp/csv.hpp"
#include "bppp/rng.hpp"

namespace bppp {

namespace {

constexpr double kSentinel = -99.99;

bool is_sentinel(double v) { return std::abs(v - kSentinel) < 1e-9; }

void apply_sentinels_and_units(CsvTable& table, bool is_return_file, const std::filesystem::path& path,
                               std::vector<std::string>* notices) {
    double max_abs = 0.0;
    for (auto& row : table.values)
        for (auto& v : row) {
            if (std::isnan(v)) continue;
            if (is_sentinel(v)) {
                v = std::numeric_limits<double>::quiet_NaN();
                continue;
            }
            max_abs = std::max(max_abs, std::abs(v));
        }
    if (is_return_file && max_abs > 1.0) {
        for (auto& row : table.values)
            for (auto& v : row)
                if (!std::isnan(v)) v /= 100.0;
        if (notices)
            notices->push_back(path.string() + ": values exceed 1 in magnitude, interpreted as percent");
    }
}

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
    return s;
}

}  // namespace

ReturnsPanel load_factors(const std::filesystem::path& path, std::vector<std::string>* notices) {
    CsvTable table = read_csv_table(path);
    apply_sentinels_and_units(table, /*is_return_file=*/true, path, notices);

    int rf_col = -1;
    for (size_t c = 0; c < table.columns.size(); ++c) {
        const std::string lc = lower(table.columns[c]);
        if (lc == "rf" || lc == "risk_free") rf_col = static_cast<int>(c);
    }
    if (rf_col < 0 && notices)
        notices->push_back(path.string() + ": no RF column, risk-free rate set to zero");

    const int T = static_cast<int>(table.dates.size());
    const int K = static_cast<int>(table.columns.size()) - (rf_col >= 0 ? 1 : 0);
    Eigen::MatrixXd excess(T, K);
    Eigen::VectorXd rf = Eigen::VectorXd::Zero(T);
    std::vector<std::string> names;
    for (size_t c = 0; c < table.columns.size(); ++c)
        if (static_cast<int>(c) != rf_col) names.push_back(table.columns[c]);
    for (int r = 0; r < T; ++r) {
        int k = 0;
        for (size_t c = 0; c < table.columns.size(); ++c) {
            const double v = table.values[r][c];
            if (static_cast<int>(c) == rf_col)
                rf(r) = v;
            else
                excess(r, k++) = v;
        }
    }
    return ReturnsPanel(table.dates, std::move(excess), std::move(rf), std::move(names));
}

SignalPanel load_signals(const std::filesystem::path& path, std::vector<std::string>* notices) {
    CsvTable table = read_csv_table(path);
    apply_sentinels_and_units(table, /*is_return_file=*/false, path, notices);
    const int T = static_cast<int>(table.dates.size());
    const int L = static_cast<int>(table.columns.size());
    Eigen::MatrixXd raw(T, L);
    for (int r = 0; r < T; ++r)
        for (int l = 0; l < L; ++l) raw(r, l) = table.values[r][l];
    return SignalPanel(table.dates, std::move(raw), table.columns);
}

SignalPanel build_timing_signals(const ReturnsPanel& returns, const std::optional<Eigen::MatrixXd>& cum_index) {
    const int T = returns.length();
    const int K = returns.n_assets();
    constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

    Eigen::MatrixXd index;
    if (cum_index) {
        if (cum_index->rows() != T || cum_index->cols() != K)
            throw DataError("build_timing_signals: cumulative index has the wrong shape");
        index = *cum_index;
    } else {
        // Cumulative gross value per factor, base 1.0 at the first date. The
        // base cancels in the Val log-ratio.
        index.resize(T, K);
        for (int k = 0; k < K; ++k) {
            double c = 1.0;
            for (int t = 0; t < T; ++t) {
                c *= 1.0 + returns.risk_free()(t) + returns.excess()(t, k);
                index(t, k) = c;
            }
        }
    }

    Eigen::MatrixXd raw = Eigen::MatrixXd::Constant(T, 3 * K, kNaN);
    std::vector<std::string> names(3 * K);
    for (int k = 0; k < K; ++k) {
        names[k] = "Val_" + std::to_string(k);
        names[K + k] = "Rev_" + std::to_string(k);
        names[2 * K + k] = "Vol_" + std::to_string(k);
    }

    const Eigen::MatrixXd log_index = index.array().log();
    for (int k = 0; k < K; ++k) {
        for (int t = 0; t < T; ++t) {
            if (t >= 59) {  // Val: 60 months of index history including t
                double mean_log = 0.0;
                for (int j = 0; j < 60; ++j) mean_log += log_index(t - j, k);
                mean_log /= 60.0;
                raw(t, k) = -(log_index(t, k) - mean_log);
            }
            if (t >= 35) {  // Rev: previous-month return against its 36-month mean
                double mean_r = 0.0;
                for (int j = 0; j < 36; ++j) mean_r += returns.excess()(t - j, k);
                mean_r /= 36.0;
                raw(t, K + k) = -(returns.excess()(t - 1, k) - mean_r);
            }
            if (t >= 11) {  // Vol: trailing 12-month volatility, negated
                double mean_r = 0.0;
                for (int j = 0; j < 12; ++j) mean_r += returns.excess()(t - j, k);
                mean_r /= 12.0;
                double var = 0.0;
                for (int j = 0; j < 12; ++j) {
                    const double d = returns.excess()(t - j, k) - mean_r;
                    var += d * d;
                }
                var /= 12.0;
                raw(t, 2 * K + k) = -std::sqrt(var * 12.0 / 11.0);
            }
        }
    }
    return SignalPanel(returns.dates(), std::move(raw), std::move(names));
}

SyntheticDataset synthetic_dataset(const SyntheticSpec& spec) {
    if (spec.n_assets < 1 || spec.n_signals < 1 || spec.n_months < 60)
        throw ConfigError("synthetic_dataset: requires K >= 1, L >= 1, T >= 60");
    const int T = spec.n_months;
    const int K = spec.n_assets;
    const int L = spec.n_signals;

    std::vector<MonthCode> dates(T);
    for (int t = 0; t < T; ++t) dates[t] = add_months(spec.start, t);

    // Per-column streams keep generation order-independent.
    Eigen::MatrixXd signals(T, L);
    for (int l = 0; l < L; ++l) {
        RngEngine rng = make_stream(spec.seed, 1000 + static_cast<std::uint64_t>(l));
        std::normal_distribution<double> normal(0.0, 1.0);
        for (int t = 0; t < T; ++t) signals(t, l) = normal(rng);
    }

    // Active coefficients avoid the first asset (the benchmark allocation)
    // when possible, so the planted effect is visible to constrained policies
    // whose benchmark position sits at a cap.
    Eigen::MatrixXd theta_true = Eigen::MatrixXd::Zero(K, L);
    RngEngine placement = make_stream(spec.seed, 7);
    std::uniform_int_distribution<int> pick_k(K > 1 ? 1 : 0, K - 1), pick_l(0, L - 1);
    std::bernoulli_distribution flip(0.5);
    int placed = 0;
    const int placeable = (K > 1 ? K - 1 : 1) * L;
    while (placed < std::min(spec.n_active, placeable)) {
        const int k = pick_k(placement);
        const int l = pick_l(placement);
        if (theta_true(k, l) != 0.0) continue;
        theta_true(k, l) = flip(placement) ? spec.theta_scale : -spec.theta_scale;
        ++placed;
    }

    Eigen::MatrixXd excess(T, K);
    for (int k = 0; k < K; ++k) {
        RngEngine rng = make_stream(spec.seed, 2000 + static_cast<std::uint64_t>(k));
        std::normal_distribution<double> normal(0.0, 1.0);
        for (int t = 0; t < T; ++t) {
            double conditional = spec.mean_excess;
            if (t > 0) conditional += theta_true.row(k).dot(signals.row(t - 1));
            excess(t, k) = conditional + spec.noise_scale * normal(rng);
        }
    }
    Eigen::VectorXd rf = Eigen::VectorXd::Constant(T, spec.risk_free);

    std::vector<std::string> asset_names(K), signal_names(L);
    for (int k = 0; k < K; ++k) asset_names[k] = "asset_" + std::to_string(k);
    for (int l = 0; l < L; ++l) signal_names[l] = "signal_" + std::to_string(l);

    Eigen::VectorXd benchmark = Eigen::VectorXd::Zero(K);
    benchmark(0) = 1.0;

    SyntheticDataset out{ReturnsPanel(dates, std::move(excess), std::move(rf), std::move(asset_names)),
                         SignalPanel(dates, std::move(signals), std::move(signal_names)),
                         PolicyMatrix{std::move(theta_true), std::move(benchmark)}};
    return out;
}

DataManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open manifest: " + path.string());
    nlohmann::json j;
    in >> j;
    DataManifest m;
    if (!j.contains("factors") || !j.contains("signals"))
        throw DataError("manifest must list `factors` and `signals` paths: " + path.string());
    m.factors = j["factors"].get<std::string>();
    m.signals = j["signals"].get<std::string>();
    if (m.factors.is_relative()) m.factors = path.parent_path() / m.factors;
    if (m.signals.is_relative()) m.signals = path.parent_path() / m.signals;
    if (j.contains("first")) m.first = j["first"].get<int>();
    if (j.contains("last")) m.last = j["last"].get<int>();
    return m;
}

}  // namespace bppp
