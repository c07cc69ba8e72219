#include "bppp/panels.hpp"

#include <algorithm>
#include <cmath>

#include "bppp/csv.hpp"

namespace bppp {

namespace {

void check_monthly_axis(const std::vector<MonthCode>& dates, const char* what) {
    if (dates.empty()) throw DataError(std::string(what) + ": empty date axis");
    for (const MonthCode d : dates)
        if (!is_valid_month(d)) throw DataError(std::string(what) + ": invalid month code " + std::to_string(d));
    for (size_t i = 1; i < dates.size(); ++i) {
        if (dates[i] <= dates[i - 1])
            throw DataError(std::string(what) + ": dates not strictly increasing at " + std::to_string(dates[i]));
        if (dates[i] != next_month(dates[i - 1]))
            throw DataError(std::string(what) + ": monthly gap between " + std::to_string(dates[i - 1]) + " and " +
                            std::to_string(dates[i]));
    }
}

std::string range_string(const std::vector<MonthCode>& dates) {
    return std::to_string(dates.front()) + ".." + std::to_string(dates.back());
}

}  // namespace

ReturnsPanel::ReturnsPanel(std::vector<MonthCode> dates, Eigen::MatrixXd excess_returns, Eigen::VectorXd risk_free,
                           std::vector<std::string> asset_names)
    : dates_(std::move(dates)),
      excess_(std::move(excess_returns)),
      risk_free_(std::move(risk_free)),
      names_(std::move(asset_names)) {
    check_monthly_axis(dates_, "returns panel");
    const auto T = static_cast<Eigen::Index>(dates_.size());
    if (excess_.rows() != T || risk_free_.size() != T)
        throw DataError("returns panel: row count mismatch between dates, returns and risk-free series");
    if (names_.size() != static_cast<size_t>(excess_.cols()))
        throw DataError("returns panel: asset name count does not match column count");
    for (Eigen::Index t = 0; t < T; ++t) {
        if (!std::isfinite(risk_free_(t)))
            throw DataError("returns panel: missing/non-finite risk-free rate at " + std::to_string(dates_[t]));
        for (Eigen::Index k = 0; k < excess_.cols(); ++k) {
            const double r = excess_(t, k);
            if (!std::isfinite(r))
                throw DataError("returns panel: missing/non-finite return at " + std::to_string(dates_[t]) +
                                " column " + names_[static_cast<size_t>(k)]);
            if (1.0 + risk_free_(t) + r <= 0.0)
                throw DataError("returns panel: nonpositive gross return at " + std::to_string(dates_[t]) +
                                " column " + names_[static_cast<size_t>(k)]);
        }
    }
}

ReturnsPanel ReturnsPanel::slice(int first_row, int n_rows) const {
    std::vector<MonthCode> d(dates_.begin() + first_row, dates_.begin() + first_row + n_rows);
    return ReturnsPanel(std::move(d), excess_.middleRows(first_row, n_rows), risk_free_.segment(first_row, n_rows),
                        names_);
}

SignalPanel::SignalPanel(std::vector<MonthCode> dates, Eigen::MatrixXd raw, std::vector<std::string> signal_names)
    : dates_(std::move(dates)), raw_(std::move(raw)), names_(std::move(signal_names)) {
    check_monthly_axis(dates_, "signal panel");
    if (raw_.rows() != static_cast<Eigen::Index>(dates_.size()))
        throw DataError("signal panel: row count mismatch between dates and values");
    if (names_.size() != static_cast<size_t>(raw_.cols()))
        throw DataError("signal panel: signal name count does not match column count");
    for (Eigen::Index t = 0; t < raw_.rows(); ++t)
        for (Eigen::Index l = 0; l < raw_.cols(); ++l) {
            const double v = raw_(t, l);
            if (!std::isnan(v) && !std::isfinite(v))
                throw DataError("signal panel: infinite value at " + std::to_string(dates_[t]) + " column " +
                                names_[static_cast<size_t>(l)]);
        }
}

SignalPanel SignalPanel::slice(int first_row, int n_rows) const {
    std::vector<MonthCode> d(dates_.begin() + first_row, dates_.begin() + first_row + n_rows);
    return SignalPanel(std::move(d), raw_.middleRows(first_row, n_rows), names_);
}

std::pair<ReturnsPanel, SignalPanel> align(const ReturnsPanel& returns, const SignalPanel& signals) {
    const MonthCode first = std::max(returns.dates().front(), signals.dates().front());
    const MonthCode last = std::min(returns.dates().back(), signals.dates().back());
    if (month_diff(first, last) < 0)
        throw AlignmentError("no overlapping months between returns " + range_string(returns.dates()) +
                             " and signals " + range_string(signals.dates()));
    const int n = month_diff(first, last) + 1;
    const int r0 = month_diff(returns.dates().front(), first);
    const int s0 = month_diff(signals.dates().front(), first);
    return {returns.slice(r0, n), signals.slice(s0, n)};
}

void save_returns(const std::filesystem::path& path, const ReturnsPanel& panel) {
    CsvTable t;
    t.columns = panel.asset_names();
    t.columns.push_back("RF");
    t.dates = panel.dates();
    t.values.resize(panel.length());
    for (int r = 0; r < panel.length(); ++r) {
        auto& row = t.values[r];
        row.resize(panel.n_assets() + 1);
        for (int k = 0; k < panel.n_assets(); ++k) row[k] = panel.excess()(r, k);
        row[panel.n_assets()] = panel.risk_free()(r);
    }
    write_csv_table(path, t);
}

void save_signals(const std::filesystem::path& path, const SignalPanel& panel) {
    CsvTable t;
    t.columns = panel.signal_names();
    t.dates = panel.dates();
    t.values.resize(panel.length());
    for (int r = 0; r < panel.length(); ++r) {
        auto& row = t.values[r];
        row.resize(panel.n_signals());
        for (int l = 0; l < panel.n_signals(); ++l) row[l] = panel.raw()(r, l);
    }
    write_csv_table(path, t);
}

ReturnsPanel load_returns_csv(const std::filesystem::path& path) {
    const CsvTable t = read_csv_table(path);
    int rf_col = -1;
    for (size_t c = 0; c < t.columns.size(); ++c) {
        std::string lc = t.columns[c];
        std::transform(lc.begin(), lc.end(), lc.begin(), [](unsigned char ch) { return std::tolower(ch); });
        if (lc == "rf" || lc == "risk_free") rf_col = static_cast<int>(c);
    }
    const int K = static_cast<int>(t.columns.size()) - (rf_col >= 0 ? 1 : 0);
    const int T = static_cast<int>(t.dates.size());
    Eigen::MatrixXd excess(T, K);
    Eigen::VectorXd rf = Eigen::VectorXd::Zero(T);
    std::vector<std::string> names;
    for (size_t c = 0; c < t.columns.size(); ++c)
        if (static_cast<int>(c) != rf_col) names.push_back(t.columns[c]);
    for (int r = 0; r < T; ++r) {
        int k = 0;
        for (size_t c = 0; c < t.columns.size(); ++c) {
            if (static_cast<int>(c) == rf_col)
                rf(r) = t.values[r][c];
            else
                excess(r, k++) = t.values[r][c];
        }
    }
    return ReturnsPanel(t.dates, std::move(excess), std::move(rf), std::move(names));
}

SignalPanel load_signals_csv(const std::filesystem::path& path) {
    const CsvTable t = read_csv_table(path);
    const int T = static_cast<int>(t.dates.size());
    const int L = static_cast<int>(t.columns.size());
    Eigen::MatrixXd raw(T, L);
    for (int r = 0; r < T; ++r)
        for (int l = 0; l < L; ++l) raw(r, l) = t.values[r][l];
    return SignalPanel(t.dates, std::move(raw), t.columns);
}

}  // namespace bppp
