// panels.hpp
// Dated return and signal panels. Panels are immutable after construction
// (construction validates all invariants) and safe to share across workers.
//
// Conventions:
//   * dates are strictly increasing, monthly, gap-free;
//   * returns are decimal per month; excess returns and the risk-free rate
//     are stored separately, gross return of asset k is 1 + rf + excess_k;
//   * missing returns are an error, missing signals are NaN cells and are
//     resolved later by the per-window standardization step.

#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "bppp/types.hpp"

namespace bppp {

class ReturnsPanel {
  public:
    ReturnsPanel(std::vector<MonthCode> dates, Eigen::MatrixXd excess_returns, Eigen::VectorXd risk_free,
                 std::vector<std::string> asset_names);

    const std::vector<MonthCode>& dates() const { return dates_; }
    const Eigen::MatrixXd& excess() const { return excess_; }
    const Eigen::VectorXd& risk_free() const { return risk_free_; }
    const std::vector<std::string>& asset_names() const { return names_; }
    int length() const { return static_cast<int>(dates_.size()); }
    int n_assets() const { return static_cast<int>(excess_.cols()); }

    ReturnsPanel slice(int first_row, int n_rows) const;

  private:
    std::vector<MonthCode> dates_;
    Eigen::MatrixXd excess_;
    Eigen::VectorXd risk_free_;
    std::vector<std::string> names_;
};

class SignalPanel {
  public:
    SignalPanel(std::vector<MonthCode> dates, Eigen::MatrixXd raw, std::vector<std::string> signal_names);

    const std::vector<MonthCode>& dates() const { return dates_; }
    // NaN marks a missing cell.
    const Eigen::MatrixXd& raw() const { return raw_; }
    const std::vector<std::string>& signal_names() const { return names_; }
    int length() const { return static_cast<int>(dates_.size()); }
    int n_signals() const { return static_cast<int>(raw_.cols()); }

    SignalPanel slice(int first_row, int n_rows) const;

  private:
    std::vector<MonthCode> dates_;
    Eigen::MatrixXd raw_;
    std::vector<std::string> names_;
};

// Trims both panels to their common date range so the date axes are
// identical. Signal row t then pairs with return row t+1; the trailing
// signal row has no next-month return and is ignored by the pairing
// (n_pairs == length - 1). Aligning an aligned pair is a no-op.
std::pair<ReturnsPanel, SignalPanel> align(const ReturnsPanel& returns, const SignalPanel& signals);

inline int n_pairs(const ReturnsPanel& aligned_returns) { return aligned_returns.length() - 1; }

// CSV serialization (see csv.hpp for the format). Returns panels carry the
// risk-free series in a column named RF.
void save_returns(const std::filesystem::path& path, const ReturnsPanel& panel);
void save_signals(const std::filesystem::path& path, const SignalPanel& panel);
ReturnsPanel load_returns_csv(const std::filesystem::path& path);
SignalPanel load_signals_csv(const std::filesystem::path& path);

}  // namespace bppp
