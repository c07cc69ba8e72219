#include "bppp/backtest.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <limits>

#include "bppp/csv.hpp"
#include "bppp/prior.hpp"
#include "bppp/rng.hpp"
#include "bppp/window.hpp"

namespace bppp {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Trailing 12-month mean of the benchmark excess return, as the default
// single momentum signal.
Eigen::MatrixXd benchmark_momentum_column(const ReturnsPanel& returns, const Eigen::VectorXd& benchmark) {
    const int T = returns.length();
    Eigen::MatrixXd col = Eigen::MatrixXd::Constant(T, 1, kNaN);
    const Eigen::VectorXd bench_excess = returns.excess() * benchmark;
    for (int t = 11; t < T; ++t) col(t, 0) = bench_excess.segment(t - 11, 12).mean();
    return col;
}

struct MomentSummary {
    double kappa_mean = kNaN;
    double kappa_median = kNaN;
    double kappa_below_03 = kNaN;
};

MomentSummary summarize_kappa(const Eigen::MatrixXd& k) {
    std::vector<double> v(k.data(), k.data() + k.size());
    std::sort(v.begin(), v.end());
    MomentSummary s;
    s.kappa_mean = k.mean();
    s.kappa_median = v.size() % 2 == 1 ? v[v.size() / 2] : 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
    s.kappa_below_03 =
        static_cast<double>(std::count_if(v.begin(), v.end(), [](double x) { return x < 0.3; })) / v.size();
    return s;
}

}  // namespace

std::string strategy_name(Strategy s) {
    switch (s) {
        case Strategy::Benchmark: return "benchmark";
        case Strategy::MeanVariance: return "mean_variance";
        case Strategy::SimpleMomentum: return "simple_momentum";
        case Strategy::PPP: return "ppp";
        case Strategy::BPPP: return "bppp";
        case Strategy::Horseshoe: return "horseshoe";
    }
    throw ConfigError("unknown strategy");
}

Strategy parse_strategy(const std::string& name) {
    std::string n = name;
    std::transform(n.begin(), n.end(), n.begin(), [](unsigned char c) { return std::tolower(c); });
    if (n == "benchmark" || n == "market") return Strategy::Benchmark;
    if (n == "mean_variance" || n == "mean-variance" || n == "mv") return Strategy::MeanVariance;
    if (n == "simple_momentum" || n == "simple-momentum" || n == "momentum") return Strategy::SimpleMomentum;
    if (n == "ppp") return Strategy::PPP;
    if (n == "bppp") return Strategy::BPPP;
    if (n == "horseshoe" || n == "hs") return Strategy::Horseshoe;
    throw ConfigError("unknown strategy: " + name);
}

void BacktestConfig::validate(int n_assets, int n_signals) const {
    if (initial_window < 24) throw ConfigError("initial_window must be >= 24");
    if (!(gamma >= 0.0)) throw ConfigError("gamma must be >= 0");
    if (!(delta > 0.0)) throw ConfigError("delta must be > 0");
    if (draws < 1) throw ConfigError("draws must be >= 1");
    if (benchmark_asset < 0 || benchmark_asset >= n_assets) throw ConfigError("benchmark_asset out of range");
    if (mv_window < 2) throw ConfigError("mv_window must be >= 2");
    constraints.validate();
    (void)n_signals;
}

Eigen::VectorXd turnover_series(const Eigen::MatrixXd& weights_path, const Eigen::MatrixXd& realized_excess,
                                const Eigen::VectorXd& realized_rf, bool drift) {
    const auto n = weights_path.rows();
    if (n < 2) throw DataError("turnover_series: need a path of length >= 2");
    if (realized_excess.rows() < n - 1 || realized_rf.size() < n - 1)
        throw DataError("turnover_series: realized returns shorter than the weight path");
    Eigen::VectorXd out(n - 1);
    for (Eigen::Index i = 1; i < n; ++i) {
        Eigen::VectorXd prev = weights_path.row(i - 1).transpose();
        if (drift) {
            const double rf = realized_rf(i - 1);
            const Eigen::VectorXd growth =
                (1.0 + rf + realized_excess.row(i - 1).transpose().array()).matrix();
            const double portfolio_growth = 1.0 + rf + prev.dot(realized_excess.row(i - 1).transpose());
            prev = (prev.array() * growth.array() / portfolio_growth).matrix();
        }
        out(i - 1) = (weights_path.row(i).transpose() - prev).lpNorm<1>();
    }
    return out;
}

Eigen::VectorXd apply_costs(const Eigen::VectorXd& gross_returns, const Eigen::VectorXd& turnover, double tc_bps) {
    if (gross_returns.size() != turnover.size()) throw DataError("apply_costs: series are not aligned");
    return gross_returns - (tc_bps / 1e4) * turnover;
}

BacktestResult run_backtest(const BacktestConfig& config, const ReturnsPanel& returns_in,
                            const SignalPanel& signals_in) {
    auto [returns, signals_aligned] = align(returns_in, signals_in);
    const int T = returns.length();
    const int K = returns.n_assets();
    config.validate(K, signals_aligned.n_signals());
    if (T - 1 <= config.initial_window)
        throw DataError("backtest: aligned sample must be longer than the initial window");

    Eigen::VectorXd benchmark = Eigen::VectorXd::Zero(K);
    benchmark(config.benchmark_asset) = 1.0;

    // SimpleMomentum is the point-estimation policy restricted to a single
    // momentum signal.
    SignalPanel signals = signals_aligned;
    if (config.strategy == Strategy::SimpleMomentum) {
        if (!config.momentum_signal.empty()) {
            const auto& names = signals_aligned.signal_names();
            const auto it = std::find(names.begin(), names.end(), config.momentum_signal);
            if (it == names.end()) throw ConfigError("momentum_signal not found: " + config.momentum_signal);
            const auto col = static_cast<int>(it - names.begin());
            signals = SignalPanel(signals_aligned.dates(), signals_aligned.raw().col(col),
                                  {config.momentum_signal});
        } else {
            signals = SignalPanel(signals_aligned.dates(), benchmark_momentum_column(returns, benchmark),
                                  {"benchmark_momentum_12m"});
        }
    }
    const int L = signals.n_signals();

    const int T0 = config.initial_window;
    const int N = T - 1 - T0;

    BacktestResult result;
    result.strategy = config.strategy;
    result.asset_names = returns.asset_names();
    result.tc_bps = config.tc_bps;
    result.dates.resize(N);
    result.weights.resize(N, K);
    result.gross_returns.resize(N);
    result.risk_free.resize(N);
    result.theta_fro = Eigen::VectorXd::Zero(N);
    result.theta_mean_abs = Eigen::VectorXd::Zero(N);
    result.tilt_norm = Eigen::VectorXd::Zero(N);
    result.diagnostics.resize(N);

    Eigen::MatrixXd theta_prev = Eigen::MatrixXd::Zero(K, L);
    HorseshoeState hs_state;
    if (config.strategy == Strategy::Horseshoe && L > 0) hs_state = HorseshoeState::initial(K, L, config.horseshoe);
    Eigen::VectorXd prev_weights = benchmark;
    const double sigma_theta = L > 0 ? tilt_sigma(config.delta, L) : 0.0;

    for (int i = 0; i < N; ++i) {
        const int t = T0 + i;
        DateDiagnostics& diag = result.diagnostics[i];
        diag.date = returns.dates()[t];
        diag.kappa_mean = diag.kappa_median = diag.kappa_below_03 = kNaN;
        result.dates[i] = returns.dates()[t];

        Eigen::VectorXd w = prev_weights;
        try {
            switch (config.strategy) {
                case Strategy::Benchmark: {
                    w = benchmark;
                    break;
                }
                case Strategy::MeanVariance: {
                    // Rolling tangency rule scaled by 1/gamma, then projected
                    // onto the shared constraints.
                    const int m = std::min(config.mv_window, t);
                    const Eigen::MatrixXd sample = returns.excess().middleRows(t - m + 1, m);
                    const Eigen::VectorXd mu = sample.colwise().mean();
                    const Eigen::MatrixXd centered = sample.rowwise() - mu.transpose();
                    const Eigen::MatrixXd cov = centered.transpose() * centered / (m - 1);
                    const double gamma_mv = std::max(config.gamma, 1e-6);
                    const Eigen::VectorXd raw = cov.ldlt().solve(mu) / gamma_mv;
                    const double residual = (cov * (gamma_mv * raw) - mu).norm();
                    if (!raw.allFinite() || residual > 1e-8 * std::max(mu.norm(), 1.0))
                        throw DataError("mean-variance solve failed (singular covariance)");
                    w = project(raw, config.constraints).weights;
                    break;
                }
                case Strategy::SimpleMomentum:
                case Strategy::PPP:
                case Strategy::BPPP:
                case Strategy::Horseshoe: {
                    if (L == 0) {  // no tilts possible: the policy is the benchmark
                        w = benchmark;
                        break;
                    }
                    Eigen::VectorXd z_t;
                    const EstimationWindow window = build_window(returns, signals, t, config.sample_std, &z_t);

                    MapSolverConfig solver = config.solver;
                    solver.warm_start = theta_prev;

                    Eigen::MatrixXd theta_hat;
                    SolveReport rep;
                    const Eigen::MatrixXd prior_mean =
                        config.dynamic_prior_mean ? theta_prev : Eigen::MatrixXd::Zero(K, L);

                    if (config.strategy == Strategy::Horseshoe) {
                        HorseshoeState state0 = hs_state;
                        state0.theta = theta_prev;
                        const HorseshoeFit fit = fit_horseshoe(window, prior_mean, state0, benchmark,
                                                               config.constraints, config.gamma, config.horseshoe,
                                                               solver);
                        theta_hat = fit.theta_hat.theta;
                        hs_state = fit.state;
                        rep.converged = fit.converged;
                        rep.iterations = fit.sweeps;
                        const MomentSummary ks = summarize_kappa(kappa(hs_state, window.signal_norms()));
                        diag.kappa_mean = ks.kappa_mean;
                        diag.kappa_median = ks.kappa_median;
                        diag.kappa_below_03 = ks.kappa_below_03;
                    } else if (config.strategy == Strategy::BPPP) {
                        const double nu = config.nu_override > 0.0
                                              ? config.nu_override
                                              : effective_prior_variance(sigma_theta, window.length(), L);
                        const QuadraticPenalty penalty = QuadraticPenalty::gaussian(prior_mean, nu);
                        theta_hat =
                            solve_map(window, benchmark, config.constraints, &penalty, config.gamma, solver, &rep)
                                .theta;
                    } else {  // flat-prior point estimation
                        theta_hat =
                            solve_map(window, benchmark, config.constraints, nullptr, config.gamma, solver, &rep)
                                .theta;
                    }
                    diag.converged = rep.converged;
                    diag.iterations = rep.iterations;
                    diag.gradient_norm = rep.gradient_norm;

                    if (config.strategy == Strategy::BPPP || config.strategy == Strategy::Horseshoe) {
                        PosteriorApprox post;
                        post.map_point = PolicyMatrix{theta_hat, benchmark};
                        post.draw_count = config.degenerate_draws ? 1 : config.draws;
                        if (config.degenerate_draws) {
                            post.variances = Eigen::MatrixXd::Zero(K, L);
                        } else if (config.strategy == Strategy::Horseshoe) {
                            post.variances = horseshoe_laplace_variances(theta_hat, window, hs_state, benchmark,
                                                                         config.constraints, config.gamma,
                                                                         solver.exec);
                        } else {
                            const double nu = config.nu_override > 0.0
                                                  ? config.nu_override
                                                  : effective_prior_variance(sigma_theta, window.length(), L);
                            post.variances = laplace_variances(theta_hat, window, benchmark, config.constraints,
                                                               nu, config.gamma, solver.mask_mode, solver.exec);
                        }
                        w = bppp_weights(post, z_t, config.constraints,
                                         mix_seed(config.seed, static_cast<std::uint64_t>(i)), solver.exec);
                    } else {
                        w = project(raw_weights(theta_hat, benchmark, z_t), config.constraints).weights;
                    }

                    theta_prev = theta_hat;
                    result.theta_fro(i) = theta_hat.norm();
                    result.theta_mean_abs(i) = theta_hat.size() > 0 ? theta_hat.array().abs().mean() : 0.0;
                    result.tilt_norm(i) = (theta_hat * z_t).norm();
                    break;
                }
            }
            diag.estimation_ok = true;
        } catch (const std::exception&) {
            diag.estimation_ok = false;  // carry the previous weights forward
            w = prev_weights;
        }

        result.weights.row(i) = w.transpose();
        prev_weights = w;
        result.risk_free(i) = returns.risk_free()(t + 1);
        result.gross_returns(i) = portfolio_return(w, returns.excess().row(t + 1).transpose(), result.risk_free(i));
    }

    // Turnover at formation i >= 1 drifts the previous weights by the returns
    // realized in between; the initial position carries no trading charge.
    result.turnover = Eigen::VectorXd::Zero(N);
    if (N >= 2) {
        const Eigen::MatrixXd realized_excess = returns.excess().middleRows(T0 + 1, N);
        const Eigen::VectorXd realized_rf = returns.risk_free().segment(T0 + 1, N);
        result.turnover.tail(N - 1) =
            turnover_series(result.weights, realized_excess, realized_rf, config.drift_turnover);
    }

    result.net_returns.resize(N, static_cast<Eigen::Index>(config.tc_bps.size()));
    for (size_t c = 0; c < config.tc_bps.size(); ++c)
        result.net_returns.col(static_cast<Eigen::Index>(c)) =
            apply_costs(result.gross_returns, result.turnover, config.tc_bps[c]);

    return result;
}

void write_backtest_result(const std::filesystem::path& dir, const BacktestResult& result) {
    std::filesystem::create_directories(dir);
    const int N = static_cast<int>(result.dates.size());

    CsvTable weights;
    weights.columns = result.asset_names;
    weights.dates = result.dates;
    weights.values.assign(N, std::vector<double>(result.asset_names.size()));
    for (int i = 0; i < N; ++i)
        for (int k = 0; k < result.weights.cols(); ++k) weights.values[i][k] = result.weights(i, k);
    write_csv_table(dir / "weights.csv", weights);

    CsvTable rets;
    rets.columns.push_back("gross");
    rets.columns.push_back("risk_free");
    for (const double tc : result.tc_bps) {
        std::string label = std::to_string(tc);
        label.erase(label.find_last_not_of('0') + 1);
        if (!label.empty() && label.back() == '.') label.pop_back();
        rets.columns.push_back("net_" + label + "bps");
    }
    rets.dates = result.dates;
    rets.values.assign(N, std::vector<double>(rets.columns.size()));
    for (int i = 0; i < N; ++i) {
        rets.values[i][0] = result.gross_returns(i);
        rets.values[i][1] = result.risk_free(i);
        for (int c = 0; c < result.net_returns.cols(); ++c) rets.values[i][2 + c] = result.net_returns(i, c);
    }
    write_csv_table(dir / "returns.csv", rets);

    CsvTable turn;
    turn.columns = {"turnover"};
    turn.dates = result.dates;
    turn.values.assign(N, std::vector<double>(1));
    for (int i = 0; i < N; ++i) turn.values[i][0] = result.turnover(i);
    write_csv_table(dir / "turnover.csv", turn);

    CsvTable theta;
    theta.columns = {"theta_fro_norm", "theta_mean_abs", "tilt_norm"};
    theta.dates = result.dates;
    theta.values.assign(N, std::vector<double>(3));
    for (int i = 0; i < N; ++i) {
        theta.values[i][0] = result.theta_fro(i);
        theta.values[i][1] = result.theta_mean_abs(i);
        theta.values[i][2] = result.tilt_norm(i);
    }
    write_csv_table(dir / "theta_summary.csv", theta);

    CsvTable diag;
    diag.columns = {"estimation_ok", "converged", "iterations", "gradient_norm",
                    "kappa_mean",    "kappa_median", "kappa_below_0.3"};
    diag.dates = result.dates;
    diag.values.assign(N, std::vector<double>(diag.columns.size()));
    for (int i = 0; i < N; ++i) {
        const DateDiagnostics& d = result.diagnostics[i];
        diag.values[i] = {d.estimation_ok ? 1.0 : 0.0, d.converged ? 1.0 : 0.0, static_cast<double>(d.iterations),
                          d.gradient_norm,             d.kappa_mean,            d.kappa_median,
                          d.kappa_below_03};
    }
    write_csv_table(dir / "diagnostics.csv", diag);
}

}  // namespace bppp
