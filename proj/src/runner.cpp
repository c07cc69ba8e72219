#include "bppp/runner.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "bppp/analytics.hpp"
#include "bppp/csv.hpp"
#include "bppp/prior.hpp"

namespace bppp {

namespace {

std::string fixed(double v, int digits) {
    std::ostringstream ss;
    ss << std::fixed << std::setprecision(digits) << v;
    return ss.str();
}

std::string tc_label(double tc) {
    std::string label = std::to_string(tc);
    label.erase(label.find_last_not_of('0') + 1);
    if (!label.empty() && label.back() == '.') label.pop_back();
    return label + "bps";
}

// Column of net returns at the requested cost level; gross when absent.
Eigen::VectorXd net_at(const BacktestResult& r, double tc) {
    for (size_t c = 0; c < r.tc_bps.size(); ++c)
        if (std::abs(r.tc_bps[c] - tc) < 1e-12) return r.net_returns.col(static_cast<Eigen::Index>(c));
    return r.gross_returns;
}

struct PerformanceRow {
    std::string strategy;
    double mean_ann = 0.0, vol_ann = 0.0, sharpe_gross = 0.0, maxdd = 0.0, var95 = 0.0, cvar95 = 0.0;
    double turnover = 0.0, skew = 0.0, kurt = 0.0, sharpe_net = 0.0;
};

PerformanceRow performance_row(const BacktestResult& r) {
    PerformanceRow row;
    row.strategy = strategy_name(r.strategy);
    const Eigen::VectorXd total = r.gross_returns;
    const Eigen::VectorXd excess = r.excess_returns();
    row.mean_ann = total.mean() * 12.0 * 100.0;
    const double sd = std::sqrt((total.array() - total.mean()).square().sum() / (total.size() - 1));
    row.vol_ann = sd * std::sqrt(12.0) * 100.0;
    row.sharpe_gross = sharpe(excess);
    row.maxdd = drawdown_stats(total).max_drawdown * 100.0;
    const TailStats tails = tail_stats(total);
    row.var95 = tails.var95 * 100.0;
    row.cvar95 = tails.cvar95 * 100.0;
    row.skew = tails.skewness;
    row.kurt = tails.excess_kurtosis;
    row.turnover = r.turnover.mean();
    const Eigen::VectorXd net10 = net_at(r, 10.0);
    const Eigen::VectorXd net10_excess = net10 - r.risk_free;
    const double net_sd = std::sqrt((net10_excess.array() - net10_excess.mean()).square().sum() /
                                    (net10_excess.size() - 1));
    row.sharpe_net = net_sd > 0.0 ? sharpe(net10_excess) : row.sharpe_gross;
    return row;
}

void write_manifest(const RunSettings& settings, const std::vector<std::string>& notices) {
    nlohmann::json j;
    j["version"] = kProjectVersion;
    j["seed"] = settings.base.seed;
    nlohmann::json cfg;
    cfg["initial_window"] = settings.base.initial_window;
    cfg["gamma"] = settings.base.gamma;
    cfg["delta"] = settings.base.delta;
    cfg["dynamic_prior_mean"] = settings.base.dynamic_prior_mean;
    cfg["tc_bps"] = settings.base.tc_bps;
    cfg["draws"] = settings.base.draws;
    cfg["degenerate_draws"] = settings.base.degenerate_draws;
    cfg["nu_override"] = settings.base.nu_override;
    cfg["position_cap"] = settings.base.constraints.position_cap;
    cfg["gross_cap"] = settings.base.constraints.gross_cap;
    cfg["benchmark_asset"] = settings.base.benchmark_asset;
    cfg["sample_std"] = settings.base.sample_std;
    cfg["drift_turnover"] = settings.base.drift_turnover;
    cfg["mv_window"] = settings.base.mv_window;
    cfg["momentum_signal"] = settings.base.momentum_signal;
    cfg["max_iterations"] = settings.base.solver.max_iterations;
    cfg["gradient_tolerance"] = settings.base.solver.gradient_tolerance;
    cfg["memory_pairs"] = settings.base.solver.memory_pairs;
    cfg["mask_mode"] = settings.base.solver.mask_mode == MaskMode::FromProjection ? "projection" : "all_active";
    cfg["exec"] = settings.base.solver.exec == ExecMode::Parallel ? "parallel" : "serial";
    cfg["slab_c"] = settings.base.horseshoe.slab_c;
    cfg["rho"] = settings.base.horseshoe.rho;
    cfg["p0"] = settings.base.horseshoe.p0;
    cfg["max_sweeps"] = settings.base.horseshoe.max_sweeps;
    cfg["hs_tolerance"] = settings.base.horseshoe.tolerance;
    cfg["ce_gammas"] = settings.ce_gammas;
    j["config"] = cfg;
    nlohmann::json strategies = nlohmann::json::array();
    for (const Strategy s : settings.strategies) strategies.push_back(strategy_name(s));
    j["strategies"] = strategies;
    nlohmann::json data;
    if (settings.use_synthetic) {
        data["source"] = "synthetic";
        data["K"] = settings.synth.n_assets;
        data["L"] = settings.synth.n_signals;
        data["T"] = settings.synth.n_months;
        data["n_active"] = settings.synth.n_active;
        data["theta_scale"] = settings.synth.theta_scale;
        data["noise_scale"] = settings.synth.noise_scale;
        data["seed"] = settings.synth.seed;
    } else {
        data["source"] = "csv";
        data["factors"] = settings.factors_csv.string();
        data["signals"] = settings.signals_csv.string();
    }
    j["data"] = data;
    j["notices"] = notices;
    std::ofstream out(settings.out_dir / "run_manifest.json");
    out << j.dump(2) << '\n';
}

}  // namespace

std::pair<ReturnsPanel, SignalPanel> load_input_panels(const RunSettings& settings,
                                                       std::vector<std::string>* notices) {
    if (settings.use_synthetic) {
        const SyntheticDataset data = synthetic_dataset(settings.synth);
        return {data.returns, data.signals};
    }
    std::filesystem::path factors = settings.factors_csv;
    std::filesystem::path signals = settings.signals_csv;
    if (!settings.manifest.empty()) {
        const DataManifest m = load_manifest(settings.manifest);
        factors = m.factors;
        signals = m.signals;
    }
    if (factors.empty() || signals.empty())
        throw ConfigError("no data source: give --factors and --signals, a --manifest, or --synth");
    if (!std::filesystem::exists(factors)) throw DataError("factor file not found: " + factors.string());
    if (!std::filesystem::exists(signals)) throw DataError("signal file not found: " + signals.string());
    return {load_factors(factors, notices), load_signals(signals, notices)};
}

ExperimentOutcome run_experiment(const RunSettings& settings, const ReturnsPanel& returns,
                                 const SignalPanel& signals, bool write_output,
                                 const std::vector<std::string>& notices) {
    ExperimentOutcome outcome;
    for (const Strategy s : settings.strategies) {
        BacktestConfig cfg = settings.base;
        cfg.strategy = s;
        outcome.results.push_back(run_backtest(cfg, returns, signals));
    }

    // Market leg for the spanning/bootstrap reports.
    {
        BacktestConfig cfg = settings.base;
        cfg.strategy = Strategy::Benchmark;
        const BacktestResult bench = run_backtest(cfg, returns, signals);
        outcome.benchmark_excess = bench.excess_returns();
        outcome.dates = bench.dates;
    }

    if (!write_output) return outcome;
    std::filesystem::create_directories(settings.out_dir);

    for (const BacktestResult& r : outcome.results)
        write_backtest_result(settings.out_dir / strategy_name(r.strategy), r);

    // performance.csv and the markdown mirror.
    std::vector<std::vector<std::string>> perf_rows;
    std::ostringstream md;
    md << "# Backtest summary\n\n";
    md << "| Strategy | Mean (%) | Vol (%) | Sharpe | MaxDD (%) | VaR 95 (%) | CVaR 95 (%) | Turnover | Skew | "
          "Kurt. | Sharpe (net) |\n";
    md << "|---|---|---|---|---|---|---|---|---|---|---|\n";
    for (const BacktestResult& r : outcome.results) {
        const PerformanceRow row = performance_row(r);
        perf_rows.push_back({row.strategy, format_double(row.mean_ann), format_double(row.vol_ann),
                             format_double(row.sharpe_gross), format_double(row.maxdd), format_double(row.var95),
                             format_double(row.cvar95), format_double(row.turnover), format_double(row.skew),
                             format_double(row.kurt), format_double(row.sharpe_net)});
        md << "| " << row.strategy << " | " << fixed(row.mean_ann, 2) << " | " << fixed(row.vol_ann, 2) << " | "
           << fixed(row.sharpe_gross, 2) << " | " << fixed(row.maxdd, 2) << " | " << fixed(row.var95, 2) << " | "
           << fixed(row.cvar95, 2) << " | " << fixed(row.turnover, 2) << " | " << fixed(row.skew, 2) << " | "
           << fixed(row.kurt, 2) << " | " << fixed(row.sharpe_net, 2) << " |\n";
    }
    write_plain_csv(settings.out_dir / "performance.csv",
                    {"strategy", "mean_ann_pct", "vol_ann_pct", "sharpe", "maxdd_pct", "var95_pct", "cvar95_pct",
                     "turnover", "skew", "excess_kurtosis", "sharpe_net_10bps"},
                    perf_rows);

    // ce_gamma.csv: CE (%) per strategy per gamma.
    {
        std::vector<std::string> header = {"strategy"};
        for (const double g : settings.ce_gammas) header.push_back("gamma_" + format_double(g));
        std::vector<std::vector<std::string>> rows;
        for (const BacktestResult& r : outcome.results) {
            std::vector<std::string> row = {strategy_name(r.strategy)};
            for (const double g : settings.ce_gammas)
                row.push_back(format_double(certainty_equivalent(r.gross_returns, g) * 100.0));
            rows.push_back(row);
        }
        write_plain_csv(settings.out_dir / "ce_gamma.csv", header, rows);
    }

    // tests.csv: bootstrap Sharpe-difference and spanning regression vs market.
    {
        std::vector<std::vector<std::string>> rows;
        for (const BacktestResult& r : outcome.results) {
            if (r.strategy == Strategy::Benchmark) continue;
            std::vector<std::string> row(11, "");
            row[0] = strategy_name(r.strategy);
            try {
                const SharpeDiffTest sd =
                    sharpe_diff_test(r.excess_returns(), outcome.benchmark_excess, settings.base.seed);
                row[1] = format_double(sd.diff);
                row[2] = format_double(sd.bootstrap_se);
                row[3] = format_double(sd.t_stat);
                row[4] = format_double(sd.p_value);
                row[5] = std::to_string(sd.block_length);
            } catch (const DataError&) {  // sample too short for the bootstrap
            }
            try {
                const SpanningRegression sp = spanning_regression(r.excess_returns(), outcome.benchmark_excess);
                row[6] = format_double(sp.alpha_annual * 100.0);
                row[7] = format_double(sp.beta);
                row[8] = format_double(sp.t_alpha);
                row[9] = format_double(sp.p_value);
                row[10] = format_double(sp.r_squared);
            } catch (const DataError&) {
            }
            rows.push_back(row);
        }
        write_plain_csv(settings.out_dir / "tests.csv",
                        {"strategy", "sharpe_diff", "bootstrap_se", "t_stat", "p_value", "block_length",
                         "alpha_ann_pct", "beta", "t_alpha", "p_alpha", "r_squared"},
                        rows);
    }

    // subperiods.csv and rolling_sharpe.csv.
    {
        std::vector<std::vector<std::string>> rows;
        std::vector<std::vector<std::string>> rolling_rows;
        std::vector<std::string> rolling_header = {"date"};
        std::vector<RollingAndSubperiods> per_strategy;
        for (const BacktestResult& r : outcome.results) {
            per_strategy.push_back(rolling_and_subperiod(r.dates, r.excess_returns()));
            rolling_header.push_back(strategy_name(r.strategy));
            const auto& rs = per_strategy.back();
            for (const auto& seg : rs.decades)
                rows.push_back({strategy_name(r.strategy), seg.label, std::to_string(seg.first),
                                std::to_string(seg.last), std::to_string(seg.months),
                                seg.skipped ? "" : format_double(seg.sharpe), seg.skipped ? "1" : "0"});
            for (const auto& seg : rs.crises)
                rows.push_back({strategy_name(r.strategy), seg.label, std::to_string(seg.first),
                                std::to_string(seg.last), std::to_string(seg.months),
                                seg.skipped ? "" : format_double(seg.sharpe), seg.skipped ? "1" : "0"});
        }
        write_plain_csv(settings.out_dir / "subperiods.csv",
                        {"strategy", "segment", "first", "last", "months", "sharpe", "skipped"}, rows);
        if (!per_strategy.empty()) {
            const auto& dates = per_strategy.front().rolling_dates;
            for (size_t i = 0; i < dates.size(); ++i) {
                std::vector<std::string> row = {std::to_string(dates[i])};
                for (const auto& rs : per_strategy)
                    row.push_back(i < rs.rolling_dates.size() ? format_double(rs.rolling_sharpe(i)) : "");
                rolling_rows.push_back(row);
            }
        }
        write_plain_csv(settings.out_dir / "rolling_sharpe.csv", rolling_header, rolling_rows);
    }

    // tc_sweep.csv: one column per strategy x cost level.
    {
        std::vector<std::string> header = {"metric"};
        for (const BacktestResult& r : outcome.results)
            for (const double tc : r.tc_bps) header.push_back(strategy_name(r.strategy) + "_" + tc_label(tc));
        std::vector<std::string> sharpe_row = {"net_sharpe"}, ce_row = {"net_ce_pct"}, mean_row = {"net_mean_ann_pct"},
                                 vol_row = {"net_vol_ann_pct"};
        for (const BacktestResult& r : outcome.results)
            for (size_t c = 0; c < r.tc_bps.size(); ++c) {
                const Eigen::VectorXd net = r.net_returns.col(static_cast<Eigen::Index>(c));
                const Eigen::VectorXd net_excess = net - r.risk_free;
                const double sd = std::sqrt((net.array() - net.mean()).square().sum() / (net.size() - 1));
                sharpe_row.push_back(format_double(sd > 0.0 ? sharpe(net_excess) : 0.0));
                ce_row.push_back(format_double(certainty_equivalent(net, settings.base.gamma) * 100.0));
                mean_row.push_back(format_double(net.mean() * 12.0 * 100.0));
                vol_row.push_back(format_double(sd * std::sqrt(12.0) * 100.0));
            }
        write_plain_csv(settings.out_dir / "tc_sweep.csv", header, {sharpe_row, ce_row, mean_row, vol_row});
    }

    std::ofstream(settings.out_dir / "summary.md") << md.str();
    write_manifest(settings, notices);
    return outcome;
}

std::vector<SensitivityCell> run_sensitivity(const RunSettings& settings, const ReturnsPanel& returns,
                                             const SignalPanel& signals, const std::vector<double>& deltas,
                                             const std::vector<bool>& dynamic_settings) {
    if (deltas.empty() || dynamic_settings.empty()) throw ConfigError("sensitivity grid is empty");
    std::vector<SensitivityCell> cells;
    for (const double delta : deltas)
        for (const bool dynamic : dynamic_settings) {
            SensitivityCell cell;
            cell.delta = delta;
            cell.dynamic_prior_mean = dynamic;
            try {
                BacktestConfig cfg = settings.base;
                cfg.strategy = Strategy::BPPP;
                cfg.delta = delta;
                cfg.dynamic_prior_mean = dynamic;
                const BacktestResult r = run_backtest(cfg, returns, signals);
                cell.sharpe = sharpe(r.excess_returns());
                cell.ce = certainty_equivalent(r.gross_returns, cfg.gamma) * 100.0;
                cell.turnover = r.turnover.mean();
                cell.mean_tilt_norm = r.tilt_norm.mean();
                cell.mean_abs_theta = r.theta_mean_abs.mean();
            } catch (const std::exception& e) {
                cell.ok = false;
                cell.error = e.what();
            }
            cells.push_back(cell);
        }
    return cells;
}

void write_sensitivity_report(const std::filesystem::path& out_dir, const std::vector<SensitivityCell>& cells) {
    std::filesystem::create_directories(out_dir);
    std::vector<std::vector<std::string>> rows;
    std::ostringstream md;
    md << "# Prior sensitivity\n\n";
    md << "| delta | dynamic prior mean | Sharpe | CE (%) | Turnover | Mean tilt norm | Mean |theta| |\n";
    md << "|---|---|---|---|---|---|---|\n";
    for (const auto& c : cells) {
        rows.push_back({format_double(c.delta), c.dynamic_prior_mean ? "yes" : "no",
                        c.ok ? format_double(c.sharpe) : "", c.ok ? format_double(c.ce) : "",
                        c.ok ? format_double(c.turnover) : "", c.ok ? format_double(c.mean_tilt_norm) : "",
                        c.ok ? format_double(c.mean_abs_theta) : "", c.ok ? "" : c.error});
        md << "| " << fixed(c.delta, 2) << " | " << (c.dynamic_prior_mean ? "yes" : "no") << " | "
           << (c.ok ? fixed(c.sharpe, 3) : std::string("failed")) << " | " << (c.ok ? fixed(c.ce, 3) : "") << " | "
           << (c.ok ? fixed(c.turnover, 2) : "") << " | " << (c.ok ? fixed(c.mean_tilt_norm, 3) : "") << " | "
           << (c.ok ? fixed(c.mean_abs_theta, 4) : "") << " |\n";
    }
    write_plain_csv(out_dir / "sensitivity.csv",
                    {"delta", "dynamic_prior_mean", "sharpe", "ce_pct", "turnover", "mean_tilt_norm",
                     "mean_abs_theta", "error"},
                    rows);
    std::ofstream(out_dir / "sensitivity.md") << md.str();
}

PriorCalibration calibrate_prior(double delta, int n_signals, int window_length) {
    PriorCalibration out;
    out.sigma_theta = tilt_sigma(delta, n_signals);
    out.nu = effective_prior_variance(out.sigma_theta, window_length, n_signals);
    return out;
}

}  // namespace bppp
