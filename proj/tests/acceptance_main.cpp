// Acceptance suite: one pass/fail line per criterion, nonzero exit when any
// gating criterion fails.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "bppp/analytics.hpp"
#include "bppp/backtest.hpp"
#include "bppp/estimation.hpp"
#include "bppp/horseshoe.hpp"
#include "bppp/ingestion.hpp"
#include "bppp/prior.hpp"
#include "bppp/rng.hpp"
#include "bppp/runner.hpp"
#include "bppp/verification.hpp"
#include "bppp/window.hpp"

using namespace bppp;

namespace {

struct Criterion {
    std::string name;
    bool pass = false;
    bool informational = false;
    std::string detail;
};

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
    std::ostringstream ss;
    ss << v;
    return ss.str();
}

// ---------------------------------------------------------------------------
// 1. Analytic gradient vs. central finite differences, masks frozen:
//    relative error <= 1e-5 on >= 20 random instances (K<=4, L<=8, T<=60),
//    in under 10 seconds.
// ---------------------------------------------------------------------------
Criterion check_gradient_correctness() {
    Criterion c{"gradient matches finite differences (<=1e-5 rel, 20 instances, <10s)"};
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0.0;
    const ConstraintSet constraints{};
    for (int i = 0; i < 20; ++i) {
        RngEngine rng = make_stream(2024, i);
        std::uniform_int_distribution<int> pick_k(1, 4), pick_l(1, 8), pick_t(10, 60);
        std::normal_distribution<double> normal(0.0, 1.0);
        const int K = pick_k(rng), L = pick_l(rng), S = pick_t(rng);

        EstimationWindow w;
        w.signals.resize(S, L);
        w.excess_returns.resize(S, K);
        w.risk_free.resize(S);
        for (int s = 0; s < S; ++s) {
            for (int l = 0; l < L; ++l) w.signals(s, l) = normal(rng);
            for (int k = 0; k < K; ++k) w.excess_returns(s, k) = 0.03 * normal(rng) + 0.004;
            w.risk_free(s) = 0.003;
        }
        Eigen::VectorXd benchmark = Eigen::VectorXd::Zero(K);
        benchmark(0) = 1.0;
        Eigen::MatrixXd theta(K, L);
        for (int k = 0; k < K; ++k)
            for (int l = 0; l < L; ++l) theta(k, l) = 0.1 * normal(rng);
        const Eigen::MatrixXd mean = Eigen::MatrixXd::Zero(K, L);
        const QuadraticPenalty penalty = QuadraticPenalty::gaussian(mean, 0.01);

        const FrozenPolicy frozen = freeze_policy(theta, w, benchmark, constraints);
        const Eigen::MatrixXd grad = penalized_gradient(frozen, theta, w, &penalty, 5.0);
        const double h = 1e-6;
        double inst_worst = 0.0;
        for (int k = 0; k < K; ++k)
            for (int l = 0; l < L; ++l) {
                Eigen::MatrixXd up = theta, dn = theta;
                up(k, l) += h;
                dn(k, l) -= h;
                const double fd = (penalized_objective(frozen, up, w, &penalty, 5.0) -
                                   penalized_objective(frozen, dn, w, &penalty, 5.0)) /
                                  (2.0 * h);
                inst_worst = std::max(inst_worst, std::abs(grad(k, l) - fd));
            }
        worst = std::max(worst, inst_worst / std::max(grad.array().abs().maxCoeff(), 1e-8));
    }
    const double elapsed = seconds_since(t0);
    c.pass = worst <= 1e-5 && elapsed < 10.0;
    c.detail = "max rel err " + fmt(worst) + ", " + fmt(elapsed) + "s";
    return c;
}

// ---------------------------------------------------------------------------
// 2. Posterior-averaging gap, part 1: positive in 50/50 strictly concave
//    experiments; exactly 0 at zero covariance; within 3 SE of 0 under linear
//    utility. Under 60 seconds.
// ---------------------------------------------------------------------------
Criterion check_gap_positivity() {
    Criterion c{"utility gap: 50/50 positive, 0 at zero covariance, 0 within 3SE for gamma=0 (<60s)"};
    const auto t0 = std::chrono::steady_clock::now();
    int positive = 0;
    double min_ratio = 1e300;
    for (int i = 0; i < 50; ++i) {
        const GapExperiment exp = random_gap_experiment(mix_seed(31, i));
        const GapEstimate est = jensen_gap_mc(exp, mix_seed(32, i));
        if (est.gap > 0.0) ++positive;
        if (est.std_error > 0.0) min_ratio = std::min(min_ratio, est.gap / est.std_error);
    }
    GapExperiment degenerate = random_gap_experiment(99);
    degenerate.iso_variance = 0.0;
    const GapEstimate zero_est = jensen_gap_mc(degenerate, 7);
    GapExperiment linear = random_gap_experiment(55);
    linear.gamma = 0.0;
    const GapEstimate lin_est = jensen_gap_mc(linear, 8);
    const double elapsed = seconds_since(t0);
    const bool lin_ok = std::abs(lin_est.gap) <= 3.0 * lin_est.std_error;
    c.pass = positive == 50 && zero_est.gap == 0.0 && lin_ok && elapsed < 60.0;
    c.detail = std::to_string(positive) + "/50 positive (min gap/SE " + fmt(min_ratio) + "), zero-cov gap " +
               fmt(zero_est.gap) + ", gamma=0 |gap|/SE " +
               fmt(lin_est.std_error > 0 ? std::abs(lin_est.gap) / lin_est.std_error : 0.0) + ", " + fmt(elapsed) +
               "s";
    return c;
}

// ---------------------------------------------------------------------------
// 3. Part 2: quadratic utility with isotropic covariance matches
//    (gamma/2) z'Sigma z E||R||^2 within 3 SE, and the second-order error
//    shrinks at least quadratically down a 3-step covariance ladder.
// ---------------------------------------------------------------------------
Criterion check_second_order() {
    Criterion c{"second-order gap: closed form within 3SE, error ladder shrinks quadratically"};
    bool quad_ok = true;
    double worst_ratio = 0.0;
    for (int i = 0; i < 10; ++i) {
        GapExperiment exp = random_gap_experiment(mix_seed(61, i), 8000);
        exp.utility = UtilityKind::Quadratic;
        exp.gamma = 2.0;
        const GapEstimate est = jensen_gap_mc(exp, mix_seed(62, i));
        const double closed = quadratic_gap_closed_form(exp);
        const double ratio = est.std_error > 0.0 ? std::abs(est.gap - closed) / est.std_error : 0.0;
        worst_ratio = std::max(worst_ratio, ratio);
        quad_ok = quad_ok && ratio <= 3.0;
    }

    GapExperiment ladder = random_gap_experiment(77);
    ladder.gamma = 5.0;
    ladder.iso_variance = 0.0025;
    double errors[3];
    for (int step = 0; step < 3; ++step) {
        GapExperiment e = ladder;
        e.iso_variance = ladder.iso_variance / std::pow(2.0, step);
        errors[step] = std::abs(jensen_gap_quadrature(e) - gap_second_order(e));
    }
    const double r1 = errors[0] / std::max(errors[1], 1e-300);
    const double r2 = errors[1] / std::max(errors[2], 1e-300);
    c.pass = quad_ok && r1 >= 3.0 && r2 >= 3.0;
    c.detail = "max |gap-closed|/SE " + fmt(worst_ratio) + "; ladder ratios " + fmt(r1) + ", " + fmt(r2);
    return c;
}

// ---------------------------------------------------------------------------
// 4. Variance decomposition balances within 3 SE on 20 seeded K=3, L=4
//    instances.
// ---------------------------------------------------------------------------
Criterion check_variance_decomposition() {
    Criterion c{"variance decomposition: residual within 3SE on 20 instances (K=3, L=4)"};
    bool all = true;
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const GapExperiment exp = random_decomposition_experiment(mix_seed(81, i));
        const VarianceDecomposition d = variance_decomposition_check(exp, mix_seed(82, i));
        const double ratio = d.residual_se > 0.0 ? std::abs(d.residual) / d.residual_se : 0.0;
        worst = std::max(worst, ratio);
        all = all && ratio <= 3.0;
    }
    c.pass = all;
    c.detail = "max |residual|/SE " + fmt(worst);
    return c;
}

// ---------------------------------------------------------------------------
// 5. Flat-prior nesting: nu = 1e6 with degenerate draws reproduces the
//    point-estimate weight path within 1e-4 per weight on a K=3, L=10, T=240,
//    T0=60 synthetic dataset, in under 60 seconds.
// ---------------------------------------------------------------------------
Criterion check_flat_prior_nesting() {
    Criterion c{"flat-prior nesting: BPPP(nu=1e6, degenerate) = PPP path within 1e-4 (<60s)"};
    const auto t0 = std::chrono::steady_clock::now();
    SyntheticSpec spec;
    spec.n_assets = 3;
    spec.n_signals = 10;
    spec.n_months = 240;
    spec.seed = 2027;
    const SyntheticDataset data = synthetic_dataset(spec);

    BacktestConfig ppp;
    ppp.strategy = Strategy::PPP;
    ppp.initial_window = 60;
    ppp.solver.gradient_tolerance = 1e-8;
    BacktestConfig bppp = ppp;
    bppp.strategy = Strategy::BPPP;
    bppp.nu_override = 1e6;
    bppp.degenerate_draws = true;

    const BacktestResult a = run_backtest(ppp, data.returns, data.signals);
    const BacktestResult b = run_backtest(bppp, data.returns, data.signals);
    const double gap = (a.weights - b.weights).array().abs().maxCoeff();
    const double elapsed = seconds_since(t0);
    c.pass = gap <= 1e-4 && elapsed < 60.0;
    c.detail = "max weight gap " + fmt(gap) + " over " + std::to_string(a.dates.size()) + " dates, " +
               fmt(elapsed) + "s";
    return c;
}

// ---------------------------------------------------------------------------
// 6. Prior calibration: sigma_theta(0.35, 242) = 0.0225 +- 0.0001 and the
//    (delta, sigma_theta, nu) triples at T=726 round to the documented values.
// ---------------------------------------------------------------------------
Criterion check_prior_calibration() {
    Criterion c{"prior calibration: sigma_theta(0.35,242)=0.0225+-1e-4; T=726 triples exact at 4dp"};
    const auto round4 = [](double v) { return std::round(v * 1e4) / 1e4; };
    const double s35 = tilt_sigma(0.35, 242);
    bool ok = std::abs(s35 - 0.0225) <= 1e-4;
    const double expected[3][3] = {{0.20, 0.0129, 0.0005}, {0.35, 0.0225, 0.0015}, {0.50, 0.0321, 0.0031}};
    std::string detail = "sigma_theta(0.35,242)=" + fmt(s35);
    for (const auto& row : expected) {
        const PriorCalibration cal = calibrate_prior(row[0], 242, 726);
        const bool match = round4(cal.sigma_theta) == row[1] && round4(cal.nu) == row[2];
        ok = ok && match;
        detail += "; delta=" + fmt(row[0]) + " -> (" + fmt(round4(cal.sigma_theta)) + ", " + fmt(round4(cal.nu)) +
                  ")";
    }
    c.pass = ok;
    c.detail = detail;
    return c;
}

// ---------------------------------------------------------------------------
// 7. Horseshoe mechanics: kappa in (0,1] always; a planted sparse signal
//    drops below 0.5 while >=90% of noise coordinates stay higher, in at
//    least 16 of 20 seeds.
// ---------------------------------------------------------------------------
Criterion check_horseshoe_mechanics() {
    Criterion c{"horseshoe: kappa in (0,1]; planted signal survives in >=16/20 seeds"};
    int k_ok = 0;
    bool kappa_in_range = true;
    const int K = 3, L = 10, S = 600;
    for (int seed = 0; seed < 20; ++seed) {
        RngEngine rng = make_stream(4000, seed);
        std::normal_distribution<double> normal(0.0, 1.0);
        EstimationWindow w;
        w.signals.resize(S, L);
        w.excess_returns.resize(S, K);
        w.risk_free = Eigen::VectorXd::Constant(S, 0.003);
        for (int s = 0; s < S; ++s) {
            for (int l = 0; l < L; ++l) w.signals(s, l) = normal(rng);
            for (int k = 0; k < K; ++k) w.excess_returns(s, k) = 0.05 * normal(rng) + 0.004;
        }
        w.excess_returns.col(1) += 0.08 * w.signals.col(0);  // planted coordinate (1, 0)

        HorseshoeConfig cfg;
        cfg.p0 = 3.0;
        cfg.max_sweeps = 250;
        Eigen::VectorXd benchmark = Eigen::VectorXd::Zero(K);
        benchmark(0) = 1.0;
        const HorseshoeFit fit =
            fit_horseshoe(w, Eigen::MatrixXd::Zero(K, L), HorseshoeState::initial(K, L, cfg), benchmark,
                          ConstraintSet{100.0, 1000.0}, 5.0, cfg, MapSolverConfig{});
        const Eigen::MatrixXd kap = kappa(fit.state, w.signal_norms());
        kappa_in_range = kappa_in_range && (kap.array() > 0.0).all() && (kap.array() <= 1.0).all();

        int higher = 0, total = 0;
        for (int k = 0; k < K; ++k)
            for (int l = 0; l < L; ++l) {
                if (k == 1 && l == 0) continue;
                ++total;
                if (kap(k, l) > 0.5) ++higher;
            }
        if (kap(1, 0) < 0.5 && higher >= static_cast<int>(std::ceil(0.9 * total))) ++k_ok;
    }
    c.pass = kappa_in_range && k_ok >= 16;
    c.detail = std::to_string(k_ok) + "/20 seeds, kappa range " + (kappa_in_range ? "ok" : "violated");
    return c;
}

// ---------------------------------------------------------------------------
// 8. Bootstrap test calibration: 5%-level rejection rate within [2%, 9%] on
//    200 synthetic null pairs (T=600); block length at T=605 equals 8.
// ---------------------------------------------------------------------------
Criterion check_bootstrap_calibration() {
    Criterion c{"bootstrap Sharpe test: null rejection in [2%,9%] on 200 pairs; block(605)=8"};
    int rejections = 0;
    const int n_pairs = 200, T = 600;
    for (int i = 0; i < n_pairs; ++i) {
        RngEngine rng = make_stream(6000, i);
        std::normal_distribution<double> normal(0.005, 0.03);
        Eigen::VectorXd x(T), y(T);
        for (int t = 0; t < T; ++t) {
            x(t) = normal(rng);
            y(t) = normal(rng);
        }
        const SharpeDiffTest t = sharpe_diff_test(x, y, mix_seed(6001, i), 4999);
        if (t.p_value < 0.05) ++rejections;
    }
    const double rate = static_cast<double>(rejections) / n_pairs;
    c.pass = rate >= 0.02 && rate <= 0.09 && bootstrap_block_length(605) == 8;
    c.detail = "rejection rate " + fmt(rate) + " (" + std::to_string(rejections) + "/200), block(605)=" +
               std::to_string(bootstrap_block_length(605));
    return c;
}

// ---------------------------------------------------------------------------
// 9. Analytics identities: benchmark turnover identically 0; self-spanning
//    alpha=0, beta=1, R^2=1; CE of a constant return equals that return.
// ---------------------------------------------------------------------------
Criterion check_analytics_identities() {
    Criterion c{"analytics identities: zero benchmark turnover, self-spanning, constant-return CE"};
    SyntheticSpec spec;
    spec.n_months = 200;
    spec.seed = 11;
    const SyntheticDataset data = synthetic_dataset(spec);
    BacktestConfig cfg;
    cfg.strategy = Strategy::Benchmark;
    cfg.initial_window = 60;
    const BacktestResult bench = run_backtest(cfg, data.returns, data.signals);
    const bool turnover_zero = bench.turnover.lpNorm<Eigen::Infinity>() == 0.0;

    RngEngine rng = make_stream(12, 0);
    std::normal_distribution<double> normal(0.004, 0.03);
    Eigen::VectorXd series(240);
    for (int t = 0; t < 240; ++t) series(t) = normal(rng);
    const SpanningRegression self = spanning_regression(series, series);
    const bool spanning_ok = std::abs(self.alpha_annual) <= 1e-10 && std::abs(self.beta - 1.0) <= 1e-12 &&
                             std::abs(self.r_squared - 1.0) <= 1e-12;

    bool ce_ok = true;
    const Eigen::VectorXd constant = Eigen::VectorXd::Constant(36, 0.007);
    for (const double gamma : {0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0})
        ce_ok = ce_ok &&
                std::abs(certainty_equivalent(constant, gamma) - (std::pow(1.007, 12.0) - 1.0)) <= 1e-10;

    c.pass = turnover_zero && spanning_ok && ce_ok;
    c.detail = std::string("turnover ") + (turnover_zero ? "0" : "nonzero") + ", spanning " +
               (spanning_ok ? "exact" : "off") + ", CE " + (ce_ok ? "exact" : "off");
    return c;
}

// ---------------------------------------------------------------------------
// 10. Replication mode (informational, not gating): with user-supplied real
//     panels the pipeline emits the full report set; documented comparison
//     targets are Sharpe 1.32/1.05/0.74 (posterior-averaged, point-estimate,
//     market), MaxDD -24.50/-37.21, CE at gamma=5 of 10.52/8.68, +-0.05
//     Sharpe / +-50bp CE for data-vintage drift.
// ---------------------------------------------------------------------------
Criterion check_replication_mode() {
    Criterion c{"replication mode on user-supplied panels (informational)"};
    c.informational = true;
    const char* factors = std::getenv("BPPP_REAL_FACTORS");
    const char* signals = std::getenv("BPPP_REAL_SIGNALS");
    if (!factors || !signals) {
        c.pass = true;
        c.detail = "skipped: set BPPP_REAL_FACTORS and BPPP_REAL_SIGNALS to run against real panels";
        return c;
    }
    try {
        RunSettings settings;
        settings.factors_csv = factors;
        settings.signals_csv = signals;
        settings.strategies = {Strategy::Benchmark, Strategy::PPP, Strategy::BPPP};
        settings.out_dir = "replication_out";
        const auto panels = load_input_panels(settings);
        const ExperimentOutcome out = run_experiment(settings, panels.first, panels.second);
        std::string detail = "sharpe:";
        for (const auto& r : out.results)
            detail += " " + strategy_name(r.strategy) + "=" + fmt(sharpe(r.excess_returns()));
        c.pass = true;
        c.detail = detail + " (targets 0.74/1.05/1.32 +-0.05)";
    } catch (const std::exception& e) {
        c.pass = true;  // informational either way
        c.detail = std::string("run failed: ") + e.what();
    }
    return c;
}

// ---------------------------------------------------------------------------
// 11. End-to-end desk scale: five strategies on K=3, L=10, T=240 in under
//     120 seconds with bit-identical repeated runs.
// ---------------------------------------------------------------------------
Criterion check_end_to_end() {
    Criterion c{"end-to-end: five strategies, K=3/L=10/T=240, deterministic, <120s"};
    const auto t0 = std::chrono::steady_clock::now();
    RunSettings settings;
    settings.use_synthetic = true;
    settings.synth.n_assets = 3;
    settings.synth.n_signals = 10;
    settings.synth.n_months = 240;
    settings.synth.seed = 31;
    settings.base.initial_window = 60;
    settings.strategies = {Strategy::Benchmark, Strategy::MeanVariance, Strategy::SimpleMomentum, Strategy::PPP,
                           Strategy::BPPP};
    settings.out_dir = std::filesystem::temp_directory_path() / "bppp_acceptance_e2e";

    const auto panels = load_input_panels(settings);
    const ExperimentOutcome a = run_experiment(settings, panels.first, panels.second, /*write_output=*/true);
    const ExperimentOutcome b = run_experiment(settings, panels.first, panels.second, /*write_output=*/false);
    bool identical = a.results.size() == b.results.size();
    for (size_t i = 0; identical && i < a.results.size(); ++i) {
        identical = (a.results[i].weights - b.results[i].weights).lpNorm<Eigen::Infinity>() == 0.0 &&
                    (a.results[i].gross_returns - b.results[i].gross_returns).lpNorm<Eigen::Infinity>() == 0.0;
    }
    bool files_ok = true;
    for (const char* name : {"performance.csv", "ce_gamma.csv", "tests.csv", "subperiods.csv",
                             "rolling_sharpe.csv", "tc_sweep.csv", "summary.md", "run_manifest.json"})
        files_ok = files_ok && std::filesystem::exists(settings.out_dir / name);
    const double elapsed = seconds_since(t0);
    c.pass = identical && files_ok && elapsed < 120.0;
    c.detail = std::string(identical ? "deterministic" : "NONDETERMINISTIC") + ", reports " +
               (files_ok ? "complete" : "missing") + ", " + fmt(elapsed) + "s";
    return c;
}

}  // namespace

int main() {
    std::vector<Criterion> results;
    results.push_back(check_gradient_correctness());
    results.push_back(check_gap_positivity());
    results.push_back(check_second_order());
    results.push_back(check_variance_decomposition());
    results.push_back(check_flat_prior_nesting());
    results.push_back(check_prior_calibration());
    results.push_back(check_horseshoe_mechanics());
    results.push_back(check_bootstrap_calibration());
    results.push_back(check_analytics_identities());
    results.push_back(check_replication_mode());
    results.push_back(check_end_to_end());

    int failures = 0;
    for (const auto& r : results) {
        std::cout << (r.pass ? "PASS" : "FAIL") << (r.informational ? " (informational)" : "") << ": " << r.name
                  << "\n      " << r.detail << "\n";
        if (!r.pass && !r.informational) ++failures;
    }
    std::cout << (failures == 0 ? "ALL ACCEPTANCE CRITERIA PASSED" : std::to_string(failures) + " CRITERIA FAILED")
              << '\n';
    return failures == 0 ? 0 : 1;
}
