#include "bppp/verification.hpp"

#include <cmath>
#include <sstream>

#include "bppp/csv.hpp"
#include "bppp/rng.hpp"

namespace bppp {

namespace {

std::string fmt(double v) {
    std::ostringstream ss;
    ss << v;
    return ss.str();
}

}  // namespace

GapExperiment random_gap_experiment(std::uint64_t seed, int mc_draws) {
    RngEngine rng = make_stream(seed, 0xE1);
    std::uniform_int_distribution<int> pick_k(2, 3), pick_l(3, 5), pick_atoms(4, 8);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    std::normal_distribution<double> normal(0.0, 1.0);

    GapExperiment exp;
    const int K = pick_k(rng);
    const int L = pick_l(rng);
    exp.policy_mean.resize(K, L);
    for (int k = 0; k < K; ++k)
        for (int l = 0; l < L; ++l) exp.policy_mean(k, l) = 0.02 * normal(rng);
    exp.benchmark = Eigen::VectorXd::Zero(K);
    exp.benchmark(0) = 1.0;
    exp.signal.resize(L);
    for (int l = 0; l < L; ++l) exp.signal(l) = normal(rng);

    exp.isotropic = true;
    exp.iso_variance = std::pow(0.02 + 0.03 * unif(rng), 2);

    const int n_atoms = pick_atoms(rng);
    FiniteReturnModel model;
    model.atoms.resize(n_atoms, K);
    model.probs.resize(n_atoms);
    double psum = 0.0;
    for (int a = 0; a < n_atoms; ++a) {
        for (int k = 0; k < K; ++k) model.atoms(a, k) = 1.0 + 0.01 + 0.08 * (unif(rng) - 0.5);
        model.probs(a) = 0.2 + unif(rng);
        psum += model.probs(a);
    }
    model.probs /= psum;
    exp.returns = model;

    const double gammas[] = {2.0, 5.0, 10.0};
    exp.gamma = gammas[static_cast<int>(unif(rng) * 3) % 3];
    exp.utility = UtilityKind::Crra;
    exp.mc_draws = mc_draws;
    return exp;
}

GapExperiment random_decomposition_experiment(std::uint64_t seed, int mc_draws) {
    RngEngine rng = make_stream(seed, 0xD2);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    GapExperiment exp;
    const int K = 3, L = 4;
    exp.policy_mean.resize(K, L);
    for (int k = 0; k < K; ++k)
        for (int l = 0; l < L; ++l) exp.policy_mean(k, l) = 0.03 * normal(rng);
    exp.benchmark = Eigen::VectorXd::Zero(K);
    exp.benchmark(0) = 1.0;
    exp.signal.resize(L);
    for (int l = 0; l < L; ++l) exp.signal(l) = normal(rng);

    Eigen::MatrixXd a(L, L);
    for (int i = 0; i < L; ++i)
        for (int j = 0; j < L; ++j) a(i, j) = normal(rng);
    exp.row_cov = 0.0004 * (a * a.transpose() / L + Eigen::MatrixXd::Identity(L, L) * 0.2);
    exp.isotropic = true;
    exp.iso_variance = exp.row_cov(0, 0);  // unused by the decomposition path

    const int n_atoms = 6;
    FiniteReturnModel model;
    model.atoms.resize(n_atoms, K);
    model.probs = Eigen::VectorXd::Constant(n_atoms, 1.0 / n_atoms);
    for (int atom = 0; atom < n_atoms; ++atom)
        for (int k = 0; k < K; ++k) model.atoms(atom, k) = 1.0 + 0.1 * (unif(rng) - 0.45);
    exp.returns = model;
    exp.gamma = 5.0;
    exp.mc_draws = mc_draws;
    return exp;
}

std::vector<TheoryCheck> run_theory_suite(const TheorySuiteConfig& config) {
    std::vector<TheoryCheck> checks;

    // Strict concavity: the gap is positive in every seeded experiment.
    {
        TheoryCheck check;
        check.name = "gap_positive_strictly_concave";
        int positive = 0;
        double min_ratio = 1e300;
        for (int i = 0; i < config.gap_experiments; ++i) {
            const GapExperiment exp = random_gap_experiment(mix_seed(config.seed, i), config.mc_draws);
            const GapEstimate est = jensen_gap_mc(exp, mix_seed(config.seed, 1000 + i));
            if (est.gap > 0.0) ++positive;
            if (est.std_error > 0.0) min_ratio = std::min(min_ratio, est.gap / est.std_error);
        }
        check.pass = positive == config.gap_experiments;
        check.value = positive;
        check.threshold = config.gap_experiments;
        check.detail = "positive in " + std::to_string(positive) + "/" + std::to_string(config.gap_experiments) +
                       ", min gap/SE = " + fmt(min_ratio);
        checks.push_back(check);
    }

    // Degenerate posterior: zero covariance gives a gap of exactly zero.
    {
        TheoryCheck check;
        check.name = "gap_zero_at_zero_covariance";
        GapExperiment exp = random_gap_experiment(mix_seed(config.seed, 424242), config.mc_draws);
        exp.iso_variance = 0.0;
        const GapEstimate est = jensen_gap_mc(exp, config.seed);
        check.pass = est.gap == 0.0 && est.std_error == 0.0;
        check.value = est.gap;
        check.threshold = 0.0;
        check.detail = "gap = " + fmt(est.gap);
        checks.push_back(check);
    }

    // Risk-neutral utility: affine, so the gap sits within 3 SE of zero.
    {
        TheoryCheck check;
        check.name = "gap_zero_under_linear_utility";
        bool all = true;
        double worst = 0.0;
        for (int i = 0; i < 10; ++i) {
            GapExperiment exp = random_gap_experiment(mix_seed(config.seed, 7000 + i), config.mc_draws);
            exp.gamma = 0.0;
            const GapEstimate est = jensen_gap_mc(exp, mix_seed(config.seed, 8000 + i));
            const double ratio = est.std_error > 0.0 ? std::abs(est.gap) / est.std_error : 0.0;
            worst = std::max(worst, ratio);
            all = all && ratio <= 3.0;
        }
        check.pass = all;
        check.value = worst;
        check.threshold = 3.0;
        check.detail = "max |gap|/SE = " + fmt(worst);
        checks.push_back(check);
    }

    // Quadratic utility, isotropic covariance: MC gap matches the closed form
    // (gamma/2) z'Sigma z E||R||^2 within 3 SE.
    {
        TheoryCheck check;
        check.name = "quadratic_gap_matches_closed_form";
        bool all = true;
        double worst = 0.0;
        for (int i = 0; i < config.quadratic_experiments; ++i) {
            GapExperiment exp = random_gap_experiment(mix_seed(config.seed, 9000 + i), config.mc_draws);
            exp.utility = UtilityKind::Quadratic;
            exp.gamma = 2.0;
            const GapEstimate est = jensen_gap_mc(exp, mix_seed(config.seed, 9500 + i));
            const double closed = quadratic_gap_closed_form(exp);
            const double ratio = est.std_error > 0.0 ? std::abs(est.gap - closed) / est.std_error : 0.0;
            worst = std::max(worst, ratio);
            all = all && ratio <= 3.0;
        }
        check.pass = all;
        check.value = worst;
        check.threshold = 3.0;
        check.detail = "max |gap - closed|/SE = " + fmt(worst);
        checks.push_back(check);
    }

    // Doubling the signal quadruples the quadratic-utility gap; the gap is
    // linear in gamma.
    {
        TheoryCheck check;
        check.name = "quadratic_gap_scaling";
        GapExperiment exp = random_gap_experiment(mix_seed(config.seed, 123), config.mc_draws);
        exp.utility = UtilityKind::Quadratic;
        const double base = quadratic_gap_closed_form(exp);
        GapExperiment doubled = exp;
        doubled.signal *= 2.0;
        const double quad = quadratic_gap_closed_form(doubled);
        GapExperiment gamma2 = exp;
        gamma2.gamma *= 2.0;
        const double lin = quadratic_gap_closed_form(gamma2);
        const double err = std::max(std::abs(quad - 4.0 * base), std::abs(lin - 2.0 * base));
        check.pass = err <= 1e-12 * std::max(1.0, std::abs(base));
        check.value = err;
        check.threshold = 1e-12;
        check.detail = "max scaling error = " + fmt(err);
        checks.push_back(check);
    }

    // Second-order accuracy: quadrature-vs-trace error shrinks at least
    // quadratically down a 3-step covariance ladder.
    {
        TheoryCheck check;
        check.name = "second_order_error_ladder";
        GapExperiment exp = random_gap_experiment(mix_seed(config.seed, 321), config.mc_draws);
        exp.gamma = 5.0;
        exp.iso_variance = 0.0025;
        double errors[3];
        for (int step = 0; step < 3; ++step) {
            GapExperiment scaled = exp;
            scaled.iso_variance = exp.iso_variance / std::pow(2.0, step);
            errors[step] = std::abs(jensen_gap_quadrature(scaled) - gap_second_order(scaled));
        }
        const double r1 = errors[0] / std::max(errors[1], 1e-300);
        const double r2 = errors[1] / std::max(errors[2], 1e-300);
        check.pass = r1 >= 3.0 && r2 >= 3.0;
        check.value = std::min(r1, r2);
        check.threshold = 3.0;
        check.detail = "errors " + fmt(errors[0]) + " -> " + fmt(errors[1]) + " -> " + fmt(errors[2]) +
                       ", ratios " + fmt(r1) + ", " + fmt(r2);
        checks.push_back(check);
    }

    // Variance decomposition: residual within 3 batch-means SE on every
    // seeded instance.
    {
        TheoryCheck check;
        check.name = "variance_decomposition_residual";
        bool all = true;
        double worst = 0.0;
        for (int i = 0; i < config.decomposition_experiments; ++i) {
            const GapExperiment exp = random_decomposition_experiment(mix_seed(config.seed, 5000 + i));
            const VarianceDecomposition d = variance_decomposition_check(exp, mix_seed(config.seed, 5500 + i));
            const double ratio = d.residual_se > 0.0 ? std::abs(d.residual) / d.residual_se : 0.0;
            worst = std::max(worst, ratio);
            all = all && ratio <= 3.0;
        }
        check.pass = all;
        check.value = worst;
        check.threshold = 3.0;
        check.detail = "max |residual|/SE = " + fmt(worst);
        checks.push_back(check);
    }

    return checks;
}

void write_theory_report(const std::filesystem::path& path, const std::vector<TheoryCheck>& checks) {
    std::vector<std::vector<std::string>> rows;
    for (const auto& c : checks)
        rows.push_back({c.name, c.pass ? "pass" : "fail", format_double(c.value), format_double(c.threshold),
                        c.detail});
    write_plain_csv(path, {"check", "status", "value", "threshold", "detail"}, rows);
}

}  // namespace bppp
