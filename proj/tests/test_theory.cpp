#include <doctest.h>

#include <cmath>

#include "bppp/theory.hpp"
#include "bppp/verification.hpp"

using namespace bppp;

TEST_CASE("gap is exactly zero under a degenerate posterior") {
    GapExperiment exp = random_gap_experiment(1);
    exp.iso_variance = 0.0;
    const GapEstimate est = jensen_gap_mc(exp, 99);
    CHECK(est.gap == 0.0);
    CHECK(est.std_error == 0.0);
}

TEST_CASE("gap vanishes under linear utility") {
    GapExperiment exp = random_gap_experiment(2);
    exp.gamma = 0.0;
    const GapEstimate est = jensen_gap_mc(exp, 100);
    CHECK(std::abs(est.gap) <= 3.0 * est.std_error);
}

TEST_CASE("gap is positive under strictly concave utility") {
    for (const std::uint64_t seed : {3ull, 4ull, 5ull, 6ull, 7ull}) {
        const GapExperiment exp = random_gap_experiment(seed);
        const GapEstimate est = jensen_gap_mc(exp, seed + 500);
        CHECK(est.gap > 0.0);
        CHECK(est.gap > 3.0 * est.std_error);  // clears its own noise
    }
}

TEST_CASE("quadratic utility: trace formula equals the closed form") {
    GapExperiment exp = random_gap_experiment(8);
    exp.utility = UtilityKind::Quadratic;
    exp.gamma = 3.0;
    const double trace = gap_second_order(exp);
    const double closed = quadratic_gap_closed_form(exp);
    CHECK(trace == doctest::Approx(closed).epsilon(1e-8));
}

TEST_CASE("quadratic utility: Monte-Carlo gap matches the closed form") {
    for (const std::uint64_t seed : {9ull, 10ull}) {
        GapExperiment exp = random_gap_experiment(seed, 8000);
        exp.utility = UtilityKind::Quadratic;
        exp.gamma = 2.0;
        const GapEstimate est = jensen_gap_mc(exp, seed + 600);
        CHECK(std::abs(est.gap - quadratic_gap_closed_form(exp)) <= 3.0 * est.std_error);
    }
}

TEST_CASE("quadratic gap scales as a quadratic form in z and linearly in gamma") {
    GapExperiment exp = random_gap_experiment(11);
    exp.utility = UtilityKind::Quadratic;
    const double base = quadratic_gap_closed_form(exp);
    GapExperiment z2 = exp;
    z2.signal *= 2.0;
    CHECK(quadratic_gap_closed_form(z2) == doctest::Approx(4.0 * base).epsilon(1e-12));
    GapExperiment g2 = exp;
    g2.gamma *= 2.0;
    CHECK(quadratic_gap_closed_form(g2) == doctest::Approx(2.0 * base).epsilon(1e-12));
}

TEST_CASE("quadratic gap is monotone in the posterior scale and in the signal") {
    GapExperiment exp = random_gap_experiment(12);
    exp.utility = UtilityKind::Quadratic;
    double last = quadratic_gap_closed_form(exp);
    for (const double scale : {1.5, 2.0, 3.0}) {
        GapExperiment e = exp;
        e.iso_variance *= scale;
        const double g = quadratic_gap_closed_form(e);
        CHECK(g > last);
        last = g;
    }
    last = quadratic_gap_closed_form(exp);
    for (const double scale : {1.5, 2.0, 3.0}) {
        GapExperiment e = exp;
        e.signal *= scale;
        const double g = quadratic_gap_closed_form(e);
        CHECK(g > last);
        last = g;
    }
}

TEST_CASE("quadrature agrees with Monte Carlo") {
    const GapExperiment exp = random_gap_experiment(13, 20000);
    const GapEstimate mc = jensen_gap_mc(exp, 700);
    const double quad = jensen_gap_quadrature(exp);
    CHECK(std::abs(mc.gap - quad) <= 3.0 * mc.std_error);
}

TEST_CASE("second-order error shrinks quadratically along the covariance ladder") {
    GapExperiment exp = random_gap_experiment(14);
    exp.gamma = 5.0;
    exp.iso_variance = 0.0025;
    double prev_err = -1.0;
    for (int step = 0; step < 3; ++step) {
        GapExperiment e = exp;
        e.iso_variance = exp.iso_variance / std::pow(2.0, step);
        const double err = std::abs(jensen_gap_quadrature(e) - gap_second_order(e));
        if (prev_err > 0.0) CHECK(prev_err / err >= 3.0);
        prev_err = err;
    }
}

TEST_CASE("variance decomposition") {
    SUBCASE("degenerate posterior: estimation term zero, total equals market") {
        GapExperiment exp = random_decomposition_experiment(15);
        exp.row_cov = Eigen::MatrixXd::Zero(4, 4);
        const VarianceDecomposition d = variance_decomposition_check(exp, 800);
        CHECK(d.estimation_exact == 0.0);
        CHECK(std::abs(d.residual) <= 3.0 * d.residual_se);
    }
    SUBCASE("zero signal kills the estimation term") {
        GapExperiment exp = random_decomposition_experiment(16);
        exp.signal.setZero();
        const VarianceDecomposition d = variance_decomposition_check(exp, 801);
        CHECK(d.estimation_exact == 0.0);
    }
    SUBCASE("random instances balance within three standard errors") {
        for (const std::uint64_t seed : {17ull, 18ull, 19ull}) {
            const GapExperiment exp = random_decomposition_experiment(seed);
            const VarianceDecomposition d = variance_decomposition_check(exp, seed + 900);
            CHECK(d.estimation_exact > 0.0);
            CHECK(std::abs(d.residual) <= 3.0 * d.residual_se);
        }
    }
}

TEST_CASE("experiment validation") {
    GapExperiment exp = random_gap_experiment(20);
    exp.mc_draws = 10;
    CHECK_THROWS_AS(exp.validate(), DataError);
    exp.mc_draws = 2000;
    exp.iso_variance = -1.0;
    CHECK_THROWS_AS(exp.validate(), DataError);
}
