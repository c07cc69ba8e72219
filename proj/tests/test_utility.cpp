#include <doctest.h>

#include <cmath>
#include <random>

#include "bppp/utility.hpp"

using namespace bppp;

TEST_CASE("CRRA utility values") {
    CHECK(crra(0.0, 5.0) == doctest::Approx(-0.25).epsilon(1e-14));
    CHECK(crra(0.0, 1.0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(crra(0.10, 2.0) == doctest::Approx(-1.0 / 1.1).epsilon(1e-14));
    CHECK(crra(0.0, 0.0) == doctest::Approx(1.0));  // risk neutral: gross wealth itself
}

TEST_CASE("CRRA domain errors") {
    CHECK_THROWS_AS(crra(-1.0, 5.0), std::domain_error);
    CHECK_THROWS_AS(crra(-1.5, 2.0), std::domain_error);
    CHECK_THROWS_AS(crra_marginal(-1.0, 5.0), std::domain_error);
    CHECK_THROWS_AS(crra_curvature(-1.2, 5.0), std::domain_error);
}

TEST_CASE("marginal utility and curvature") {
    CHECK(crra_marginal(0.0, 5.0) == doctest::Approx(1.0));
    CHECK(crra_curvature(0.0, 5.0) == doctest::Approx(5.0));
    for (const double r : {-0.3, 0.0, 0.4, 1.0}) {
        CHECK(crra_marginal(r, 0.0) == doctest::Approx(1.0));
        CHECK(crra_curvature(r, 0.0) == doctest::Approx(0.0));
    }
}

TEST_CASE("marginal matches finite differences of the utility") {
    const double h = 1e-6;
    const double fd = (crra(0.05 + h, 5.0) - crra(0.05 - h, 5.0)) / (2.0 * h);
    CHECK(crra_marginal(0.05, 5.0) == doctest::Approx(fd).epsilon(1e-8));
}

TEST_CASE("derivative consistency across the (r, gamma) grid") {
    const double h = 1e-6;
    for (const double gamma : {0.5, 1.0, 2.0, 5.0, 10.0}) {
        for (double r = -0.5; r <= 1.0; r += 0.1) {
            const double fd1 = (crra(r + h, gamma) - crra(r - h, gamma)) / (2.0 * h);
            CHECK(std::abs(crra_marginal(r, gamma) - fd1) / std::abs(fd1) <= 1e-6);
            const double fd2 = -(crra_marginal(r + h, gamma) - crra_marginal(r - h, gamma)) / (2.0 * h);
            CHECK(std::abs(crra_curvature(r, gamma) - fd2) / std::abs(fd2) <= 1e-5);
        }
    }
}

TEST_CASE("strict concavity for gamma > 0") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> unif(-0.4, 0.9);
    for (const double gamma : {0.5, 1.0, 2.0, 5.0}) {
        for (int i = 0; i < 50; ++i) {
            const double r1 = unif(rng);
            double r2 = unif(rng);
            if (r1 == r2) r2 += 0.05;
            const double mid = 0.5 * (r1 + r2);
            CHECK(crra(mid, gamma) > 0.5 * (crra(r1, gamma) + crra(r2, gamma)));
        }
    }
}

TEST_CASE("log branch is the gamma -> 1 limit of utility differences") {
    for (const double r : {-0.2, 0.1, 0.5}) {
        for (const double eps : {1e-6, -1e-6}) {
            const double diff = crra(r, 1.0 + eps) - crra(0.0, 1.0 + eps);
            CHECK(std::abs(diff - std::log(1.0 + r)) <= 1e-4);
        }
    }
}

TEST_CASE("extended branch continues linearly below the floor") {
    const double gamma = 5.0;
    CHECK(crra_extended(1.05, gamma) == doctest::Approx(crra(0.05, gamma)));
    CHECK(crra_extended(kWealthFloor, gamma) == doctest::Approx(crra(kWealthFloor - 1.0, gamma)));
    const double inside = crra_extended(kWealthFloor / 2, gamma);
    CHECK(std::isfinite(inside));
    CHECK(inside < crra_extended(kWealthFloor, gamma));
    CHECK(crra_extended(-0.5, gamma) < inside);
    CHECK(crra_extended_marginal(-0.5, gamma) == doctest::Approx(std::pow(kWealthFloor, -gamma)));
    CHECK(crra_extended_curvature(-0.5, gamma) == 0.0);
}
