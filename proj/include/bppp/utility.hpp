// utility.hpp
// CRRA utility, marginal utility and curvature. The estimation objective,
// gradients, Hessian diagonals and certainty-equivalent analytics all come
// through here.
//
// Utility is evaluated on gross wealth 1 + r_p. gamma = 1 switches to the
// logarithmic branch; gamma = 0 is risk neutral.

#pragma once

#include <stdexcept>

namespace bppp {

struct CrraParams {
    double gamma = 5.0;
};

// U(r) = (1+r)^(1-gamma) / (1-gamma), log(1+r) at gamma = 1.
// Throws std::domain_error when 1 + r_p <= 0 (bankruptcy state).
double crra(double r_p, double gamma);

// U'(r) = (1+r)^(-gamma).
double crra_marginal(double r_p, double gamma);

// -U''(r) = gamma * (1+r)^-(gamma+1).
double crra_curvature(double r_p, double gamma);

// Optimizer-facing branch: below a small wealth floor the utility continues
// linearly with slope U'(floor), a large finite penalty instead of a domain
// error so a line search can retreat. All three derivatives stay consistent
// with each other (the extension is C^1; curvature is 0 below the floor).
inline constexpr double kWealthFloor = 1e-6;

double crra_extended(double gross_wealth, double gamma);
double crra_extended_marginal(double gross_wealth, double gamma);
double crra_extended_curvature(double gross_wealth, double gamma);

}  // namespace bppp
