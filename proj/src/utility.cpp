#include "bppp/utility.hpp"

#include <cmath>
#include <string>

namespace bppp {

namespace {

double crra_on_wealth(double w, double gamma) {
    if (gamma == 1.0) return std::log(w);
    return std::pow(w, 1.0 - gamma) / (1.0 - gamma);
}

}  // namespace

double crra(double r_p, double gamma) {
    const double w = 1.0 + r_p;
    if (w <= 0.0) throw std::domain_error("CRRA utility undefined at gross wealth " + std::to_string(w));
    return crra_on_wealth(w, gamma);
}

double crra_marginal(double r_p, double gamma) {
    const double w = 1.0 + r_p;
    if (w <= 0.0) throw std::domain_error("CRRA marginal utility undefined at gross wealth " + std::to_string(w));
    return std::pow(w, -gamma);
}

double crra_curvature(double r_p, double gamma) {
    const double w = 1.0 + r_p;
    if (w <= 0.0) throw std::domain_error("CRRA curvature undefined at gross wealth " + std::to_string(w));
    return gamma * std::pow(w, -(gamma + 1.0));
}

double crra_extended(double gross_wealth, double gamma) {
    if (gross_wealth <= kWealthFloor)
        return crra_on_wealth(kWealthFloor, gamma) + std::pow(kWealthFloor, -gamma) * (gross_wealth - kWealthFloor);
    return crra_on_wealth(gross_wealth, gamma);
}

double crra_extended_marginal(double gross_wealth, double gamma) {
    if (gross_wealth <= kWealthFloor) return std::pow(kWealthFloor, -gamma);
    return std::pow(gross_wealth, -gamma);
}

double crra_extended_curvature(double gross_wealth, double gamma) {
    if (gross_wealth <= kWealthFloor) return 0.0;
    return gamma * std::pow(gross_wealth, -(gamma + 1.0));
}

}  // namespace bppp
