// prior.hpp
// Prior specifications for the policy matrix and the calibration helpers that
// turn the target-tilt standard deviation delta into per-coefficient scales.

#pragma once

#include <Eigen/Dense>
#include <cmath>

#include "bppp/types.hpp"

namespace bppp {

enum class PriorKind { Gaussian, Horseshoe };

struct PriorSpec {
    PriorKind kind = PriorKind::Gaussian;
    Eigen::MatrixXd mean;  // M_t, K x L

    // Gaussian branch.
    double nu = 0.0;  // effective scalar variance

    // Horseshoe branch.
    double tau = 1.0;        // global scale
    Eigen::MatrixXd lambda;  // local scales, K x L
    double slab_c = 1.0;
    double sigma2 = 1.0;  // residual variance
    double p0 = 10.0;     // expected number of active signals

    void validate() const {
        if (kind == PriorKind::Gaussian) {
            if (!(nu > 0.0)) throw ConfigError("Gaussian prior requires nu > 0");
        } else {
            if (!(tau > 0.0)) throw ConfigError("horseshoe prior requires tau > 0");
            if (!(slab_c > 0.0)) throw ConfigError("horseshoe prior requires slab_c > 0");
            if (!(sigma2 > 0.0)) throw ConfigError("horseshoe prior requires sigma2 > 0");
            if (lambda.size() > 0 && (lambda.array() <= 0.0).any())
                throw ConfigError("horseshoe prior requires lambda > 0 elementwise");
            if (!(p0 > 0.0) || !(p0 < static_cast<double>(mean.cols())))
                throw ConfigError("horseshoe prior requires 0 < p0 < L");
        }
    }
};

// Per-coefficient prior scale implied by a target tilt standard deviation
// delta over L standardized signals: sigma_theta = delta / sqrt(L).
inline double tilt_sigma(double delta, int n_signals) {
    if (!(delta > 0.0) || n_signals < 1) throw ConfigError("tilt_sigma requires delta > 0 and L >= 1");
    return delta / std::sqrt(static_cast<double>(n_signals));
}

// Effective Gaussian prior variance: nu = sigma_theta^2 * max(T/L, 1), so the
// prior loosens as the estimation window outgrows the signal count.
inline double effective_prior_variance(double sigma_theta, int window_length, int n_signals) {
    if (window_length < 1 || n_signals < 1)
        throw ConfigError("effective_prior_variance requires T >= 1 and L >= 1");
    const double ratio = static_cast<double>(window_length) / static_cast<double>(n_signals);
    return sigma_theta * sigma_theta * std::max(ratio, 1.0);
}

}  // namespace bppp
