// policy.hpp
// The linear signal-to-weight rule w = w_b + theta * z, the constraint
// projection and its straight-through gradient mask, and portfolio-return
// accounting.

#pragma once

#include <Eigen/Dense>

#include "bppp/types.hpp"

namespace bppp {

// Per-position cap and gross-exposure cap shared by every strategy.
struct ConstraintSet {
    double position_cap = 0.60;
    double gross_cap = 2.00;

    void validate() const {
        if (!(position_cap > 0.0)) throw ConfigError("position_cap must be positive");
        if (!(gross_cap >= position_cap)) throw ConfigError("gross_cap must be >= position_cap");
    }
};

// theta is K x L at portfolio-weight scale; benchmark weights sum to 1.
struct PolicyMatrix {
    Eigen::MatrixXd theta;
    Eigen::VectorXd benchmark;

    void validate() const;
};

// w = w_b + theta * z, no projection.
Eigen::VectorXd raw_weights(const Eigen::MatrixXd& theta, const Eigen::VectorXd& benchmark,
                            const Eigen::VectorXd& z);

struct Projection {
    Eigen::VectorXd weights;
    // True where the projection left the coordinate unchanged (within 1e-12);
    // gradients flow only through those coordinates.
    Eigen::Array<bool, Eigen::Dynamic, 1> active;
};

// Clip each entry to [-position_cap, +position_cap]; if gross exposure still
// exceeds gross_cap, rescale every entry by gross_cap / sum|w|. Clip-then-
// scale keeps both constraints satisfied in one pass and is piecewise linear.
Projection project(const Eigen::VectorXd& w, const ConstraintSet& constraints);

// r_p = r_f + w' r_excess: the residual 1 - sum(w) sits at the risk-free rate.
double portfolio_return(const Eigen::VectorXd& w, const Eigen::VectorXd& excess, double risk_free);

}  // namespace bppp
