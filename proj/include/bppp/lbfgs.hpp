// lbfgs.hpp
// Limited-memory BFGS minimizer with Armijo backtracking. The on_accept hook
// lets a caller re-freeze state (e.g. projection masks) at each accepted
// iterate while the line search itself sees a fixed smooth surrogate.

#pragma once

#include <Eigen/Dense>
#include <functional>

namespace bppp {

struct LbfgsOptions {
    int max_iterations = 500;
    double gradient_tolerance = 1e-6;  // on the max-norm of the gradient
    double step_tolerance = 1e-12;     // on the max-norm of the accepted step
    int memory_pairs = 10;
    int max_backtracks = 60;
};

struct LbfgsReport {
    bool converged = false;
    int iterations = 0;
    double gradient_norm = 0.0;
    double value = 0.0;
};

// Returns the value; fills *grad when grad != nullptr.
using ValueGradFn = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd*)>;
using AcceptFn = std::function<void(const Eigen::VectorXd&)>;

// Minimizes fg, updating x in place. on_accept (optional) runs after every
// accepted step, before the value/gradient are re-evaluated there.
LbfgsReport lbfgs_minimize(const ValueGradFn& fg, Eigen::VectorXd& x, const LbfgsOptions& options,
                           const AcceptFn& on_accept = {});

}  // namespace bppp
