#include "bppp/lbfgs.hpp"

#include <cmath>
#include <deque>
#include <stdexcept>
#include <vector>

namespace bppp {

namespace {

struct Pair {
    Eigen::VectorXd s;
    Eigen::VectorXd y;
    double rho;
};

Eigen::VectorXd two_loop_direction(const std::deque<Pair>& history, const Eigen::VectorXd& grad) {
    Eigen::VectorXd q = -grad;
    if (history.empty()) {
        // Unit-length first step; curvature pairs set the scale afterwards.
        const double norm = q.norm();
        if (norm > 1.0) q /= norm;
        return q;
    }
    std::vector<double> alpha(history.size());
    for (int i = static_cast<int>(history.size()) - 1; i >= 0; --i) {
        alpha[i] = history[i].rho * history[i].s.dot(q);
        q -= alpha[i] * history[i].y;
    }
    const Pair& last = history.back();
    const double scale = last.s.dot(last.y) / last.y.squaredNorm();
    q *= scale;
    for (size_t i = 0; i < history.size(); ++i) {
        const double beta = history[i].rho * history[i].y.dot(q);
        q += (alpha[i] - beta) * history[i].s;
    }
    return q;
}

}  // namespace

LbfgsReport lbfgs_minimize(const ValueGradFn& fg, Eigen::VectorXd& x, const LbfgsOptions& options,
                           const AcceptFn& on_accept) {
    LbfgsReport report;
    Eigen::VectorXd grad(x.size());
    double f = fg(x, &grad);
    if (!std::isfinite(f)) throw std::runtime_error("lbfgs: objective is non-finite at the starting point");

    std::deque<Pair> history;
    constexpr double kArmijo = 1e-4;

    for (int iter = 0; iter < options.max_iterations; ++iter) {
        report.iterations = iter;
        report.gradient_norm = grad.size() > 0 ? grad.lpNorm<Eigen::Infinity>() : 0.0;
        report.value = f;
        if (report.gradient_norm <= options.gradient_tolerance) {
            report.converged = true;
            return report;
        }

        Eigen::VectorXd dir = two_loop_direction(history, grad);
        double dg = dir.dot(grad);
        if (!(dg < 0.0)) {  // not a descent direction: restart from steepest descent
            history.clear();
            dir = -grad;
            dg = dir.dot(grad);
        }

        // Backtracking on the frozen surrogate, with the step re-frozen and
        // re-checked against the true objective before acceptance. Without the
        // second check a long step can saturate the projection (the surrogate
        // keeps improving linearly while the true objective flattens) and
        // strand the solver at a zero-gradient plateau.
        double step = 1.0;
        double f_true = f;
        Eigen::VectorXd x_trial;
        bool accepted = false;
        for (int bt = 0; bt < options.max_backtracks; ++bt) {
            x_trial = x + step * dir;
            const double f_sur = fg(x_trial, nullptr);
            if (std::isfinite(f_sur) && f_sur <= f + kArmijo * step * dg) {
                if (on_accept) {
                    on_accept(x_trial);
                    f_true = fg(x_trial, nullptr);
                    if (std::isfinite(f_true) && f_true <= f + kArmijo * step * dg) {
                        accepted = true;
                        break;
                    }
                    on_accept(x);  // refreeze back at the current iterate
                } else {
                    f_true = f_sur;
                    accepted = true;
                    break;
                }
            }
            step *= 0.5;
        }
        if (!accepted) {
            if (!history.empty()) {  // one restart with a clean memory before giving up
                history.clear();
                continue;
            }
            return report;
        }

        const Eigen::VectorXd s = x_trial - x;
        x = x_trial;

        Eigen::VectorXd grad_new(x.size());
        f = fg(x, &grad_new);
        const Eigen::VectorXd y = grad_new - grad;
        grad = grad_new;

        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            history.push_back({s, y, 1.0 / sy});
            if (static_cast<int>(history.size()) > options.memory_pairs) history.pop_front();
        }

        if (s.size() > 0 && s.lpNorm<Eigen::Infinity>() <= options.step_tolerance) {
            report.iterations = iter + 1;
            report.gradient_norm = grad.size() > 0 ? grad.lpNorm<Eigen::Infinity>() : 0.0;
            report.value = f;
            report.converged = report.gradient_norm <= options.gradient_tolerance;
            return report;
        }
    }
    report.iterations = options.max_iterations;
    report.gradient_norm = grad.size() > 0 ? grad.lpNorm<Eigen::Infinity>() : 0.0;
    report.value = f;
    return report;
}

}  // namespace bppp
