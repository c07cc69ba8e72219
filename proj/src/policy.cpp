#include "bppp/policy.hpp"

#include <cmath>

namespace bppp {

void PolicyMatrix::validate() const {
    if (!theta.allFinite()) throw DataError("policy matrix has non-finite entries");
    if (!benchmark.allFinite()) throw DataError("benchmark weights have non-finite entries");
    if (theta.rows() != benchmark.size()) throw DataError("policy matrix rows must match benchmark length");
    if (std::abs(benchmark.sum() - 1.0) > 1e-9) throw DataError("benchmark weights must sum to 1");
}

Eigen::VectorXd raw_weights(const Eigen::MatrixXd& theta, const Eigen::VectorXd& benchmark,
                            const Eigen::VectorXd& z) {
    if (theta.cols() != z.size() || theta.rows() != benchmark.size())
        throw DataError("raw_weights: dimension mismatch");
    return benchmark + theta * z;
}

Projection project(const Eigen::VectorXd& w, const ConstraintSet& constraints) {
    constexpr double kTol = 1e-12;
    const double cap = constraints.position_cap;
    Eigen::VectorXd out = w.cwiseMax(-cap).cwiseMin(cap);
    const double gross = out.lpNorm<1>();
    if (gross > constraints.gross_cap) out *= constraints.gross_cap / gross;
    Projection p;
    p.active = ((out - w).array().abs() <= kTol);
    p.weights = std::move(out);
    return p;
}

double portfolio_return(const Eigen::VectorXd& w, const Eigen::VectorXd& excess, double risk_free) {
    if (w.size() != excess.size()) throw DataError("portfolio_return: dimension mismatch");
    return risk_free + w.dot(excess);
}

}  // namespace bppp
