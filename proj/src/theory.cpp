#include "bppp/theory.hpp"

#include <cmath>
#include <vector>

#include "bppp/parallel.hpp"
#include "bppp/rng.hpp"
#include "bppp/utility.hpp"

namespace bppp {

namespace {

double evaluate_utility(double portfolio_value, UtilityKind kind, double gamma) {
    if (kind == UtilityKind::Quadratic) return portfolio_value - 0.5 * gamma * portfolio_value * portfolio_value;
    return crra_extended(portfolio_value, gamma);
}

// u''; negative under concavity.
double utility_second_derivative(double portfolio_value, UtilityKind kind, double gamma) {
    if (kind == UtilityKind::Quadratic) return -gamma;
    return -crra_extended_curvature(portfolio_value, gamma);
}

FiniteReturnModel materialize(const GapExperiment& exp, std::uint64_t seed) {
    if (std::holds_alternative<FiniteReturnModel>(exp.returns)) return std::get<FiniteReturnModel>(exp.returns);
    const auto& g = std::get<GaussianReturnModel>(exp.returns);
    const int n = g.inner_draws;
    const auto K = g.mean.size();
    FiniteReturnModel m;
    m.probs = Eigen::VectorXd::Constant(n, 1.0 / n);
    m.atoms.resize(n, K);
    RngEngine rng = make_stream(seed, 0x52455453ULL);  // dedicated inner-return stream
    std::normal_distribution<double> normal(0.0, 1.0);
    for (int a = 0; a < n; ++a)
        for (Eigen::Index k = 0; k < K; ++k) m.atoms(a, k) = g.mean(k) + g.sd(k) * normal(rng);
    return m;
}

double expected_utility(const Eigen::MatrixXd& theta, const GapExperiment& exp, const FiniteReturnModel& model) {
    const Eigen::VectorXd w = exp.benchmark + theta * exp.signal;
    const Eigen::VectorXd values = model.atoms * w;  // portfolio value per atom
    double out = 0.0;
    for (Eigen::Index a = 0; a < model.probs.size(); ++a)
        out += model.probs(a) * evaluate_utility(values(a), exp.utility, exp.gamma);
    return out;
}

// Factor F with F F' = Sigma for sampling; eigendecomposition with clamped
// negative eigenvalues so PSD inputs are accepted.
Eigen::MatrixXd psd_factor(const Eigen::MatrixXd& cov) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov);
    const Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * ev.asDiagonal();
}

Eigen::MatrixXd sample_policy(const GapExperiment& exp, const Eigen::MatrixXd* factor, RngEngine& rng) {
    const auto K = exp.policy_mean.rows();
    const auto L = exp.policy_mean.cols();
    std::normal_distribution<double> normal(0.0, 1.0);
    Eigen::VectorXd xi(K * L);
    for (Eigen::Index i = 0; i < xi.size(); ++i) xi(i) = normal(rng);
    Eigen::MatrixXd theta = exp.policy_mean;
    if (exp.isotropic) {
        const double sd = std::sqrt(exp.iso_variance);
        theta += sd * Eigen::Map<const Eigen::MatrixXd>(xi.data(), K, L);
    } else {
        const Eigen::VectorXd dev = (*factor) * xi;
        theta += Eigen::Map<const Eigen::MatrixXd>(dev.data(), K, L);
    }
    return theta;
}

// vec(theta) is column-major, so (z kron R)(k + K*l) = z_l R_k.
Eigen::VectorXd kron_signal_return(const Eigen::VectorXd& z, const Eigen::VectorXd& r) {
    Eigen::VectorXd v(z.size() * r.size());
    for (Eigen::Index l = 0; l < z.size(); ++l)
        for (Eigen::Index k = 0; k < r.size(); ++k) v(k + r.size() * l) = z(l) * r(k);
    return v;
}

double covariance_quadratic_form(const GapExperiment& exp, const Eigen::VectorXd& v) {
    if (exp.isotropic) return exp.iso_variance * v.squaredNorm();
    return v.dot(exp.full_cov * v);
}

struct GaussHermite {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;  // normalized: E[f(X)] = sum w_i f(mu + sqrt(2) s x_i)
};

GaussHermite gauss_hermite(int n) {
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) {
        const double b = std::sqrt(i / 2.0);
        jacobi(i, i - 1) = b;
        jacobi(i - 1, i) = b;
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
    GaussHermite gh;
    gh.nodes = es.eigenvalues();
    gh.weights = es.eigenvectors().row(0).transpose().array().square();
    return gh;
}

}  // namespace

void FiniteReturnModel::validate() const {
    if (probs.size() != atoms.rows()) throw DataError("return model: probability/atom count mismatch");
    if ((probs.array() < 0.0).any() || std::abs(probs.sum() - 1.0) > 1e-9)
        throw DataError("return model: probabilities must be nonnegative and sum to 1");
}

Eigen::MatrixXd FiniteReturnModel::covariance() const {
    const Eigen::VectorXd mu = mean();
    Eigen::MatrixXd cov = Eigen::MatrixXd::Zero(atoms.cols(), atoms.cols());
    for (Eigen::Index a = 0; a < probs.size(); ++a) {
        const Eigen::VectorXd d = atoms.row(a).transpose() - mu;
        cov += probs(a) * d * d.transpose();
    }
    return cov;
}

void GapExperiment::validate() const {
    if (policy_mean.rows() != benchmark.size()) throw DataError("gap experiment: benchmark length mismatch");
    if (policy_mean.cols() != signal.size()) throw DataError("gap experiment: signal length mismatch");
    if (isotropic) {
        if (iso_variance < 0.0) throw DataError("gap experiment: negative isotropic variance");
    } else if (full_cov.rows() != policy_mean.size() || full_cov.cols() != policy_mean.size()) {
        throw DataError("gap experiment: full covariance has the wrong shape");
    }
    if (mc_draws < 1000) throw DataError("gap experiment: mc_draws must be >= 1000");
    if (std::holds_alternative<FiniteReturnModel>(returns)) std::get<FiniteReturnModel>(returns).validate();
}

GapEstimate jensen_gap_mc(const GapExperiment& experiment, std::uint64_t seed) {
    experiment.validate();
    const FiniteReturnModel model = materialize(experiment, seed);
    const Eigen::MatrixXd factor =
        experiment.isotropic ? Eigen::MatrixXd() : psd_factor(experiment.full_cov);

    GapEstimate out;
    out.utility_at_mean = expected_utility(experiment.policy_mean, experiment, model);

    // Degenerate posterior: every draw is the mean, the gap is exactly zero.
    const bool zero_cov = experiment.isotropic ? experiment.iso_variance == 0.0 : experiment.full_cov.isZero(0.0);
    if (zero_cov) return out;

    const int M = experiment.mc_draws;
    const int nc = num_chunks(M);
    std::vector<double> sum(nc, 0.0), sumsq(nc, 0.0);
#pragma omp parallel for schedule(static)
    for (int c = 0; c < nc; ++c) {
        const int lo = c * kReduceChunk;
        const int hi = std::min(lo + kReduceChunk, M);
        double s = 0.0, s2 = 0.0;
        for (int m = lo; m < hi; ++m) {
            RngEngine rng = make_stream(seed, static_cast<std::uint64_t>(m) + 1);
            const Eigen::MatrixXd theta = sample_policy(experiment, &factor, rng);
            const double g = expected_utility(theta, experiment, model);
            s += g;
            s2 += g * g;
        }
        sum[c] = s;
        sumsq[c] = s2;
    }
    double total = 0.0, total_sq = 0.0;
    for (int c = 0; c < nc; ++c) {
        total += sum[c];
        total_sq += sumsq[c];
    }
    const double mean = total / M;
    const double var = std::max(0.0, (total_sq - M * mean * mean) / std::max(M - 1, 1));
    out.gap = out.utility_at_mean - mean;
    out.std_error = std::sqrt(var / M);
    return out;
}

double jensen_gap_quadrature(const GapExperiment& experiment, int nodes) {
    experiment.validate();
    if (!std::holds_alternative<FiniteReturnModel>(experiment.returns))
        throw DataError("jensen_gap_quadrature: finite-support return model required");
    const auto& model = std::get<FiniteReturnModel>(experiment.returns);
    const GaussHermite gh = gauss_hermite(nodes);

    const Eigen::VectorXd w_mean = experiment.benchmark + experiment.policy_mean * experiment.signal;
    double g_mean = 0.0;
    double e_theta = 0.0;
    for (Eigen::Index a = 0; a < model.probs.size(); ++a) {
        const Eigen::VectorXd r = model.atoms.row(a).transpose();
        const double center = w_mean.dot(r);
        g_mean += model.probs(a) * evaluate_utility(center, experiment.utility, experiment.gamma);
        const double s2 = covariance_quadratic_form(experiment, kron_signal_return(experiment.signal, r));
        const double s = std::sqrt(std::max(s2, 0.0));
        double integral = 0.0;
        for (int i = 0; i < nodes; ++i)
            integral += gh.weights(i) *
                        evaluate_utility(center + std::sqrt(2.0) * s * gh.nodes(i), experiment.utility,
                                         experiment.gamma);
        e_theta += model.probs(a) * integral;
    }
    return g_mean - e_theta;
}

double gap_second_order(const GapExperiment& experiment) {
    experiment.validate();
    if (!std::holds_alternative<FiniteReturnModel>(experiment.returns))
        throw DataError("gap_second_order: finite-support return model required");
    const auto& model = std::get<FiniteReturnModel>(experiment.returns);
    const Eigen::VectorXd w_mean = experiment.benchmark + experiment.policy_mean * experiment.signal;
    double trace = 0.0;
    for (Eigen::Index a = 0; a < model.probs.size(); ++a) {
        const Eigen::VectorXd r = model.atoms.row(a).transpose();
        const double u2 = utility_second_derivative(w_mean.dot(r), experiment.utility, experiment.gamma);
        trace += model.probs(a) * u2 * covariance_quadratic_form(experiment, kron_signal_return(experiment.signal, r));
    }
    return -0.5 * trace;
}

double quadratic_gap_closed_form(const GapExperiment& experiment) {
    if (!experiment.isotropic) throw DataError("quadratic_gap_closed_form: isotropic covariance required");
    if (!std::holds_alternative<FiniteReturnModel>(experiment.returns))
        throw DataError("quadratic_gap_closed_form: finite-support return model required");
    const auto& model = std::get<FiniteReturnModel>(experiment.returns);
    double e_r2 = 0.0;
    for (Eigen::Index a = 0; a < model.probs.size(); ++a)
        e_r2 += model.probs(a) * model.atoms.row(a).squaredNorm();
    const double z_sigma_z = experiment.iso_variance * experiment.signal.squaredNorm();
    return 0.5 * experiment.gamma * z_sigma_z * e_r2;
}

VarianceDecomposition variance_decomposition_check(const GapExperiment& experiment, std::uint64_t seed,
                                                   int batches) {
    experiment.validate();
    const FiniteReturnModel model = materialize(experiment, seed);
    const Eigen::VectorXd mu = model.mean();
    const Eigen::MatrixXd omega = model.covariance();
    const auto L = experiment.signal.size();
    const auto K = experiment.policy_mean.rows();

    const Eigen::MatrixXd row_cov = experiment.row_cov.size() > 0
                                        ? experiment.row_cov
                                        : Eigen::MatrixXd(experiment.iso_variance *
                                                          Eigen::MatrixXd::Identity(L, L));
    const Eigen::MatrixXd row_factor = psd_factor(row_cov);

    // Cumulative atom probabilities for inverse-CDF sampling of R.
    std::vector<double> cdf(model.probs.size());
    double acc = 0.0;
    for (Eigen::Index a = 0; a < model.probs.size(); ++a) {
        acc += model.probs(a);
        cdf[a] = acc;
    }

    const int per_batch = std::max(experiment.mc_draws / std::max(batches, 1), 2);
    std::vector<double> resid(batches), totals(batches), markets(batches);
    const double est_exact = experiment.signal.dot(row_cov * experiment.signal) * mu.squaredNorm();

#pragma omp parallel for schedule(static)
    for (int b = 0; b < batches; ++b) {
        RngEngine rng = make_stream(seed, 0xDECull * (b + 1));
        std::normal_distribution<double> normal(0.0, 1.0);
        std::uniform_real_distribution<double> uniform(0.0, 1.0);
        double sum = 0.0, sumsq = 0.0, market = 0.0;
        for (int i = 0; i < per_batch; ++i) {
            Eigen::MatrixXd theta = experiment.policy_mean;
            for (Eigen::Index k = 0; k < K; ++k) {
                Eigen::VectorXd xi(L);
                for (Eigen::Index l = 0; l < L; ++l) xi(l) = normal(rng);
                theta.row(k) += (row_factor * xi).transpose();
            }
            const Eigen::VectorXd w = experiment.benchmark + theta * experiment.signal;
            const double u = uniform(rng);
            const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
            const auto a = std::min<Eigen::Index>(it - cdf.begin(), model.probs.size() - 1);
            const double rp = w.dot(model.atoms.row(a).transpose());
            sum += rp;
            sumsq += rp * rp;
            market += w.dot(omega * w);
        }
        const double mean = sum / per_batch;
        totals[b] = (sumsq - per_batch * mean * mean) / (per_batch - 1);
        markets[b] = market / per_batch;
        resid[b] = totals[b] - markets[b] - est_exact;
    }

    VarianceDecomposition out;
    out.estimation_exact = est_exact;
    double rm = 0.0;
    for (int b = 0; b < batches; ++b) {
        out.total_mc += totals[b] / batches;
        out.market_mc += markets[b] / batches;
        rm += resid[b] / batches;
    }
    double rvar = 0.0;
    for (int b = 0; b < batches; ++b) rvar += (resid[b] - rm) * (resid[b] - rm);
    out.residual = rm;
    out.residual_se = std::sqrt(rvar / std::max(batches - 1, 1) / batches);
    return out;
}

}  // namespace bppp
