#include "rsbi/likelihood.hpp"

#include <algorithm>
#include <cmath>

namespace rsbi {

VectorXd batch_summary(const Sample& batch) {
    const int d = batch.dim();
    VectorXd out(kSummaryPerDim * d);
    for (int c = 0; c < d; ++c) {
        const VectorXd x = batch.points.col(c);
        const VectorXd xs = sorted_copy(x);
        int o = kSummaryPerDim * c;
        out[o + 0] = mean(x);
        out[o + 1] = variance(x);
        out[o + 2] = skewness(x);
        out[o + 3] = kurtosis(x);
        for (int q = 0; q < 5; ++q)
            out[o + 4 + q] = quantile_sorted(xs, 0.1 + 0.2 * q);
    }
    return out;
}

SbiDataset build_dataset(const MatrixXd& thetas, const std::vector<Sample>& sims,
                         std::uint64_t seed) {
    const int N = static_cast<int>(thetas.rows());
    if (N < 2) throw std::invalid_argument("build_dataset: need N >= 2");
    if (static_cast<int>(sims.size()) != N)
        throw std::invalid_argument("build_dataset: |thetas| != |sims|");

    SbiDataset ds;
    CounterRng rng(derive_seed(seed, SeedTag::Permutation));
    ds.permutation = rng.permutation(N);
    ds.z.resize(2 * N);
    ds.thetas.resize(2 * N, thetas.cols());
    ds.summaries.resize(2 * N, kSummaryPerDim * sims.front().dim());
    for (int j = 0; j < N; ++j) {
        const VectorXd s = batch_summary(sims[j]);
        ds.z[j] = 1;
        ds.thetas.row(j) = thetas.row(j);
        ds.summaries.row(j) = s;
        ds.z[N + j] = 0;
        ds.thetas.row(N + j) = thetas.row(ds.permutation[j]);
        ds.summaries.row(N + j) = s;
    }
    return ds;
}

double LogisticModel::score(const VectorXd& features) const {
    double acc = w[0];
    for (int i = 0; i < features.size(); ++i) {
        const double sd = feat_sd[i] > 0.0 ? feat_sd[i] : 1.0;
        acc += w[i + 1] * (features[i] - feat_mean[i]) / sd;
    }
    return acc;
}

double LogisticModel::prob(const VectorXd& features) const {
    const double p = 1.0 / (1.0 + std::exp(-score(features)));
    return std::clamp(p, 1e-6, 1.0 - 1e-6);
}

LogisticModel fit_logistic(const MatrixXd& X, const VectorXi& z, double ridge,
                           double tol, int max_iter) {
    const int n = static_cast<int>(X.rows());
    const int p = static_cast<int>(X.cols());
    if (z.size() != n)
        throw std::invalid_argument("fit_logistic: label size mismatch");

    LogisticModel m;
    m.feat_mean = X.colwise().mean();
    m.feat_sd.resize(p);
    for (int c = 0; c < p; ++c)
        m.feat_sd[c] = std::sqrt(variance(X.col(c)));

    MatrixXd A(n, p + 1);
    A.col(0).setOnes();
    for (int c = 0; c < p; ++c) {
        const double sd = m.feat_sd[c] > 0.0 ? m.feat_sd[c] : 1.0;
        A.col(c + 1) = (X.col(c).array() - m.feat_mean[c]) / sd;
    }
    const VectorXd y = z.cast<double>();

    VectorXd w = VectorXd::Zero(p + 1);
    VectorXd rvec = VectorXd::Constant(p + 1, ridge);
    rvec[0] = 0.0;  // intercept unpenalized

    auto objective = [&](const VectorXd& wv) {
        const VectorXd eta = A * wv;
        double ll = 0.0;
        for (int i = 0; i < n; ++i) {
            // -log(1 + e^eta) + y*eta, stable both tails
            const double e = eta[i];
            ll += y[i] * e - (e > 0 ? e + std::log1p(std::exp(-e))
                                    : std::log1p(std::exp(e)));
        }
        return ll - 0.5 * (rvec.array() * wv.array().square()).sum();
    };

    double cur = objective(w);
    for (int it = 1; it <= max_iter; ++it) {
        const VectorXd eta = A * w;
        VectorXd prob(n), s(n);
        for (int i = 0; i < n; ++i) {
            prob[i] = 1.0 / (1.0 + std::exp(-eta[i]));
            s[i] = std::max(prob[i] * (1.0 - prob[i]), 1e-10);
        }
        const VectorXd grad = A.transpose() * (y - prob) - rvec.asDiagonal() * w;
        m.grad_norm = grad.cwiseAbs().maxCoeff();
        m.iterations = it - 1;
        if (m.grad_norm <= tol) {
            m.w = w;
            return m;
        }
        MatrixXd H = A.transpose() * s.asDiagonal() * A;
        H.diagonal() += rvec;
        VectorXd step = Eigen::LDLT<MatrixXd>(H).solve(grad);
        // halve until the penalized log-likelihood does not decrease
        double scale = 1.0;
        for (int half = 0; half < 40; ++half) {
            const VectorXd cand = w + scale * step;
            const double val = objective(cand);
            if (val >= cur - 1e-12) {
                w = cand;
                cur = val;
                break;
            }
            scale *= 0.5;
        }
    }
    // final gradient check after the last update
    {
        const VectorXd eta = A * w;
        VectorXd prob(n);
        for (int i = 0; i < n; ++i) prob[i] = 1.0 / (1.0 + std::exp(-eta[i]));
        const VectorXd grad = A.transpose() * (y - prob) - rvec.asDiagonal() * w;
        m.grad_norm = grad.cwiseAbs().maxCoeff();
        m.iterations = max_iter;
        if (m.grad_norm <= tol) {
            m.w = w;
            return m;
        }
    }
    throw std::runtime_error("fit_logistic: no convergence; gradient norm " +
                             std::to_string(m.grad_norm));
}

VectorXd assemble_features(const VectorXd& summary, const VectorXd& theta) {
    const int q = static_cast<int>(summary.size());
    const int d = static_cast<int>(theta.size());
    VectorXd f(q + d + q * d);
    f.head(q) = summary;
    f.segment(q, d) = theta;
    for (int a = 0; a < d; ++a) f.segment(q + d + a * q, q) = summary * theta[a];
    return f;
}

double LikelihoodModel::log_likelihood(const VectorXd& theta,
                                       const VectorXd& summary) const {
    return clf_.score(assemble_features(summary, theta));
}

double LikelihoodModel::log_likelihood(const VectorXd& theta,
                                       const Sample& batch) const {
    return log_likelihood(theta, batch_summary(batch));
}

LikelihoodModel fit_likelihood(const SbiDataset& ds, double ridge, double tol,
                               int max_iter) {
    const int rows = static_cast<int>(ds.z.size());
    MatrixXd X(rows, ds.summaries.cols() + ds.thetas.cols() +
                         ds.summaries.cols() * ds.thetas.cols());
    for (int i = 0; i < rows; ++i)
        X.row(i) = assemble_features(ds.summaries.row(i), ds.thetas.row(i));
    return LikelihoodModel(fit_logistic(X, ds.z, ridge, tol, max_iter));
}

InvertTestResult invert_test_cs(const MatrixXd& thetas,
                                const std::vector<Sample>& sims,
                                const Sample& obs, const StatFn& T, double alpha,
                                double bandwidth, const MatrixXd* eval_grid) {
    const int N = static_cast<int>(thetas.rows());
    if (static_cast<int>(sims.size()) != N)
        throw std::invalid_argument("invert_test_cs: |thetas| != |sims|");

    InvertTestResult out;
    out.b.resize(N);
    VectorXd z(N);
    parallel_for(N, [&](int j) {
        const VectorXd th = thetas.row(j);
        const double sim_stat = T(th, sims[j]);
        const double obs_stat = T(th, obs);
        out.b[j] = sim_stat >= obs_stat ? 1 : 0;  // ties count as >=
        z[j] = out.b[j];
    });

    const MatrixXd& eval = eval_grid ? *eval_grid : thetas;
    out.surface.thetas = thetas;
    out.surface.raw = z;
    out.surface.eval = eval;
    out.surface.alpha = alpha;
    out.surface.bandwidth =
        bandwidth > 0.0 ? bandwidth : default_bandwidth(thetas);
    out.surface.smoothed =
        nw_regress(thetas, z, eval, out.surface.bandwidth).fitted;
    out.cs = threshold_surface(out.surface, alpha);
    return out;
}

}  // namespace rsbi
