#include "rsbi/ratio.hpp"

#include "rsbi/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace rsbi {

namespace {

// beta = (H + lambda I)^{-1} h, with a small-ridge retry when lambda = 0
VectorXd ridge_solve(const MatrixXd& H, const VectorXd& h, double lambda,
                     bool* fallback) {
    MatrixXd A = H;
    A.diagonal().array() += lambda;
    Eigen::LDLT<MatrixXd> ldlt(A);
    VectorXd beta = ldlt.solve(h);
    const double resid = (A * beta - h).norm();
    if (lambda <= 0.0 && (ldlt.info() != Eigen::Success || !beta.allFinite() ||
                          resid > 1e-6 * std::max(1.0, h.norm()))) {
        if (fallback) *fallback = true;
        A = H;
        A.diagonal().array() += 1e-8;
        beta = Eigen::LDLT<MatrixXd>(A).solve(h);
    }
    return beta;
}

}  // namespace

VectorXd RatioModel::evaluate(const MatrixXd& pts) const {
    const MatrixXd Phi = gaussian_gram(pts, centers, sigma, false);
    VectorXd r = Phi * beta;
    return r.cwiseMax(trim_lo).cwiseMin(trim_hi);
}

VectorXd evaluate_ratio(const RatioModel& model, const MatrixXd& pts) {
    return model.evaluate(pts);
}

double median_heuristic(const Sample& s) {
    s.validate();
    const int n = s.n();
    if (n < 2) throw std::invalid_argument("median_heuristic: need n >= 2");
    const int cap = std::min(n, 2000);
    const int stride = (n + cap - 1) / cap;
    std::vector<int> idx;
    for (int i = 0; i < n; i += stride) idx.push_back(i);
    const int k = static_cast<int>(idx.size());
    std::vector<double> dists;
    dists.reserve(static_cast<std::size_t>(k) * (k - 1) / 2);
    for (int i = 0; i < k; ++i)
        for (int j = i + 1; j < k; ++j)
            dists.push_back((s.points.row(idx[i]) - s.points.row(idx[j])).norm());
    std::sort(dists.begin(), dists.end());
    const std::size_t m = dists.size();
    const double med = (m % 2 == 1) ? dists[m / 2]
                                    : 0.5 * (dists[m / 2 - 1] + dists[m / 2]);
    if (!(med > 0.0)) throw std::invalid_argument("median_heuristic: zero scale");
    return med;
}

VectorXd ratio_from_classifier(const VectorXd& probs, double a, double trim_lo,
                               double trim_hi) {
    VectorXd r(probs.size());
    const double c = (1.0 - a) / a;
    for (int i = 0; i < probs.size(); ++i) {
        const double h = std::clamp(probs[i], 1e-6, 1.0 - 1e-6);
        r[i] = c * (1.0 - h) / h;
    }
    return r.cwiseMax(trim_lo).cwiseMin(trim_hi);
}

RatioModel fit_ulsif(const Sample& num, const Sample& den,
                     const RatioFitConfig& cfg, RatioFitReport* report) {
    num.validate();
    den.validate();
    if (num.dim() != den.dim())
        throw std::invalid_argument("fit_ulsif: dimension mismatch");
    const int n = num.n();
    const int m = den.n();

    // centers from the numerator sample, without replacement
    const int n_c = std::min({cfg.n_centers, n, m});
    CounterRng center_rng(derive_seed(cfg.seed, SeedTag::Centers));
    std::vector<int> order = center_rng.permutation(n);
    MatrixXd centers(n_c, num.dim());
    for (int i = 0; i < n_c; ++i) centers.row(i) = num.points.row(order[i]);

    std::vector<double> sigmas = cfg.sigma_grid;
    if (sigmas.empty()) {
        Sample pooled;
        pooled.points.resize(n + m, num.dim());
        pooled.points.topRows(n) = num.points;
        pooled.points.bottomRows(m) = den.points;
        const double med = median_heuristic(pooled);
        sigmas = {0.15 * med, 0.25 * med, 0.5 * med, med, 2.0 * med};
    }
    const std::vector<double>& lambdas = cfg.lambda_grid;
    const bool do_cv = (sigmas.size() > 1 || lambdas.size() > 1);
    if (do_cv && cfg.cv_folds < 2)
        throw std::invalid_argument("fit_ulsif: cv_folds must be >= 2 with grids");

    const int S = static_cast<int>(sigmas.size());
    const int L = static_cast<int>(lambdas.size());
    MatrixXd cv_loss = MatrixXd::Zero(S, L);

    if (do_cv) {
        CounterRng fold_rng(derive_seed(cfg.seed, SeedTag::CvFolds));
        std::vector<int> fold_num(n), fold_den(m);
        {
            std::vector<int> pn = fold_rng.permutation(n);
            for (int i = 0; i < n; ++i) fold_num[pn[i]] = i % cfg.cv_folds;
            std::vector<int> pm = fold_rng.permutation(m);
            for (int i = 0; i < m; ++i) fold_den[pm[i]] = i % cfg.cv_folds;
        }
        for (int si = 0; si < S; ++si) {
            const MatrixXd Phi_num = gaussian_gram(num.points, centers, sigmas[si]);
            const MatrixXd Phi_den = gaussian_gram(den.points, centers, sigmas[si]);
            const MatrixXd H_full =
                Phi_den.transpose() * Phi_den;  // scaled by counts below
            const VectorXd h_full = Phi_num.colwise().sum();
            for (int f = 0; f < cfg.cv_folds; ++f) {
                MatrixXd H_val = MatrixXd::Zero(n_c, n_c);
                VectorXd h_val = VectorXd::Zero(n_c);
                int m_val = 0, n_val = 0;
                for (int i = 0; i < m; ++i)
                    if (fold_den[i] == f) {
                        H_val.noalias() +=
                            Phi_den.row(i).transpose() * Phi_den.row(i);
                        ++m_val;
                    }
                for (int i = 0; i < n; ++i)
                    if (fold_num[i] == f) {
                        h_val += Phi_num.row(i);
                        ++n_val;
                    }
                if (m_val == 0 || n_val == 0 || m_val == m || n_val == n) continue;
                const MatrixXd H_tr = (H_full - H_val) / (m - m_val);
                const VectorXd h_tr = (h_full - h_val) / (n - n_val);
                for (int li = 0; li < L; ++li) {
                    VectorXd beta = ridge_solve(H_tr, h_tr, lambdas[li], nullptr)
                                        .cwiseMax(0.0);
                    // held-out loss: mean r^2 over den fold - 2 mean r over num fold
                    const double qterm =
                        beta.dot(H_val * beta) / std::max(m_val, 1);
                    const double pterm = 2.0 * beta.dot(h_val) / std::max(n_val, 1);
                    cv_loss(si, li) += (qterm - pterm) / cfg.cv_folds;
                }
            }
        }
    }

    // minimal loss; ties -> larger lambda, then larger sigma
    int best_s = 0, best_l = 0;
    double best = cv_loss(0, 0);
    for (int si = 0; si < S; ++si)
        for (int li = 0; li < L; ++li) {
            const double v = cv_loss(si, li);
            const bool better =
                v < best ||
                (v == best && (lambdas[li] > lambdas[best_l] ||
                               (lambdas[li] == lambdas[best_l] &&
                                sigmas[si] > sigmas[best_s])));
            if (better) {
                best = v;
                best_s = si;
                best_l = li;
            }
        }

    RatioModel model;
    model.centers = centers;
    model.sigma = sigmas[best_s];
    model.lambda = lambdas[best_l];
    model.trim_lo = cfg.trim_lo;
    model.trim_hi = cfg.trim_hi;

    const MatrixXd Phi_num = gaussian_gram(num.points, centers, model.sigma);
    const MatrixXd Phi_den = gaussian_gram(den.points, centers, model.sigma);
    const MatrixXd H = (Phi_den.transpose() * Phi_den) / m;
    const VectorXd h = Phi_num.colwise().mean();
    const VectorXd beta_pre = ridge_solve(H, h, model.lambda, &model.ridge_fallback);
    model.beta = beta_pre.cwiseMax(0.0);

    if (report) {
        report->sigma_grid = sigmas;
        report->lambda_grid = lambdas;
        report->cv_loss = cv_loss;
        report->sigma_index = best_s;
        report->lambda_index = best_l;
        report->beta_pre = beta_pre;
        report->H = H;
        report->h = h;
    }
    return model;
}

RatioFn ratio_fn(const RatioModel& model) {
    return [model](const MatrixXd& pts) { return model.evaluate(pts); };
}

RatioFn ratio_fn(std::function<double(double)> log_num,
                 std::function<double(double)> log_den, double trim_lo,
                 double trim_hi) {
    return [=](const MatrixXd& pts) -> VectorXd {
        VectorXd r(pts.rows());
        for (int i = 0; i < pts.rows(); ++i)
            r[i] = std::exp(log_num(pts(i, 0)) - log_den(pts(i, 0)));
        return r.cwiseMax(trim_lo).cwiseMin(trim_hi);
    };
}

}  // namespace rsbi
