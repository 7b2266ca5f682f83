#include "rsbi/relative_fit.hpp"

#include <algorithm>
#include <cmath>

namespace rsbi {

std::pair<Sample, Sample> split_sample(const Sample& data, std::uint64_t seed) {
    data.validate();
    const int n = data.n();
    if (n < 2) throw std::invalid_argument("split_sample: need n >= 2");
    CounterRng rng(derive_seed(seed, SeedTag::Split));
    const std::vector<int> idx = rng.permutation(n);
    const int n0 = n / 2;
    Sample d0, d1;
    d0.points.resize(n0, data.dim());
    d1.points.resize(n - n0, data.dim());
    for (int i = 0; i < n0; ++i) d0.points.row(i) = data.points.row(idx[i]);
    for (int i = n0; i < n; ++i) d1.points.row(i - n0) = data.points.row(idx[i]);
    d0.provenance = d1.provenance = data.provenance;
    d0.seed = d1.seed = seed;
    return {d0, d1};
}

DeltaStat delta_hat(const DiscrepancyTerms& at_theta,
                    const DiscrepancyTerms& at_ref) {
    if (at_theta.u.size() != at_ref.u.size())
        throw std::invalid_argument("delta_hat: mismatched observed samples");
    if (at_theta.has_w() != at_ref.has_w())
        throw std::invalid_argument("delta_hat: mismatched term structure");
    const int n1 = static_cast<int>(at_theta.u.size());
    DeltaStat out;
    out.delta = at_theta.value() - at_ref.value();

    const VectorXd du = at_theta.u - at_ref.u;
    double var = variance(du) / n1;
    var += variance(at_theta.v) / at_theta.v.size() +
           variance(at_ref.v) / at_ref.v.size();
    if (at_theta.has_w())
        var += variance(at_theta.w) / at_theta.w.size() +
               variance(at_ref.w) / at_ref.w.size();
    out.se = std::sqrt(var + 1.0 / n1);
    return out;
}

namespace {

bool needs_ratios(const DiscrepancyKind& kind) {
    return kind.family == DiscrepancyKind::Family::Hellinger ||
           kind.family == DiscrepancyKind::Family::PowerDivergence;
}

// Data-half context: reference draw, fitted data/reference ratio and the
// closed-form reference density, shared across the theta grid.
struct StageContext {
    Sample ref;
    RatioFn r_hat;
    std::function<double(double)> g_logpdf;

    DiscrepancyTerms terms_at(const VectorXd& theta, const Sample& data,
                              const RelFitProblem& prob, const RelFitConfig& cfg,
                              std::uint64_t sim_seed) const {
        const Sample sim = simulate(prob.model_at(theta), cfg.m_sim, sim_seed);
        EstimatorInputs in;
        in.obs = &data;
        in.sim = &sim;
        in.r_hat = r_hat;
        in.g_logpdf = g_logpdf;
        if (needs_ratios(prob.kind)) {
            RatioFitConfig rc = cfg.ratio;
            rc.seed = derive_seed(sim_seed, SeedTag::Centers);
            const RatioModel s_model = fit_ulsif(sim, ref, rc);
            in.s_hat = ratio_fn(s_model);
        }
        in.ref = &ref;
        return estimate_terms(prob.kind, in);
    }
};

StageContext make_stage(const Sample& data, const RelFitProblem& prob,
                        const RelFitConfig& cfg, std::uint64_t stage_seed) {
    StageContext ctx;
    if (needs_ratios(prob.kind)) {
        ctx.ref = simulate(prob.reference, cfg.k_ref,
                           derive_seed(stage_seed, SeedTag::Reference));
        ctx.ref.provenance = Provenance::Reference;
        RatioFitConfig rc = cfg.ratio;
        rc.seed = derive_seed(stage_seed, SeedTag::Centers);
        const RatioModel r_model = fit_ulsif(data, ctx.ref, rc);
        ctx.r_hat = ratio_fn(r_model);
        const ModelDensity g(prob.reference);
        ctx.g_logpdf = [g](double y) { return g.log_density(y); };
    }
    return ctx;
}

}  // namespace

int preliminary_estimate(const Sample& data, const MatrixXd& grid,
                         const RelFitProblem& prob, const RelFitConfig& cfg,
                         VectorXd* curve) {
    if (grid.rows() < 1)
        throw std::invalid_argument("preliminary_estimate: empty grid");
    const StageContext ctx =
        make_stage(data, prob, cfg, derive_seed(cfg.seed, SeedTag::Replication, 0));
    const int N = static_cast<int>(grid.rows());
    VectorXd values(N);
    parallel_for(N, [&](int j) {
        const std::uint64_t sim_seed = derive_seed(cfg.seed, SeedTag::Simulate, j);
        try {
            values[j] =
                ctx.terms_at(grid.row(j), data, prob, cfg, sim_seed).value();
        } catch (const std::exception&) {
            values[j] = std::numeric_limits<double>::quiet_NaN();
        }
    });
    int best = -1;
    for (int j = 0; j < N; ++j) {
        if (!std::isfinite(values[j])) continue;
        if (best < 0 || values[j] < values[best]) best = j;
    }
    if (best < 0)
        throw std::runtime_error(
            "preliminary_estimate: no finite discrepancy estimate on the grid");
    if (curve) *curve = values;
    return best;
}

RelFitResult relative_fit_cs(const Sample& data, const MatrixXd& grid,
                             const RelFitProblem& prob, double alpha,
                             const RelFitConfig& cfg) {
    if (!(alpha > 0.0 && alpha < 1.0))
        throw std::invalid_argument("relative_fit_cs: alpha must be in (0,1)");
    const auto [d0, d1] = split_sample(data, cfg.seed);

    RelFitResult res;
    res.prelim_index = preliminary_estimate(d0, grid, prob, cfg, &res.prelim_curve);
    const VectorXd theta_hat = grid.row(res.prelim_index);

    // held-out half: fresh reference draw and ratio fit
    const StageContext ctx =
        make_stage(d1, prob, cfg, derive_seed(cfg.seed, SeedTag::Replication, 1));
    const int N = static_cast<int>(grid.rows());
    const std::uint64_t ref_sim_seed =
        derive_seed(cfg.seed, SeedTag::Simulate, 1000003);
    const DiscrepancyTerms at_ref =
        ctx.terms_at(theta_hat, d1, prob, cfg, ref_sim_seed);

    res.delta.resize(N);
    res.se.resize(N);
    VectorXd z(N);
    parallel_for(N, [&](int j) {
        const std::uint64_t sim_seed =
            cfg.common_sim_seed
                ? ref_sim_seed
                : derive_seed(cfg.seed, SeedTag::Simulate, 2000003 + j);
        const DiscrepancyTerms at_j =
            ctx.terms_at(grid.row(j), d1, prob, cfg, sim_seed);
        const DeltaStat d = delta_hat(at_j, at_ref);
        res.delta[j] = d.delta;
        res.se[j] = d.se;
        z[j] = normal_cdf(-d.delta / d.se);
    });

    res.surface.thetas = grid;
    res.surface.raw = z;
    res.surface.eval = grid;
    res.surface.alpha = alpha;
    res.surface.bandwidth =
        cfg.bandwidth > 0.0 ? cfg.bandwidth : default_bandwidth(grid);
    res.surface.smoothed =
        nw_regress(grid, z, grid, res.surface.bandwidth).fitted;
    res.cs = threshold_surface(res.surface, alpha);
    return res;
}

SandwichResult sandwich_cs(
    const std::function<DiscrepancyTerms(const VectorXd&)>& terms_at,
    const VectorXd& theta_hat, const MatrixXd& grid, double alpha, double step) {
    const int d = static_cast<int>(theta_hat.size());
    const DiscrepancyTerms base = terms_at(theta_hat);
    const int n = static_cast<int>(base.u.size());
    const int m = static_cast<int>(base.v.size());
    const int k = base.has_w() ? static_cast<int>(base.w.size()) : 0;

    std::vector<DiscrepancyTerms> plus(d), minus(d);
    for (int a = 0; a < d; ++a) {
        VectorXd tp = theta_hat, tm = theta_hat;
        tp[a] += step;
        tm[a] -= step;
        plus[a] = terms_at(tp);
        minus[a] = terms_at(tm);
    }

    // M: covariance of per-sample gradient contributions
    MatrixXd gu(n, d), gv(m, d);
    MatrixXd gw(std::max(k, 1), d);
    for (int a = 0; a < d; ++a) {
        gu.col(a) = (plus[a].u - minus[a].u) / (2.0 * step);
        gv.col(a) = (plus[a].v - minus[a].v) / (2.0 * step);
        if (k > 0) gw.col(a) = (plus[a].w - minus[a].w) / (2.0 * step);
    }
    auto cov = [](const MatrixXd& g) {
        const Eigen::RowVectorXd mu = g.colwise().mean();
        const MatrixXd c = g.rowwise() - mu;
        return MatrixXd((c.transpose() * c) / (g.rows() - 1.0));
    };
    MatrixXd M = cov(gu);
    M += (static_cast<double>(n) / m) * cov(gv);
    if (k > 0) M += (static_cast<double>(n) / k) * cov(gw);

    // G: Hessian of the discrepancy value by second differences
    MatrixXd G(d, d);
    const double f0 = base.value();
    for (int a = 0; a < d; ++a)
        G(a, a) = (plus[a].value() - 2.0 * f0 + minus[a].value()) / (step * step);
    for (int a = 0; a < d; ++a)
        for (int b = a + 1; b < d; ++b) {
            VectorXd tpp = theta_hat, tpm = theta_hat, tmp = theta_hat,
                     tmm = theta_hat;
            tpp[a] += step; tpp[b] += step;
            tpm[a] += step; tpm[b] -= step;
            tmp[a] -= step; tmp[b] += step;
            tmm[a] -= step; tmm[b] -= step;
            const double v = (terms_at(tpp).value() - terms_at(tpm).value() -
                              terms_at(tmp).value() + terms_at(tmm).value()) /
                             (4.0 * step * step);
            G(a, b) = G(b, a) = v;
        }

    Eigen::FullPivLU<MatrixXd> lu(G);
    if (!lu.isInvertible())
        throw std::runtime_error(
            "sandwich_cs: singular curvature estimate; use relative_fit_cs");
    const MatrixXd Ginv = lu.inverse();
    SandwichResult out;
    out.theta_hat = theta_hat;
    out.sigma = Ginv * M * Ginv.transpose();

    Eigen::FullPivLU<MatrixXd> slu(out.sigma);
    if (!slu.isInvertible())
        throw std::runtime_error(
            "sandwich_cs: singular sandwich covariance; use relative_fit_cs");
    const MatrixXd Sinv = slu.inverse();
    out.chi2 = chi2_quantile(1.0 - alpha, d);

    out.cs.grid = grid;
    out.cs.alpha = alpha;
    out.cs.membership.resize(grid.rows());
    for (int i = 0; i < grid.rows(); ++i) {
        const VectorXd diff = grid.row(i).transpose() - theta_hat;
        out.cs.membership[i] =
            (n * diff.dot(Sinv * diff) <= out.chi2) ? 1 : 0;
    }
    return out;
}

std::vector<Interval> hulc_interval(const Sample& data, const PointEstimator& est,
                                    double alpha, std::uint64_t seed) {
    const int B =
        static_cast<int>(std::ceil(std::log(2.0 / alpha) / std::log(2.0)));
    const int n = data.n();
    if (n < B) throw std::invalid_argument("hulc_interval: need n >= B batches");
    CounterRng rng(derive_seed(seed, SeedTag::Batches));
    const std::vector<int> idx = rng.permutation(n);

    std::vector<VectorXd> estimates;
    for (int b = 0; b < B; ++b) {
        const int lo = b * n / B, hi = (b + 1) * n / B;
        Sample batch;
        batch.points.resize(hi - lo, data.dim());
        for (int i = lo; i < hi; ++i)
            batch.points.row(i - lo) = data.points.row(idx[i]);
        estimates.push_back(est(batch));
    }
    const int d = static_cast<int>(estimates.front().size());
    std::vector<Interval> out(d);
    for (int c = 0; c < d; ++c) {
        double lo = estimates[0][c], hi = estimates[0][c];
        for (const auto& e : estimates) {
            lo = std::min(lo, e[c]);
            hi = std::max(hi, e[c]);
        }
        out[c] = {lo, hi};
    }
    return out;
}

std::vector<Interval> cheap_bootstrap(const Sample& data,
                                      const PointEstimator& est, int b,
                                      double alpha, std::uint64_t seed) {
    if (b < 1) throw std::invalid_argument("cheap_bootstrap: need b >= 1");
    const int n = data.n();
    std::vector<VectorXd> estimates;
    for (int rep = 0; rep < b; ++rep) {
        CounterRng rng(derive_seed(seed, SeedTag::Bootstrap, rep));
        Sample boot;
        boot.points.resize(n, data.dim());
        for (int i = 0; i < n; ++i)
            boot.points.row(i) = data.points.row(rng.uniform_int(n));
        estimates.push_back(est(boot));
    }
    const int d = static_cast<int>(estimates.front().size());
    const double t = student_t_quantile(1.0 - alpha / 2.0, b);
    std::vector<Interval> out(d);
    for (int c = 0; c < d; ++c) {
        double mu = 0.0;
        for (const auto& e : estimates) mu += e[c];
        mu /= b;
        double s2 = 0.0;
        for (const auto& e : estimates) s2 += (e[c] - mu) * (e[c] - mu);
        const double sd = std::sqrt(s2 / b);
        out[c] = {mu - t * sd, mu + t * sd};
    }
    return out;
}

Interval mmd_gaussian_ci(double theta_hat, int n, int m, double kernel_h,
                         double sigma, GaussianCiMode mode, double alpha) {
    if (!(kernel_h > 0.0) || !(sigma > 0.0))
        throw std::domain_error("mmd_gaussian_ci: h and sigma must be > 0");
    const double h2 = kernel_h * kernel_h;
    const double d = 1.0;
    double C;
    if (mode == GaussianCiMode::Location) {
        const double s2 = sigma * sigma;
        C = s2 * std::pow((h2 + s2) * (3.0 * s2 + h2), -d / 2.0 - 1.0) *
            std::pow(h2 + 2.0 * s2, d + 2.0);
    } else {
        const double s = 2.0 * theta_hat;
        const double core = std::pow(h2 + s, -d / 2.0 - 2.0) *
                            std::pow(h2 + 2.0 * s, d + 2.0) *
                            std::pow(h2 + 3.0 * s, -d / 2.0 - 2.0) *
                            ((h2 + 2.0 * s) * (h2 + 2.0 * s) + 2.0 * s * s / d);
        C = (h2 + 2.0 * s) * (h2 + 2.0 * s) * (core - 1.0) /
            ((d + 2.0) * (d + 2.0) * s * s);
    }
    const double z = normal_quantile(1.0 - alpha / 2.0);
    const double half = z * std::sqrt(C / std::min(n, m));
    return {theta_hat - half, theta_hat + half};
}

}  // namespace rsbi
