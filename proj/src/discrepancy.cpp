#include "rsbi/discrepancy.hpp"

#include <algorithm>
#include <cmath>

namespace rsbi {

DiscrepancyKind DiscrepancyKind::power_divergence(double gamma) {
    DiscrepancyKind k;
    k.family = Family::PowerDivergence;
    k.gamma = gamma;
    return k;
}

DiscrepancyKind DiscrepancyKind::mmd(const KernelSpec& ks) {
    DiscrepancyKind k;
    k.family = Family::Mmd;
    k.kernel = ks;
    return k;
}

DiscrepancyKind DiscrepancyKind::mmd_studentized(const KernelSpec& ks) {
    DiscrepancyKind k;
    k.family = Family::MmdStudentized;
    k.kernel = ks;
    return k;
}

std::string DiscrepancyKind::name() const {
    switch (family) {
        case Family::Hellinger: return "hellinger";
        case Family::PowerDivergence: return gamma == 1.0 ? "l2" : "mdpd";
        case Family::Mmd: return "mmd";
        case Family::MmdStudentized: return "mmd_studentized";
    }
    return "?";
}

namespace {

bool all_at_bounds(const VectorXd& v, double lo, double hi) {
    for (int i = 0; i < v.size(); ++i)
        if (v[i] > lo * (1 + 1e-12) && v[i] < hi * (1 - 1e-12)) return false;
    return v.size() > 0;
}

DiscrepancyEstimate finish(const DiscrepancyKind& kind,
                           const DiscrepancyTerms& t, double stderr_,
                           DiscrepancyTerms* out) {
    DiscrepancyEstimate e;
    e.kind = kind;
    e.value = t.value();
    e.stderr_ = stderr_;
    e.u_mean = t.u.size() ? t.u.mean() : 0.0;
    e.v_mean = t.v.size() ? t.v.mean() : 0.0;
    e.has_w = t.has_w();
    e.w_mean = e.has_w ? t.w.mean() : 0.0;
    if (out) *out = t;
    return e;
}

DiscrepancyTerms hellinger_terms(const RatioFn& r_hat, const RatioFn& s_hat,
                                 const Sample& obs, const Sample& sim) {
    const VectorXd r_obs = r_hat(obs.points);
    const VectorXd s_obs = s_hat(obs.points);
    const VectorXd r_sim = r_hat(sim.points);
    const VectorXd s_sim = s_hat(sim.points);
    DiscrepancyTerms t;
    t.u = 1.0 - (s_obs.array() / r_obs.array()).sqrt();
    t.v = 1.0 - (r_sim.array() / s_sim.array()).sqrt();
    return t;
}

DiscrepancyTerms mdpd_terms(double gamma, const RatioFn& r_hat,
                            const RatioFn& s_hat, const Sample& obs,
                            const Sample& sim, const Sample& ref,
                            const std::function<double(double)>& g_logpdf) {
    auto gpow = [&](const Sample& s) {
        VectorXd g(s.n());
        for (int i = 0; i < s.n(); ++i)
            g[i] = std::exp(gamma * g_logpdf(s.points(i, 0)));
        return g;
    };
    const VectorXd g_obs = gpow(obs), g_sim = gpow(sim), g_ref = gpow(ref);
    const VectorXd s_obs = s_hat(obs.points);
    const VectorXd r_sim = r_hat(sim.points), s_sim = s_hat(sim.points);
    const VectorXd r_ref = r_hat(ref.points), s_ref = s_hat(ref.points);

    DiscrepancyTerms t;
    t.u = -(1.0 + 1.0 / gamma) * s_obs.array().pow(gamma) * g_obs.array();
    t.v = (1.0 + gamma) * (s_sim.array().pow(gamma) -
                           s_sim.array().pow(gamma - 1.0) * r_sim.array()) *
          g_sim.array();
    t.w = (-gamma * s_ref.array().pow(1.0 + gamma) +
           (1.0 + gamma) * r_ref.array() * s_ref.array().pow(gamma)) *
          g_ref.array();
    return t;
}

DiscrepancyTerms mmd_terms(const Sample& sim, const Sample& obs,
                           const KernelSpec& k) {
    if (sim.n() < 2 || obs.n() < 2)
        throw std::invalid_argument("mmd_ustat: need n, m >= 2");
    const int n = obs.n(), m = sim.n();
    const MmdSums s = mmd_sums(obs.points, sim.points, k);
    DiscrepancyTerms t;
    t.u = s.row_xx / (n - 1.0) - s.row_xy / static_cast<double>(m);
    t.v = s.row_yy / (m - 1.0) - s.row_yx / static_cast<double>(n);
    return t;
}

}  // namespace

DiscrepancyEstimate hellinger_onestep(const RatioFn& r_hat, const RatioFn& s_hat,
                                      const Sample& obs, const Sample& sim,
                                      DiscrepancyTerms* terms) {
    obs.validate();
    sim.validate();
    const DiscrepancyTerms t = hellinger_terms(r_hat, s_hat, obs, sim);
    const double n = obs.n();
    const double psi = 1.0 - 0.5 * (t.u.mean() + t.v.mean());
    const double var = std::max((1.0 - psi * psi) / 2.0, 0.0) / n + 1.0 / n;
    return finish(DiscrepancyKind::hellinger(), t, std::sqrt(var), terms);
}

DiscrepancyEstimate hellinger_onestep(const RatioModel& r_hat,
                                      const RatioModel& s_hat, const Sample& obs,
                                      const Sample& sim, DiscrepancyTerms* terms) {
    DiscrepancyEstimate e =
        hellinger_onestep(ratio_fn(r_hat), ratio_fn(s_hat), obs, sim, terms);
    e.trim_warning =
        all_at_bounds(r_hat.evaluate(obs.points), r_hat.trim_lo, r_hat.trim_hi) &&
        all_at_bounds(s_hat.evaluate(sim.points), s_hat.trim_lo, s_hat.trim_hi);
    return e;
}

DiscrepancyEstimate mdpd_onestep(double gamma, const RatioFn& r_hat,
                                 const RatioFn& s_hat, const Sample& obs,
                                 const Sample& sim, const Sample& ref,
                                 const std::function<double(double)>& g_logpdf,
                                 DiscrepancyTerms* terms) {
    if (!(gamma > 0.0 && gamma <= 1.0))
        throw std::domain_error("mdpd_onestep: gamma must be in (0, 1]");
    obs.validate();
    sim.validate();
    ref.validate();
    const DiscrepancyTerms t =
        mdpd_terms(gamma, r_hat, s_hat, obs, sim, ref, g_logpdf);
    const double psi = t.value();

    // moment plug-ins, each on the sample matching its expectation's measure
    auto sg = [&](const Sample& s, const VectorXd& gp) {
        return (s_hat(s.points).array().pow(gamma) * gp.array()).eval();
    };
    auto gpow = [&](const Sample& s) {
        VectorXd g(s.n());
        for (int i = 0; i < s.n(); ++i)
            g[i] = std::exp(gamma * g_logpdf(s.points(i, 0)));
        return g;
    };
    const VectorXd g_obs = gpow(obs), g_sim = gpow(sim), g_ref = gpow(ref);
    const auto sg_obs = sg(obs, g_obs);
    const auto sg_sim = sg(sim, g_sim);
    const VectorXd r_ref = r_hat(ref.points), s_ref = s_hat(ref.points);
    const auto sg_ref = (s_ref.array().pow(gamma) * g_ref.array()).eval();

    const double c1 = 1.0 + 1.0 / gamma;
    const double c2 = 1.0 + gamma;
    const double A = sg_obs.square().mean();
    const double B1 = sg_obs.mean();
    const double B2 = sg_sim.mean();
    const double Cq = sg_sim.square().mean();
    const double D =
        (r_ref.array().square() * s_ref.array().pow(2.0 * gamma - 1.0) *
         g_ref.array().square())
            .mean();
    const double E =
        (r_ref.array() * s_ref.array().pow(2.0 * gamma) * g_ref.array().square())
            .mean();
    const double F = (r_ref.array() * sg_ref).mean();

    const double sigma2 = c1 * c1 * A - 2.0 * c2 * c2 / gamma * B1 * B2 +
                          c2 * c2 * Cq + c2 * c2 * D - 2.0 * c2 * c2 * E +
                          2.0 * c2 * c2 / gamma * F * F - c2 * c2 * psi * psi;
    const double n = obs.n();
    const double var = std::max(sigma2, 0.0) / n + 1.0 / n;
    return finish(DiscrepancyKind::power_divergence(gamma), t, std::sqrt(var),
                  terms);
}

DiscrepancyEstimate mmd_ustat(const Sample& sim, const Sample& obs,
                              const KernelSpec& k, DiscrepancyTerms* terms) {
    const DiscrepancyTerms t = mmd_terms(sim, obs, k);
    const int n = obs.n(), m = sim.n();

    // plug-in asymptotic variance from paired couples (Y_i, Y_i(theta))
    const int N = std::min(n, m);
    const MatrixXd X = obs.points.topRows(N);
    const MatrixXd Y = sim.points.topRows(N);
    const MatrixXd Kxx = kernel_gram(X, X, k);
    const MatrixXd Kyy = kernel_gram(Y, Y, k);
    const MatrixXd Kxy = kernel_gram(X, Y, k);
    double hbar = 0.0;
    VectorXd g = VectorXd::Zero(N);
    for (int i = 0; i < N; ++i) {
        double acc = 0.0;
        for (int j = 0; j < N; ++j) {
            if (j == i) continue;
            acc += Kxx(i, j) + Kyy(i, j) - Kxy(i, j) - Kxy(j, i);
        }
        g[i] = acc / (N - 1.0);
        hbar += acc;
    }
    hbar /= static_cast<double>(N) * (N - 1.0);
    const double sigma2 = 4.0 * (g.array().square().mean() - hbar * hbar);
    return finish(DiscrepancyKind::mmd(k), t,
                  std::sqrt(std::max(sigma2, 0.0) / N), terms);
}

DiscrepancyEstimate mmd_studentized(const Sample& sim, const Sample& obs,
                                    const KernelSpec& k,
                                    std::uint64_t split_seed) {
    if (sim.n() < 4 || obs.n() < 4)
        throw std::invalid_argument("mmd_studentized: need n, m >= 4");
    CounterRng rng(derive_seed(split_seed, SeedTag::MmdSplit));
    const auto split = [&](const MatrixXd& pts) {
        const int n = static_cast<int>(pts.rows());
        std::vector<int> idx = rng.permutation(n);
        const int n1 = n / 2;  // remainder goes to the second half
        MatrixXd a(n1, pts.cols()), b(n - n1, pts.cols());
        for (int i = 0; i < n1; ++i) a.row(i) = pts.row(idx[i]);
        for (int i = n1; i < n; ++i) b.row(i - n1) = pts.row(idx[i]);
        return std::make_pair(a, b);
    };
    const auto [sim1, sim2] = split(sim.points);
    const auto [obs1, obs2] = split(obs.points);
    const int m1 = static_cast<int>(sim1.rows());
    const int n1 = static_cast<int>(obs1.rows());

    // H_j = <K(z_j, .), mu2_sim - mu2_obs> for z_j in the first halves
    const VectorXd h_sim = kernel_gram(sim1, sim2, k).rowwise().mean() -
                           kernel_gram(sim1, obs2, k).rowwise().mean();
    const VectorXd h_obs = kernel_gram(obs1, sim2, k).rowwise().mean() -
                           kernel_gram(obs1, obs2, k).rowwise().mean();
    const double cross = h_sim.mean() - h_obs.mean();

    const double var_sim = (h_sim.array() - h_sim.mean()).square().mean();
    const double var_obs = (h_obs.array() - h_obs.mean()).square().mean();
    const double sigma = std::sqrt(var_sim / m1 + var_obs / n1);
    if (!(sigma > 0.0))
        throw std::runtime_error("mmd_studentized: degenerate variance");

    DiscrepancyEstimate e;
    e.kind = DiscrepancyKind::mmd_studentized(k);
    e.value = cross / sigma;
    e.stderr_ = 1.0;
    return e;
}

DiscrepancyTerms estimate_terms(const DiscrepancyKind& kind,
                                const EstimatorInputs& in) {
    switch (kind.family) {
        case DiscrepancyKind::Family::Hellinger:
            return hellinger_terms(in.r_hat, in.s_hat, *in.obs, *in.sim);
        case DiscrepancyKind::Family::PowerDivergence:
            if (!in.ref)
                throw std::invalid_argument(
                    "power divergence needs a reference sample");
            return mdpd_terms(kind.gamma, in.r_hat, in.s_hat, *in.obs, *in.sim,
                              *in.ref, in.g_logpdf);
        case DiscrepancyKind::Family::Mmd:
            return mmd_terms(*in.sim, *in.obs, kind.kernel);
        case DiscrepancyKind::Family::MmdStudentized:
            throw std::invalid_argument(
                "studentized MMD has no per-sample decomposition");
    }
    throw std::logic_error("unreachable");
}

DiscrepancyEstimate estimate(const DiscrepancyKind& kind,
                             const EstimatorInputs& in, DiscrepancyTerms* terms) {
    switch (kind.family) {
        case DiscrepancyKind::Family::Hellinger:
            return hellinger_onestep(in.r_hat, in.s_hat, *in.obs, *in.sim, terms);
        case DiscrepancyKind::Family::PowerDivergence:
            if (!in.ref)
                throw std::invalid_argument(
                    "power divergence needs a reference sample");
            return mdpd_onestep(kind.gamma, in.r_hat, in.s_hat, *in.obs, *in.sim,
                                *in.ref, in.g_logpdf, terms);
        case DiscrepancyKind::Family::Mmd:
            return mmd_ustat(*in.sim, *in.obs, kind.kernel, terms);
        case DiscrepancyKind::Family::MmdStudentized:
            return mmd_studentized(*in.sim, *in.obs, kind.kernel, in.split_seed);
    }
    throw std::logic_error("unreachable");
}

}  // namespace rsbi
