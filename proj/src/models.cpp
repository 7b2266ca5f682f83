#include "rsbi/models.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rsbi {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require(bool ok, const char* msg) {
    if (!ok) throw std::domain_error(msg);
}

double tilt_exponent_gaussian(const TiltedGaussian& t, double x) {
    const double x3 = x * x * x;
    const double cubic = (std::abs(x3) < t.tau) ? t.alpha1 * x3 : 0.0;
    return cubic + t.alpha2 * x3 * x;
}

double tilt_exponent_beta(const TiltedBeta& t, double x) {
    return t.beta1 * x * x + t.beta2 * x * x * x;
}

double log_beta_fn(double a, double b) {
    return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

double log_beta_pdf(double x, double a, double b) {
    if (x <= 0.0 || x >= 1.0) return -std::numeric_limits<double>::infinity();
    return (a - 1.0) * std::log(x) + (b - 1.0) * std::log1p(-x) - log_beta_fn(a, b);
}

double log_t_pdf(double x, double df) {
    return std::lgamma((df + 1.0) / 2.0) - std::lgamma(df / 2.0) -
           0.5 * std::log(df * std::numbers::pi) -
           (df + 1.0) / 2.0 * std::log1p(x * x / df);
}

// cumulative trapezoid of exp(logf) over a uniform grid; returns total mass
// and fills cdf (unnormalized)
double cumtrapz_exp(const std::function<double(double)>& logf, double lo,
                    double hi, int nodes, VectorXd& xs, VectorXd& cdf) {
    xs.resize(nodes);
    cdf.resize(nodes);
    const double h = (hi - lo) / (nodes - 1);
    double prev = std::exp(logf(lo));
    xs[0] = lo;
    cdf[0] = 0.0;
    for (int i = 1; i < nodes; ++i) {
        const double x = lo + i * h;
        const double cur = std::exp(logf(x));
        xs[i] = x;
        cdf[i] = cdf[i - 1] + 0.5 * h * (prev + cur);
        prev = cur;
    }
    return cdf[nodes - 1];
}

struct InvCdfTable {
    VectorXd xs, cdf;  // cdf normalized to [0,1]
    double draw(double u) const {
        const double* begin = cdf.data();
        const double* end = begin + cdf.size();
        const double* it = std::lower_bound(begin, end, u);
        if (it == begin) return xs[0];
        if (it == end) return xs[xs.size() - 1];
        const auto j = static_cast<Eigen::Index>(it - begin);
        const double c0 = cdf[j - 1], c1 = cdf[j];
        const double w = (c1 > c0) ? (u - c0) / (c1 - c0) : 0.0;
        return xs[j - 1] + w * (xs[j] - xs[j - 1]);
    }
};

InvCdfTable build_inv_cdf(const std::function<double(double)>& logf, double lo,
                          double hi) {
    InvCdfTable t;
    const double mass = cumtrapz_exp(logf, lo, hi, kInvCdfNodes, t.xs, t.cdf);
    if (!(mass > 0.0) || !std::isfinite(mass))
        throw std::domain_error("tilted density has non-finite mass");
    t.cdf /= mass;
    return t;
}

}  // namespace

void validate(const ModelSpec& spec) {
    std::visit(overloaded{
                   [](const GaussianLoc& m) { require(m.sigma > 0.0, "sigma must be > 0"); },
                   [](const GaussianLocScale& m) { require(m.sigma > 0.0, "sigma must be > 0"); },
                   [](const TiltedGaussian& m) {
                       require(m.sigma > 0.0, "sigma must be > 0");
                       require(m.tau > 0.0, "tau must be > 0");
                   },
                   [](const BetaShape& m) {
                       require(m.theta > 0.0 && m.ratio > 0.0, "beta shapes must be > 0");
                   },
                   [](const TiltedBeta& m) {
                       require(m.theta > 0.0 && m.ratio > 0.0, "beta shapes must be > 0");
                   },
                   [](const GandK& m) { require(m.s > 0.0, "s must be > 0"); },
                   [](const Gmm& m) {
                       require(m.sigma > 0.0, "sigma must be > 0");
                       require(m.p >= 0.0 && m.p <= 1.0, "p must be in [0,1]");
                   },
                   [](const StudentTShift& m) { require(m.df > 0.0, "df must be > 0"); },
               },
               spec);
}

int param_dim(const ModelSpec& spec) {
    return std::visit(overloaded{
                          [](const GaussianLoc&) { return 1; },
                          [](const GaussianLocScale&) { return 2; },
                          [](const TiltedGaussian&) { return 1; },
                          [](const BetaShape&) { return 1; },
                          [](const TiltedBeta&) { return 1; },
                          [](const GandK&) { return 4; },
                          [](const Gmm&) { return 4; },
                          [](const StudentTShift&) { return 1; },
                      },
                      spec);
}

bool has_closed_form_density(const ModelSpec& spec) {
    return !std::holds_alternative<GandK>(spec);
}

std::string model_name(const ModelSpec& spec) {
    return std::visit(overloaded{
                          [](const GaussianLoc&) { return std::string("gaussian_loc"); },
                          [](const GaussianLocScale&) { return std::string("gaussian_loc_scale"); },
                          [](const TiltedGaussian&) { return std::string("tilted_gaussian"); },
                          [](const BetaShape&) { return std::string("beta"); },
                          [](const TiltedBeta&) { return std::string("tilted_beta"); },
                          [](const GandK&) { return std::string("gandk"); },
                          [](const Gmm&) { return std::string("gmm"); },
                          [](const StudentTShift&) { return std::string("student_t_shift"); },
                      },
                      spec);
}

double gk_quantile(double p, const GandK& params) {
    if (!(p > 0.0 && p < 1.0)) throw std::domain_error("gk_quantile: p must be in (0,1)");
    const double z = normal_quantile(p);
    return params.l + params.s * (1.0 + params.c * std::tanh(params.g * z / 2.0)) *
                          z * std::pow(1.0 + z * z, params.k);
}

Sample simulate(const ModelSpec& spec, int m, std::uint64_t seed) {
    validate(spec);
    if (m < 1) throw std::domain_error("simulate: m must be >= 1");
    CounterRng rng(seed);
    VectorXd x(m);
    std::visit(
        overloaded{
            [&](const GaussianLoc& mm) {
                for (int i = 0; i < m; ++i) x[i] = mm.theta + mm.sigma * rng.normal();
            },
            [&](const GaussianLocScale& mm) {
                for (int i = 0; i < m; ++i) x[i] = mm.mu + mm.sigma * rng.normal();
            },
            [&](const TiltedGaussian& mm) {
                auto logf = [&](double y) {
                    const double z = (y - mm.theta) / mm.sigma;
                    return -0.5 * z * z + tilt_exponent_gaussian(mm, y);
                };
                const auto table = build_inv_cdf(logf, mm.theta - 12.0 * mm.sigma,
                                                 mm.theta + 12.0 * mm.sigma);
                for (int i = 0; i < m; ++i) x[i] = table.draw(rng.uniform());
            },
            [&](const BetaShape& mm) {
                for (int i = 0; i < m; ++i)
                    x[i] = rng.beta(mm.theta, mm.ratio * mm.theta);
            },
            [&](const TiltedBeta& mm) {
                auto logf = [&](double y) {
                    return log_beta_pdf(y, mm.theta, mm.ratio * mm.theta) +
                           tilt_exponent_beta(mm, y);
                };
                const auto table = build_inv_cdf(logf, 0.0, 1.0);
                for (int i = 0; i < m; ++i) x[i] = table.draw(rng.uniform());
            },
            [&](const GandK& mm) {
                for (int i = 0; i < m; ++i) x[i] = gk_quantile(rng.uniform(), mm);
            },
            [&](const Gmm& mm) {
                for (int i = 0; i < m; ++i) {
                    const double mu = (rng.uniform() < mm.p) ? mm.mu1 : mm.mu2;
                    x[i] = mu + mm.sigma * rng.normal();
                }
            },
            [&](const StudentTShift& mm) {
                for (int i = 0; i < m; ++i) x[i] = mm.shift + rng.student_t(mm.df);
            },
        },
        spec);
    Sample s;
    s.points = x;
    s.provenance = Provenance::SimulatedAt;
    s.seed = seed;
    s.validate();
    return s;
}

ModelDensity::ModelDensity(const ModelSpec& spec) : spec_(spec) {
    validate(spec);
    if (!has_closed_form_density(spec))
        throw std::domain_error("density unsupported for quantile-only model");
    if (const auto* t = std::get_if<TiltedGaussian>(&spec_)) {
        lo_ = t->theta - 12.0 * t->sigma;
        hi_ = t->theta + 12.0 * t->sigma;
        VectorXd xs, cdf;
        auto logf = [&](double y) {
            const double z = (y - t->theta) / t->sigma;
            return -0.5 * z * z -
                   std::log(t->sigma * std::sqrt(2.0 * std::numbers::pi)) +
                   tilt_exponent_gaussian(*t, y);
        };
        log_norm_ = std::log(cumtrapz_exp(logf, lo_, hi_, kInvCdfNodes, xs, cdf));
    } else if (const auto* t = std::get_if<TiltedBeta>(&spec_)) {
        lo_ = 0.0;
        hi_ = 1.0;
        VectorXd xs, cdf;
        auto logf = [&](double y) {
            return log_beta_pdf(y, t->theta, t->ratio * t->theta) +
                   tilt_exponent_beta(*t, y);
        };
        log_norm_ = std::log(cumtrapz_exp(logf, lo_, hi_, kInvCdfNodes, xs, cdf));
    } else {
        std::visit(overloaded{
                       [&](const GaussianLoc& mm) {
                           lo_ = mm.theta - 12.0 * mm.sigma;
                           hi_ = mm.theta + 12.0 * mm.sigma;
                       },
                       [&](const GaussianLocScale& mm) {
                           lo_ = mm.mu - 12.0 * mm.sigma;
                           hi_ = mm.mu + 12.0 * mm.sigma;
                       },
                       [&](const BetaShape&) { lo_ = 0.0; hi_ = 1.0; },
                       [&](const Gmm& mm) {
                           lo_ = std::min(mm.mu1, mm.mu2) - 12.0 * mm.sigma;
                           hi_ = std::max(mm.mu1, mm.mu2) + 12.0 * mm.sigma;
                       },
                       [&](const StudentTShift& mm) {
                           lo_ = mm.shift - 500.0;
                           hi_ = mm.shift + 500.0;
                       },
                       [&](const auto&) {},
                   },
                   spec_);
    }
}

double ModelDensity::log_density(double y) const {
    return std::visit(
        overloaded{
            [&](const GaussianLoc& mm) {
                const double z = (y - mm.theta) / mm.sigma;
                return -0.5 * z * z -
                       std::log(mm.sigma * std::sqrt(2.0 * std::numbers::pi));
            },
            [&](const GaussianLocScale& mm) {
                const double z = (y - mm.mu) / mm.sigma;
                return -0.5 * z * z -
                       std::log(mm.sigma * std::sqrt(2.0 * std::numbers::pi));
            },
            [&](const TiltedGaussian& mm) {
                const double z = (y - mm.theta) / mm.sigma;
                return -0.5 * z * z -
                       std::log(mm.sigma * std::sqrt(2.0 * std::numbers::pi)) +
                       tilt_exponent_gaussian(mm, y) - log_norm_;
            },
            [&](const BetaShape& mm) {
                return log_beta_pdf(y, mm.theta, mm.ratio * mm.theta);
            },
            [&](const TiltedBeta& mm) {
                return log_beta_pdf(y, mm.theta, mm.ratio * mm.theta) +
                       tilt_exponent_beta(mm, y) - log_norm_;
            },
            [&](const GandK&) -> double {
                throw std::domain_error("density unsupported for quantile-only model");
            },
            [&](const Gmm& mm) {
                const double d = mm.p * normal_pdf(y, mm.mu1, mm.sigma) +
                                 (1.0 - mm.p) * normal_pdf(y, mm.mu2, mm.sigma);
                return std::log(d);
            },
            [&](const StudentTShift& mm) { return log_t_pdf(y - mm.shift, mm.df); },
        },
        spec_);
}

double ModelDensity::operator()(double y) const { return std::exp(log_density(y)); }

}  // namespace rsbi
