#pragma once

#include "rsbi/common.hpp"

#include <variant>

namespace rsbi {

// --------------------------------------------------------------------------
// Seeded generative models used as simulators, data-generating processes and
// reference distributions.  All are immutable values; simulate() owns its
// generator, so grids of models can be drawn from in parallel.
// --------------------------------------------------------------------------

struct GaussianLoc {
    double theta = 0.0;
    double sigma = 1.0;  // fixed, not inferred
};

struct GaussianLocScale {
    double mu = 0.0;
    double sigma = 1.0;
};

// Unnormalized density N(theta, sigma^2) * exp(a1 x^3 1{|x^3|<tau} + a2 x^4).
struct TiltedGaussian {
    double theta = 0.0;
    double sigma = 1.0;
    double alpha1 = 0.0;
    double alpha2 = 0.0;
    double tau = 1e3;
};

// Beta(theta, ratio*theta)
struct BetaShape {
    double theta = 1.0;
    double ratio = 1.5;
};

// Beta(theta, ratio*theta) * exp(b1 x^2 + b2 x^3), renormalized on [0,1]
struct TiltedBeta {
    double theta = 1.0;
    double ratio = 1.5;
    double beta1 = 0.0;
    double beta2 = 0.0;
};

struct GandK {
    double l = 0.0;
    double s = 1.0;
    double g = 0.0;
    double k = 0.0;
    double c = 0.8;
};

// p * N(mu1, sigma^2) + (1-p) * N(mu2, sigma^2)
struct Gmm {
    double mu1 = 0.0;
    double mu2 = 0.0;
    double sigma = 1.0;
    double p = 0.5;
};

struct StudentTShift {
    double df = 3.0;
    double shift = 0.0;
};

using ModelSpec = std::variant<GaussianLoc, GaussianLocScale, TiltedGaussian,
                               BetaShape, TiltedBeta, GandK, Gmm, StudentTShift>;

void validate(const ModelSpec& spec);      // throws std::domain_error
int param_dim(const ModelSpec& spec);
bool has_closed_form_density(const ModelSpec& spec);
std::string model_name(const ModelSpec& spec);

// m i.i.d. draws; bit-identical for identical (model, m, seed).  Tilted kinds
// draw by numerical inverse-CDF on a fixed fine grid (kInvCdfNodes nodes over
// mean +- 12 sd, [0,1] for Beta kinds) with linear interpolation.
Sample simulate(const ModelSpec& spec, int m, std::uint64_t seed);

inline constexpr int kInvCdfNodes = 200000;

// Quantile function of the g-and-k distribution.
double gk_quantile(double p, const GandK& params);

// Density evaluator; the normalizer of tilted kinds is computed once by
// trapezoid quadrature on the truncated support and cached in the object.
class ModelDensity {
  public:
    explicit ModelDensity(const ModelSpec& spec);
    double operator()(double y) const;
    double log_density(double y) const;
    // Integration window used for tilted normalizers (and for tests).
    std::pair<double, double> support() const { return {lo_, hi_}; }

  private:
    ModelSpec spec_;
    double log_norm_ = 0.0;  // log normalizing constant of the tilted kinds
    double lo_ = 0.0, hi_ = 0.0;
};

}  // namespace rsbi
