#pragma once

#include "rsbi/confidence.hpp"
#include "rsbi/discrepancy.hpp"
#include "rsbi/models.hpp"
#include "rsbi/smoothing.hpp"

namespace rsbi {

// --------------------------------------------------------------------------
// Confidence sets for the projection parameter by inverting relative-fit
// tests, plus the alternative interval constructions (sandwich, batch
// min/max, cheap bootstrap, closed-form kernel-distance intervals).
// --------------------------------------------------------------------------

// Disjoint halves of sizes floor(n/2), ceil(n/2) after a seeded shuffle.
std::pair<Sample, Sample> split_sample(const Sample& data, std::uint64_t seed);

struct DeltaStat {
    double delta = 0.0;  // d_hat(theta) - d_hat(theta_ref)
    double se = 0.0;     // paired standard error, variance floored by +1/n1
};

// U terms are differenced per observation (same Y_i on both sides); V and W
// terms are treated as independent across the pair.
DeltaStat delta_hat(const DiscrepancyTerms& at_theta,
                    const DiscrepancyTerms& at_ref);

struct RelFitProblem {
    std::function<ModelSpec(const VectorXd&)> model_at;
    ModelSpec reference;  // closed-form reference; used by the ratio kinds
    DiscrepancyKind kind;
};

struct RelFitConfig {
    int m_sim = 1000;  // per-theta simulation budget
    int k_ref = 1000;  // reference sample size
    RatioFitConfig ratio;
    double bandwidth = 0.0;  // 0 => default rule
    std::uint64_t seed = 1;
    bool common_sim_seed = false;  // share simulation noise across the pair
};

struct RelFitResult {
    PValueSurface surface;
    ConfidenceSet cs;
    int prelim_index = -1;  // argmin on the held-out half
    VectorXd prelim_curve;  // stage-one discrepancy estimates
    VectorXd delta, se;     // per-theta paired statistics
};

// Grid argmin of the estimated discrepancy; ties broken by the lowest index.
int preliminary_estimate(const Sample& data, const MatrixXd& grid,
                         const RelFitProblem& prob, const RelFitConfig& cfg,
                         VectorXd* curve = nullptr);

RelFitResult relative_fit_cs(const Sample& data, const MatrixXd& grid,
                             const RelFitProblem& prob, double alpha,
                             const RelFitConfig& cfg);

// ---------------------------------------------------------------------------
// Alternative interval machinery
// ---------------------------------------------------------------------------

struct Interval {
    double lo = 0.0, hi = 0.0;
    double width() const { return hi - lo; }
    bool contains(double x) const { return x >= lo && x <= hi; }
};

using PointEstimator = std::function<VectorXd(const Sample&)>;

// Ellipsoidal set {theta : n (theta-theta_hat)' Sigma^{-1} (theta-theta_hat)
// <= chi2_{alpha,d}} from the usual plug-in asymptotics of an M-estimator.
// `terms_at` must evaluate the discrepancy terms as a function of theta with
// common random numbers so that central differences are stable.
struct SandwichResult {
    VectorXd theta_hat;
    MatrixXd sigma;
    ConfidenceSet cs;
    double chi2 = 0.0;
};
SandwichResult sandwich_cs(
    const std::function<DiscrepancyTerms(const VectorXd&)>& terms_at,
    const VectorXd& theta_hat, const MatrixXd& grid, double alpha, double step);

// Batch min/max intervals with B = ceil(log(2/alpha)/log 2) seeded batches.
std::vector<Interval> hulc_interval(const Sample& data, const PointEstimator& est,
                                    double alpha, std::uint64_t seed);

// b with-replacement resampled estimates; interval centered at their mean
// with half-width t_{b,alpha/2} times the replicate standard deviation.
std::vector<Interval> cheap_bootstrap(const Sample& data,
                                      const PointEstimator& est, int b,
                                      double alpha, std::uint64_t seed);

enum class GaussianCiMode { Location, Scale };

// Closed-form asymptotic interval for the 1-d Gaussian kernel-distance
// minimizer with kernel bandwidth h; sigma is the known data scale in
// Location mode and the plug-in estimate theta_hat is used in Scale mode.
Interval mmd_gaussian_ci(double theta_hat, int n, int m, double kernel_h,
                         double sigma, GaussianCiMode mode, double alpha);

}  // namespace rsbi
