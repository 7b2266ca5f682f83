#pragma once

#include "rsbi/common.hpp"

namespace rsbi {

// --------------------------------------------------------------------------
// Density-ratio estimation r(y) = p(y)/q(y) by penalized least squares in a
// Gaussian-kernel expansion, or from classifier probabilities.
// --------------------------------------------------------------------------

struct RatioModel {
    MatrixXd centers;  // n_c x d
    double sigma = 1.0;
    double lambda = 0.0;
    VectorXd beta;     // clamped at 0 elementwise
    double trim_lo = 1e-3;
    double trim_hi = 1e3;
    bool ridge_fallback = false;  // set when a singular lambda=0 system was re-solved

    // r(y) = sum_i beta_i exp(-|y - c_i|^2/(2 sigma^2)), clamped to [lo, hi]
    VectorXd evaluate(const MatrixXd& pts) const;
};

struct RatioFitConfig {
    int n_centers = 100;
    // empty => median heuristic x {0.15, 0.25, 0.5, 1, 2}.  The two small
    // multipliers matter: with a few thousand 1-d points the loss-optimal
    // kernel width sits well below the median distance, and the clamp to
    // nonnegative coefficients inflates wide-kernel fits.
    std::vector<double> sigma_grid;
    std::vector<double> lambda_grid = {1e-3, 1e-2, 1e-1};
    int cv_folds = 5;
    double trim_lo = 1e-3;
    double trim_hi = 1e3;
    std::uint64_t seed = 1;  // center subsampling and fold assignment
};

// Cross-validation details, exposed for testing.
struct RatioFitReport {
    std::vector<double> sigma_grid, lambda_grid;
    MatrixXd cv_loss;       // sigma x lambda mean validation loss
    int sigma_index = 0, lambda_index = 0;
    VectorXd beta_pre;      // ridge solution before clamping
    MatrixXd H;             // Gram average over the denominator sample
    VectorXd h;             // kernel average over the numerator sample
};

// num ~ p, den ~ q.  Kernel centers are drawn without replacement from the
// numerator sample; (sigma, lambda) picked by K-fold cross-validation on the
// least-squares ratio loss, ties broken by larger lambda then larger sigma.
RatioModel fit_ulsif(const Sample& num, const Sample& den,
                     const RatioFitConfig& cfg, RatioFitReport* report = nullptr);

VectorXd evaluate_ratio(const RatioModel& model, const MatrixXd& pts);

// Median of pairwise Euclidean distances over a deterministic subsample of at
// most 2000 points.
double median_heuristic(const Sample& s);

// r = ((1-a)/a) * (1-h)/h with h clamped to [1e-6, 1-1e-6], then trimmed.
VectorXd ratio_from_classifier(const VectorXd& probs, double a,
                               double trim_lo = 1e-3, double trim_hi = 1e3);

// Callable ratio abstraction so estimators accept fitted models and oracle
// ratios interchangeably.
using RatioFn = std::function<VectorXd(const MatrixXd&)>;

RatioFn ratio_fn(const RatioModel& model);
// Oracle ratio from two closed-form log densities, trimmed like a fitted model.
RatioFn ratio_fn(std::function<double(double)> log_num,
                 std::function<double(double)> log_den,
                 double trim_lo = 1e-3, double trim_hi = 1e3);

}  // namespace rsbi
