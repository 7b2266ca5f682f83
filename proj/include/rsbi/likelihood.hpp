#pragma once

#include "rsbi/confidence.hpp"
#include "rsbi/models.hpp"
#include "rsbi/smoothing.hpp"

namespace rsbi {

// --------------------------------------------------------------------------
// Classifier-based likelihood estimation (likelihood-ratio trick) and exact
// Monte Carlo test-inversion confidence sets for correctly specified models.
// --------------------------------------------------------------------------

// Per-coordinate batch summaries: mean, variance, skewness, kurtosis and the
// 0.1/0.3/0.5/0.7/0.9 quantiles.
VectorXd batch_summary(const Sample& batch);
inline constexpr int kSummaryPerDim = 9;

// 2N rows: the first N are matched (Z=1) pairs, the last N re-use the same
// batches with the thetas permuted (Z=0).
struct SbiDataset {
    VectorXi z;
    MatrixXd thetas;     // 2N x d
    MatrixXd summaries;  // 2N x q
    std::vector<int> permutation;
    int pairs() const { return static_cast<int>(permutation.size()); }
};

SbiDataset build_dataset(const MatrixXd& thetas, const std::vector<Sample>& sims,
                         std::uint64_t seed);

// Ridge-regularized logistic regression fitted by iteratively reweighted
// least squares on standardized features.
struct LogisticModel {
    VectorXd w;  // [intercept, coefficients...] on standardized scale
    VectorXd feat_mean, feat_sd;
    int iterations = 0;
    double grad_norm = 0.0;

    double score(const VectorXd& features) const;  // linear predictor
    double prob(const VectorXd& features) const;   // clamped to (1e-6, 1-1e-6)
};

LogisticModel fit_logistic(const MatrixXd& X, const VectorXi& z,
                           double ridge = 1e-4, double tol = 1e-8,
                           int max_iter = 100);

// [summary, theta, summary x theta] interaction features.
VectorXd assemble_features(const VectorXd& summary, const VectorXd& theta);

// Estimated likelihood surface up to a constant: log L(theta; Y) is the
// classifier logit at the batch/parameter features.
class LikelihoodModel {
  public:
    LikelihoodModel() = default;
    LikelihoodModel(LogisticModel classifier) : clf_(std::move(classifier)) {}
    double log_likelihood(const VectorXd& theta, const Sample& batch) const;
    double log_likelihood(const VectorXd& theta, const VectorXd& summary) const;
    const LogisticModel& classifier() const { return clf_; }

  private:
    LogisticModel clf_;
};

LikelihoodModel fit_likelihood(const SbiDataset& ds, double ridge = 1e-4,
                               double tol = 1e-8, int max_iter = 100);

// Statistic T(theta, Y); inversion keeps theta when the simulated statistic
// reaches the observed one at least an alpha fraction of the time.
using StatFn = std::function<double(const VectorXd&, const Sample&)>;

struct InvertTestResult {
    PValueSurface surface;
    ConfidenceSet cs;
    VectorXi b;  // indicators T(theta_j, sim_j) >= T(theta_j, obs)
};

InvertTestResult invert_test_cs(const MatrixXd& thetas,
                                const std::vector<Sample>& sims,
                                const Sample& obs, const StatFn& T, double alpha,
                                double bandwidth,
                                const MatrixXd* eval_grid = nullptr);

}  // namespace rsbi
