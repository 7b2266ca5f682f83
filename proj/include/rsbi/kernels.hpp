#pragma once

#include "rsbi/common.hpp"

namespace rsbi {

struct KernelSpec {
    enum class Family { Gaussian, Polynomial };
    Family family = Family::Gaussian;
    double scale = 1.0;   // Gaussian: exp(-|x-y|^2 / (2 scale^2)); Polynomial: <x,y>/scale^2
    int degree = 2;       // Polynomial only
    double offset = 1.0;  // Polynomial only; >= 0 keeps the kernel positive definite

    void validate() const;
};

double kernel_eval(const KernelSpec& k, const Eigen::Ref<const Eigen::RowVectorXd>& x,
                   const Eigen::Ref<const Eigen::RowVectorXd>& y);

// Gram matrix K(X_i, C_j).  Blocked Eigen expressions, OpenMP over row chunks.
MatrixXd kernel_gram(const MatrixXd& X, const MatrixXd& C, const KernelSpec& k,
                     bool parallel = true);

// Convenience for the Gaussian-kernel ratio features exp(-|x-c|^2/(2 sigma^2)).
MatrixXd gaussian_gram(const MatrixXd& X, const MatrixXd& C, double sigma,
                       bool parallel = true);

// Sums entering the two-sample kernel statistics.  Row sums are kept so that
// per-observation statistic terms can be assembled; all reductions combine
// row partials in index order, so results are thread-count invariant.
struct MmdSums {
    double sxx = 0;  // sum_{i != j} K(x_i, x_j)
    double syy = 0;
    double sxy = 0;  // sum_{i,j} K(x_i, y_j)
    VectorXd row_xx;  // per-i sums over j != i
    VectorXd row_yy;
    VectorXd row_xy;  // per-x_i sums over y_j
    VectorXd row_yx;  // per-y_j sums over x_i
};
MmdSums mmd_sums(const MatrixXd& X, const MatrixXd& Y, const KernelSpec& k,
                 bool parallel = true);

// Exact squared 2-Wasserstein distance between two 1-d empirical
// distributions: piecewise-constant quantile functions integrated over the
// merged breakpoint grid.  Inputs must be sorted ascending.
double wasserstein2_sorted(const VectorXd& a, const VectorXd& b);

// Exact Kolmogorov-Smirnov distance between two 1-d empirical distributions.
// Inputs must be sorted ascending.
double ks_sorted(const VectorXd& a, const VectorXd& b);

enum class GofDistance { Wasserstein, KolmogorovSmirnov };

// table(s, r) = d(sims[s], targets[r]); all vectors sorted ascending.
MatrixXd distance_table(const std::vector<VectorXd>& sims,
                        const std::vector<VectorXd>& targets, GofDistance d,
                        bool parallel = true);

// Naive single-threaded references used by the tests and the benchmark.
namespace ref {
MatrixXd kernel_gram(const MatrixXd& X, const MatrixXd& C, const KernelSpec& k);
MmdSums mmd_sums(const MatrixXd& X, const MatrixXd& Y, const KernelSpec& k);
// Midpoint quadrature of the quantile-difference integral on n_grid cells;
// independent of the exact merged-grid routine.
double wasserstein2_quadrature(const VectorXd& a_sorted, const VectorXd& b_sorted,
                               int n_grid);
double ks_bruteforce(const VectorXd& a, const VectorXd& b);
}  // namespace ref

}  // namespace rsbi
