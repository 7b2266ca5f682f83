#include "rsbi/kernels.hpp"

#include <omp.h>

#include <algorithm>
#include <cmath>

namespace rsbi {

void KernelSpec::validate() const {
    if (scale <= 0.0) throw std::invalid_argument("kernel scale must be > 0");
    if (family == Family::Polynomial && offset < 0.0)
        throw std::invalid_argument("polynomial kernel offset must be >= 0");
}

double kernel_eval(const KernelSpec& k, const Eigen::Ref<const Eigen::RowVectorXd>& x,
                   const Eigen::Ref<const Eigen::RowVectorXd>& y) {
    if (k.family == KernelSpec::Family::Gaussian) {
        return std::exp(-(x - y).squaredNorm() / (2.0 * k.scale * k.scale));
    }
    return std::pow(x.dot(y) / (k.scale * k.scale) + k.offset, k.degree);
}

namespace {

MatrixXd gram_block(const MatrixXd& X, const MatrixXd& C, const KernelSpec& k) {
    if (k.family == KernelSpec::Family::Gaussian) {
        const VectorXd xs = X.rowwise().squaredNorm();
        const VectorXd cs = C.rowwise().squaredNorm();
        MatrixXd G = -2.0 * (X * C.transpose());
        G.colwise() += xs;
        G.rowwise() += cs.transpose();
        return (-G / (2.0 * k.scale * k.scale)).array().exp().matrix();
    }
    MatrixXd G = (X * C.transpose()) / (k.scale * k.scale);
    return (G.array() + k.offset).pow(k.degree).matrix();
}

}  // namespace

MatrixXd kernel_gram(const MatrixXd& X, const MatrixXd& C, const KernelSpec& k,
                     bool parallel) {
    k.validate();
    const int n = static_cast<int>(X.rows());
    MatrixXd G(n, C.rows());
    const int chunk = 256;
    const int nblocks = (n + chunk - 1) / chunk;
    parallel_for(
        nblocks,
        [&](int b) {
            const int lo = b * chunk;
            const int len = std::min(chunk, n - lo);
            G.middleRows(lo, len) = gram_block(X.middleRows(lo, len), C, k);
        },
        parallel);
    return G;
}

MatrixXd gaussian_gram(const MatrixXd& X, const MatrixXd& C, double sigma,
                       bool parallel) {
    KernelSpec k;
    k.scale = sigma;
    return kernel_gram(X, C, k, parallel);
}

MmdSums mmd_sums(const MatrixXd& X, const MatrixXd& Y, const KernelSpec& k,
                 bool parallel) {
    const int n = static_cast<int>(X.rows());
    const int m = static_cast<int>(Y.rows());
    MmdSums out;
    out.row_xx = VectorXd::Zero(n);
    out.row_yy = VectorXd::Zero(m);
    out.row_xy = VectorXd::Zero(n);
    out.row_yx = VectorXd::Zero(m);

    const MatrixXd Kxx = kernel_gram(X, X, k, parallel);
    const MatrixXd Kyy = kernel_gram(Y, Y, k, parallel);
    const MatrixXd Kxy = kernel_gram(X, Y, k, parallel);

    for (int i = 0; i < n; ++i) out.row_xx[i] = Kxx.row(i).sum() - Kxx(i, i);
    for (int i = 0; i < m; ++i) out.row_yy[i] = Kyy.row(i).sum() - Kyy(i, i);
    out.row_xy = Kxy.rowwise().sum();
    out.row_yx = Kxy.colwise().sum().transpose();
    out.sxx = out.row_xx.sum();
    out.syy = out.row_yy.sum();
    out.sxy = out.row_xy.sum();
    return out;
}

double wasserstein2_sorted(const VectorXd& a, const VectorXd& b) {
    const std::int64_t na = a.size(), nb = b.size();
    if (na < 1 || nb < 1) throw std::invalid_argument("empty sample");
    std::int64_t ia = 0, ib = 0;
    double u = 0.0, acc = 0.0;
    while (ia < na && ib < nb) {
        // next breakpoint: min((ia+1)/na, (ib+1)/nb), compared exactly
        const std::int64_t lhs = (ia + 1) * nb;
        const std::int64_t rhs = (ib + 1) * na;
        const double next = (lhs <= rhs) ? static_cast<double>(ia + 1) / na
                                         : static_cast<double>(ib + 1) / nb;
        const double d = a[ia] - b[ib];
        acc += (next - u) * d * d;
        u = next;
        if (lhs <= rhs) ++ia;
        if (rhs <= lhs) ++ib;
    }
    return acc;
}

double ks_sorted(const VectorXd& a, const VectorXd& b) {
    const std::int64_t na = a.size(), nb = b.size();
    if (na < 1 || nb < 1) throw std::invalid_argument("empty sample");
    std::int64_t ia = 0, ib = 0;
    double sup = 0.0;
    while (ia < na || ib < nb) {
        double v;
        if (ia < na && (ib >= nb || a[ia] <= b[ib]))
            v = a[ia];
        else
            v = b[ib];
        while (ia < na && a[ia] <= v) ++ia;
        while (ib < nb && b[ib] <= v) ++ib;
        sup = std::max(sup, std::abs(static_cast<double>(ia) / na -
                                     static_cast<double>(ib) / nb));
    }
    return sup;
}

MatrixXd distance_table(const std::vector<VectorXd>& sims,
                        const std::vector<VectorXd>& targets, GofDistance d,
                        bool parallel) {
    const int S = static_cast<int>(sims.size());
    const int R = static_cast<int>(targets.size());
    MatrixXd table(S, R);
    parallel_for(
        S * R,
        [&](int idx) {
            const int s = idx / R;
            const int r = idx % R;
            table(s, r) = (d == GofDistance::Wasserstein)
                              ? std::sqrt(wasserstein2_sorted(sims[s], targets[r]))
                              : ks_sorted(sims[s], targets[r]);
        },
        parallel);
    return table;
}

namespace ref {

MatrixXd kernel_gram(const MatrixXd& X, const MatrixXd& C, const KernelSpec& k) {
    MatrixXd G(X.rows(), C.rows());
    for (int i = 0; i < X.rows(); ++i)
        for (int j = 0; j < C.rows(); ++j)
            G(i, j) = kernel_eval(k, X.row(i), C.row(j));
    return G;
}

MmdSums mmd_sums(const MatrixXd& X, const MatrixXd& Y, const KernelSpec& k) {
    const int n = static_cast<int>(X.rows());
    const int m = static_cast<int>(Y.rows());
    MmdSums out;
    out.row_xx = VectorXd::Zero(n);
    out.row_yy = VectorXd::Zero(m);
    out.row_xy = VectorXd::Zero(n);
    out.row_yx = VectorXd::Zero(m);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) out.row_xx[i] += kernel_eval(k, X.row(i), X.row(j));
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            if (i != j) out.row_yy[i] += kernel_eval(k, Y.row(i), Y.row(j));
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < m; ++j) {
            const double v = kernel_eval(k, X.row(i), Y.row(j));
            out.row_xy[i] += v;
            out.row_yx[j] += v;
        }
    out.sxx = out.row_xx.sum();
    out.syy = out.row_yy.sum();
    out.sxy = out.row_xy.sum();
    return out;
}

double wasserstein2_quadrature(const VectorXd& a_sorted, const VectorXd& b_sorted,
                               int n_grid) {
    const int na = static_cast<int>(a_sorted.size());
    const int nb = static_cast<int>(b_sorted.size());
    double acc = 0.0;
    for (int g = 0; g < n_grid; ++g) {
        const double u = (g + 0.5) / n_grid;
        const double qa = a_sorted[std::min<int>(static_cast<int>(u * na), na - 1)];
        const double qb = b_sorted[std::min<int>(static_cast<int>(u * nb), nb - 1)];
        acc += (qa - qb) * (qa - qb);
    }
    return acc / n_grid;
}

double ks_bruteforce(const VectorXd& a, const VectorXd& b) {
    double sup = 0.0;
    auto cdf = [](const VectorXd& x, double v) {
        int c = 0;
        for (int i = 0; i < x.size(); ++i)
            if (x[i] <= v) ++c;
        return static_cast<double>(c) / static_cast<double>(x.size());
    };
    for (int i = 0; i < a.size(); ++i)
        sup = std::max(sup, std::abs(cdf(a, a[i]) - cdf(b, a[i])));
    for (int i = 0; i < b.size(); ++i)
        sup = std::max(sup, std::abs(cdf(a, b[i]) - cdf(b, b[i])));
    return sup;
}

}  // namespace ref
}  // namespace rsbi
