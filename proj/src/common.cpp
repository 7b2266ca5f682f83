#include "rsbi/common.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>

#include <omp.h>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace rsbi {

void Sample::validate() const {
    if (points.rows() < 1) throw std::invalid_argument("Sample: need n >= 1");
    if (!points.allFinite())
        throw std::invalid_argument("Sample: non-finite entries");
}

Sample Sample::from_vector(const VectorXd& v, Provenance prov) {
    Sample s;
    s.points = v;
    s.provenance = prov;
    return s;
}

double CounterRng::normal() {
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
}

// Marsaglia-Tsang; shapes < 1 boosted via the U^{1/a} identity.
double CounterRng::gamma(double shape) {
    if (shape <= 0.0) throw std::domain_error("gamma: shape must be > 0");
    if (shape < 1.0) {
        const double u = uniform();
        return gamma(shape + 1.0) * std::pow(u, 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double x, v;
        do {
            x = normal();
            v = 1.0 + c * x;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform();
        if (u < 1.0 - 0.0331 * x * x * x * x) return d * v;
        if (std::log(u) < 0.5 * x * x + d * (1.0 - v + std::log(v))) return d * v;
    }
}

double CounterRng::beta(double a, double b) {
    const double x = gamma(a);
    const double y = gamma(b);
    return x / (x + y);
}

double CounterRng::student_t(double df) {
    const double z = normal();
    const double g = gamma(df / 2.0) * 2.0;  // chi-square with df dof
    return z / std::sqrt(g / df);
}

int CounterRng::uniform_int(int n) {
    return static_cast<int>((static_cast<unsigned __int128>(next_u64()) *
                             static_cast<unsigned __int128>(n)) >>
                            64);
}

std::vector<int> CounterRng::permutation(int n) {
    std::vector<int> idx(n);
    for (int i = 0; i < n; ++i) idx[i] = i;
    shuffle(idx);
    return idx;
}

void CounterRng::shuffle(std::vector<int>& idx) {
    for (int i = static_cast<int>(idx.size()) - 1; i > 0; --i) {
        std::swap(idx[i], idx[uniform_int(i + 1)]);
    }
}

double mean(const VectorXd& x) { return x.mean(); }

double variance(const VectorXd& x) {
    const int n = static_cast<int>(x.size());
    if (n < 2) return 0.0;
    const double m = x.mean();
    return (x.array() - m).square().sum() / (n - 1);
}

double skewness(const VectorXd& x) {
    const double m = x.mean();
    const double s2 = (x.array() - m).square().mean();
    if (s2 <= 0.0) return 0.0;
    const double m3 = (x.array() - m).cube().mean();
    return m3 / std::pow(s2, 1.5);
}

double kurtosis(const VectorXd& x) {
    const double m = x.mean();
    const double s2 = (x.array() - m).square().mean();
    if (s2 <= 0.0) return 0.0;
    const double m4 = (x.array() - m).square().square().mean();
    return m4 / (s2 * s2) - 3.0;
}

double quantile_sorted(const VectorXd& sorted, double p) {
    const int n = static_cast<int>(sorted.size());
    if (n == 0) throw std::invalid_argument("quantile of empty vector");
    if (n == 1) return sorted[0];
    const double h = p * (n - 1);
    const int lo = std::clamp(static_cast<int>(std::floor(h)), 0, n - 1);
    const int hi = std::min(lo + 1, n - 1);
    const double w = h - lo;
    return (1.0 - w) * sorted[lo] + w * sorted[hi];
}

VectorXd sorted_copy(const VectorXd& x) {
    VectorXd y = x;
    std::sort(y.data(), y.data() + y.size());
    return y;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double normal_pdf(double x, double mu, double sd) {
    const double z = (x - mu) / sd;
    return std::exp(-0.5 * z * z) / (sd * std::sqrt(2.0 * std::numbers::pi));
}

double normal_quantile(double p) {
    boost::math::normal dist;
    return boost::math::quantile(dist, p);
}

double chi2_quantile(double p, double dof) {
    boost::math::chi_squared dist(dof);
    return boost::math::quantile(dist, p);
}

double student_t_quantile(double p, double dof) {
    boost::math::students_t dist(dof);
    return boost::math::quantile(dist, p);
}

void parallel_for(int n, const std::function<void(int)>& fn, bool parallel) {
    if (!parallel || n <= 1) {
        for (int i = 0; i < n; ++i) fn(i);
        return;
    }
#pragma omp parallel for schedule(dynamic)
    for (int i = 0; i < n; ++i) fn(i);
}

}  // namespace rsbi
