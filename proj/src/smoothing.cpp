#include "rsbi/smoothing.hpp"

#include <cmath>

namespace rsbi {

NwResult nw_regress(const MatrixXd& X, const VectorXd& y, const MatrixXd& eval,
                    double h, const VectorXd* mult_weights, bool want_se,
                    bool parallel) {
    if (X.rows() != y.size())
        throw std::invalid_argument("nw_regress: design/response size mismatch");
    if (mult_weights && mult_weights->size() != y.size())
        throw std::invalid_argument("nw_regress: weight size mismatch");
    if (!(h > 0.0)) throw std::invalid_argument("nw_regress: bandwidth must be > 0");

    const int N = static_cast<int>(X.rows());
    const int E = static_cast<int>(eval.rows());
    NwResult out;
    out.fitted.resize(E);
    out.weight_sums.resize(E);
    if (want_se) out.se.resize(E);

    parallel_for(
        E,
        [&](int e) {
            VectorXd w(N);
            for (int j = 0; j < N; ++j) {
                const double d2 = (X.row(j) - eval.row(e)).squaredNorm();
                w[j] = std::exp(-0.5 * d2 / (h * h));
            }
            if (mult_weights) w.array() *= mult_weights->array();
            const double total = w.sum();
            out.weight_sums[e] = total;
            if (total <= 0.0 || !std::isfinite(total)) {
                out.fitted[e] = std::numeric_limits<double>::quiet_NaN();
                return;
            }
            const VectorXd wn = w / total;
            const double fit = wn.dot(y);
            out.fitted[e] = fit;
            if (want_se)
                out.se[e] = std::sqrt(
                    (wn.array().square() * (y.array() - fit).square()).sum());
        },
        parallel);

    for (int e = 0; e < E; ++e)
        if (!std::isfinite(out.fitted[e]))
            throw std::runtime_error(
                "nw_regress: an evaluation point received zero total kernel "
                "weight; increase the bandwidth h");
    return out;
}

double default_bandwidth(const MatrixXd& design) {
    const int N = static_cast<int>(design.rows());
    const int d = static_cast<int>(design.cols());
    double range = 0.0;
    for (int c = 0; c < d; ++c)
        range = std::max(range,
                         design.col(c).maxCoeff() - design.col(c).minCoeff());
    if (range <= 0.0) range = 1.0;
    return range * std::pow(static_cast<double>(N), -1.0 / (4.0 + d));
}

}  // namespace rsbi
