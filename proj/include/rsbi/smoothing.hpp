#pragma once

#include "rsbi/common.hpp"

namespace rsbi {

// Nadaraya-Watson kernel regression with a Gaussian kernel.  Optional
// multiplicative weights enter both numerator and denominator.  Throws when
// an evaluation point receives (numerically) zero total kernel weight, which
// signals that the bandwidth is too small for the design.
struct NwResult {
    VectorXd fitted;
    VectorXd se;           // weighted-residual standard error, if requested
    VectorXd weight_sums;  // raw kernel-weight totals per evaluation point
};

NwResult nw_regress(const MatrixXd& X, const VectorXd& y, const MatrixXd& eval,
                    double h, const VectorXd* mult_weights = nullptr,
                    bool want_se = false, bool parallel = true);

// Default rule: (max axis range of the design) * N^{-1/(4+d)}.
double default_bandwidth(const MatrixXd& design);

}  // namespace rsbi
