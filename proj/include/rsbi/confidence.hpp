#pragma once

#include "rsbi/common.hpp"

namespace rsbi {

// Grid-based confidence set: membership flags over an evaluation grid plus a
// per-axis interval hull for reporting.
struct ConfidenceSet {
    MatrixXd grid;  // E x d
    std::vector<std::uint8_t> membership;
    double alpha = 0.05;

    int count() const;
    int dim() const { return static_cast<int>(grid.cols()); }
    bool contains(const VectorXd& theta) const;  // membership at nearest grid point
    std::vector<std::pair<double, double>> axis_hull() const;
    // Lebesgue measure of the union of member cells on a uniform grid.
    double measure(double cell_volume) const { return count() * cell_volume; }
};

// theta samples with raw per-theta statistics and the smoothed p-value
// surface on an evaluation grid.
struct PValueSurface {
    MatrixXd thetas;   // N x d design points
    VectorXd raw;      // Z_j in [0,1]
    MatrixXd eval;     // E x d evaluation grid
    VectorXd smoothed; // p-values on eval
    double bandwidth = 0.0;
    double alpha = 0.05;
};

ConfidenceSet threshold_surface(const PValueSurface& surface, double alpha);

// Majority vote over sets built at level 1 - alpha/2 on a common grid.
ConfidenceSet merge_sets(const std::vector<ConfidenceSet>& sets);

}  // namespace rsbi
