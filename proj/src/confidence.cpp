#include "rsbi/confidence.hpp"

namespace rsbi {

int ConfidenceSet::count() const {
    int c = 0;
    for (const auto m : membership) c += (m != 0);
    return c;
}

bool ConfidenceSet::contains(const VectorXd& theta) const {
    if (grid.rows() == 0) return false;
    int best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid.rows(); ++i) {
        const double d = (grid.row(i).transpose() - theta).squaredNorm();
        if (d < best_d) {
            best_d = d;
            best = i;
        }
    }
    return membership[best] != 0;
}

std::vector<std::pair<double, double>> ConfidenceSet::axis_hull() const {
    std::vector<std::pair<double, double>> hull(dim(),
                                                {std::numeric_limits<double>::quiet_NaN(),
                                                 std::numeric_limits<double>::quiet_NaN()});
    for (int c = 0; c < dim(); ++c) {
        double lo = std::numeric_limits<double>::infinity();
        double hi = -std::numeric_limits<double>::infinity();
        for (int i = 0; i < grid.rows(); ++i)
            if (membership[i]) {
                lo = std::min(lo, grid(i, c));
                hi = std::max(hi, grid(i, c));
            }
        if (lo <= hi) hull[c] = {lo, hi};
    }
    return hull;
}

ConfidenceSet threshold_surface(const PValueSurface& surface, double alpha) {
    ConfidenceSet cs;
    cs.grid = surface.eval;
    cs.alpha = alpha;
    cs.membership.resize(surface.eval.rows());
    for (int i = 0; i < surface.eval.rows(); ++i)
        cs.membership[i] = surface.smoothed[i] >= alpha ? 1 : 0;
    return cs;
}

ConfidenceSet merge_sets(const std::vector<ConfidenceSet>& sets) {
    if (sets.empty()) throw std::invalid_argument("merge_sets: need >= 1 set");
    const ConfidenceSet& first = sets.front();
    for (const auto& s : sets) {
        if (s.grid.rows() != first.grid.rows() || s.grid != first.grid)
            throw std::invalid_argument("merge_sets: mismatched grids");
    }
    ConfidenceSet out;
    out.grid = first.grid;
    out.alpha = first.alpha;
    out.membership.assign(first.grid.rows(), 0);
    const double B = static_cast<double>(sets.size());
    for (int i = 0; i < first.grid.rows(); ++i) {
        int votes = 0;
        for (const auto& s : sets) votes += (s.membership[i] != 0);
        out.membership[i] = (votes / B >= 0.5) ? 1 : 0;
    }
    return out;
}

}  // namespace rsbi
