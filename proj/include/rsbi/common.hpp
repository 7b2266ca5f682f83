#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

namespace rsbi {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using Eigen::VectorXi;

enum class Provenance { Observed, SimulatedAt, Reference };

// An ordered collection of d-dimensional observations together with where
// they came from.  `theta` is set when provenance == SimulatedAt.
struct Sample {
    MatrixXd points;  // n x d
    Provenance provenance = Provenance::Observed;
    std::uint64_t seed = 0;
    VectorXd theta;

    int n() const { return static_cast<int>(points.rows()); }
    int dim() const { return static_cast<int>(points.cols()); }

    // 1-d convenience view
    VectorXd col0() const { return points.col(0); }

    void validate() const;

    Sample as_observed() const {
        Sample s = *this;
        s.provenance = Provenance::Observed;
        s.theta.resize(0);
        return s;
    }

    static Sample from_vector(const VectorXd& v,
                              Provenance prov = Provenance::Observed);
};

// ---------------------------------------------------------------------------
// Seeding and random numbers.
//
// One counter-based generator per (operation, seed) pair: the stream is the
// splitmix64 output function applied to an incrementing counter, so a
// generator is fully determined by its 64-bit key and draws can be handed to
// parallel jobs without shared state.
// ---------------------------------------------------------------------------

inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

enum class SeedTag : std::uint64_t {
    Simulate = 1,
    Split = 2,
    Centers = 3,
    CvFolds = 4,
    Permutation = 5,
    Resample = 6,
    Batches = 7,
    ThetaDraw = 8,
    MmdSplit = 9,
    Replication = 10,
    Acquisition = 11,
    Bootstrap = 12,
    Reference = 13,
};

// Child seeds derive by hashing (master, tag, index) so that e.g. a theta
// grid simulates deterministically regardless of evaluation order.
inline std::uint64_t derive_seed(std::uint64_t master, SeedTag tag,
                                 std::uint64_t index = 0) {
    return mix64(mix64(master ^ mix64(static_cast<std::uint64_t>(tag))) + index);
}

class CounterRng {
  public:
    explicit CounterRng(std::uint64_t key) : state_(key) {}

    std::uint64_t next_u64() { return mix64(state_ += kGamma); }

    // uniform on (0,1); never returns an endpoint
    double uniform() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53 + 0x1.0p-54;
    }

    double normal();
    double gamma(double shape);                  // scale 1
    double beta(double a, double b);
    double student_t(double df);
    int uniform_int(int n);                      // [0, n)
    std::vector<int> permutation(int n);
    void shuffle(std::vector<int>& idx);

  private:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;
    std::uint64_t state_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

// ---------------------------------------------------------------------------
// Scalar statistics
// ---------------------------------------------------------------------------

double mean(const VectorXd& x);
double variance(const VectorXd& x);   // denominator n-1 (n>1), else 0
double skewness(const VectorXd& x);
double kurtosis(const VectorXd& x);   // excess kurtosis

// Quantile of a sorted vector, linear interpolation between order statistics.
double quantile_sorted(const VectorXd& sorted, double p);

VectorXd sorted_copy(const VectorXd& x);

// ---------------------------------------------------------------------------
// Reference distributions (standard normal CDF/quantile, chi-square and
// Student-t quantiles are thin wrappers over Boost.Math).
// ---------------------------------------------------------------------------

double normal_cdf(double x);
double normal_pdf(double x, double mu = 0.0, double sd = 1.0);
double normal_quantile(double p);
double chi2_quantile(double p, double dof);
double student_t_quantile(double p, double dof);

// Parallel job loop: runs fn(i) for i in [0, n) across OpenMP threads.
// Each job writes to its own slot, so the result is thread-count invariant.
void parallel_for(int n, const std::function<void(int)>& fn,
                  bool parallel = true);

}  // namespace rsbi
