#pragma once

#include "rsbi/kernels.hpp"
#include "rsbi/ratio.hpp"

namespace rsbi {

// --------------------------------------------------------------------------
// One-step and U-statistic estimators of discrepancies between the data law
// and model members, with standard errors.
// --------------------------------------------------------------------------

struct DiscrepancyKind {
    enum class Family { Hellinger, PowerDivergence, Mmd, MmdStudentized };
    Family family = Family::Hellinger;
    double gamma = 1.0;  // PowerDivergence, in (0, 1]
    KernelSpec kernel;   // Mmd families

    static DiscrepancyKind hellinger() { return {}; }
    static DiscrepancyKind power_divergence(double gamma);
    static DiscrepancyKind mmd(const KernelSpec& k);
    static DiscrepancyKind mmd_studentized(const KernelSpec& k);
    std::string name() const;
};

// Per-sample terms of the sample-average decomposition
//   d_hat = mean(U over observed) + mean(V over simulated) + mean(W over ref),
// with additive constants absorbed into U and V.  W is empty for the
// Hellinger and MMD families.
struct DiscrepancyTerms {
    VectorXd u, v, w;
    bool has_w() const { return w.size() > 0; }
    double value() const {
        return u.mean() + v.mean() + (has_w() ? w.mean() : 0.0);
    }
};

struct DiscrepancyEstimate {
    double value = 0.0;
    double stderr_ = 0.0;
    DiscrepancyKind kind;
    double u_mean = 0.0, v_mean = 0.0, w_mean = 0.0;
    bool has_w = false;
    bool trim_warning = false;  // every ratio evaluation sat at a trim bound
};

// One-step estimator of the squared Hellinger distance from ratio estimates
// r ~ p/g on the observed points and s ~ p_theta/g on the simulated points.
// The returned stderr is that of the Bhattacharyya-coefficient estimate with
// the estimated variance floored by +1/n.
DiscrepancyEstimate hellinger_onestep(const RatioFn& r_hat, const RatioFn& s_hat,
                                      const Sample& obs, const Sample& sim,
                                      DiscrepancyTerms* terms = nullptr);
DiscrepancyEstimate hellinger_onestep(const RatioModel& r_hat,
                                      const RatioModel& s_hat, const Sample& obs,
                                      const Sample& sim,
                                      DiscrepancyTerms* terms = nullptr);

// One-step estimator of the power-divergence cross term (gamma in (0,1];
// gamma = 1 is the L2 case).  Needs a reference sample from g and the
// closed-form reference log density.
DiscrepancyEstimate mdpd_onestep(double gamma, const RatioFn& r_hat,
                                 const RatioFn& s_hat, const Sample& obs,
                                 const Sample& sim, const Sample& ref,
                                 const std::function<double(double)>& g_logpdf,
                                 DiscrepancyTerms* terms = nullptr);

// Unbiased two-sample U/V-statistic of the squared kernel distance with a
// plug-in estimate of its asymptotic variance.
DiscrepancyEstimate mmd_ustat(const Sample& sim, const Sample& obs,
                              const KernelSpec& k,
                              DiscrepancyTerms* terms = nullptr);

// Sample-split studentized kernel distance: asymptotically standard normal
// whether or not the two laws coincide, so stderr is fixed at 1.
DiscrepancyEstimate mmd_studentized(const Sample& sim, const Sample& obs,
                                    const KernelSpec& k, std::uint64_t split_seed);

struct EstimatorInputs {
    const Sample* obs = nullptr;
    const Sample* sim = nullptr;
    const Sample* ref = nullptr;                // PowerDivergence only
    RatioFn r_hat;                              // p/g
    RatioFn s_hat;                              // p_theta/g
    std::function<double(double)> g_logpdf;     // PowerDivergence only
    std::uint64_t split_seed = 0;               // MmdStudentized only
};

DiscrepancyEstimate estimate(const DiscrepancyKind& kind,
                             const EstimatorInputs& in,
                             DiscrepancyTerms* terms = nullptr);

// Terms-only path for the paired relative-fit statistics (no stderr work).
DiscrepancyTerms estimate_terms(const DiscrepancyKind& kind,
                                const EstimatorInputs& in);

}  // namespace rsbi
