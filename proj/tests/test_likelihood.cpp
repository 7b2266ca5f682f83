#include "rsbi/likelihood.hpp"

#include <catch2/catch_amalgamated.hpp>

#include <cmath>

using namespace rsbi;

namespace {

MatrixXd grid_1d(double lo, double hi, int n) {
    MatrixXd g(n, 1);
    for (int i = 0; i < n; ++i)
        g(i, 0) = (n == 1) ? lo : lo + (hi - lo) * i / (n - 1);
    return g;
}

// thetas ~ uniform(lo, hi) with per-theta batches drawn from model_at
std::pair<MatrixXd, std::vector<Sample>> draw_design(
    const std::function<ModelSpec(double)>& model_at, double lo, double hi,
    int N, int n_batch, std::uint64_t seed) {
    MatrixXd thetas(N, 1);
    std::vector<Sample> sims(N);
    CounterRng rng(derive_seed(seed, SeedTag::ThetaDraw));
    for (int j = 0; j < N; ++j) thetas(j, 0) = lo + (hi - lo) * rng.uniform();
    for (int j = 0; j < N; ++j)
        sims[j] = simulate(model_at(thetas(j, 0)), n_batch,
                           derive_seed(seed, SeedTag::Simulate, j));
    return {thetas, sims};
}

}  // namespace

TEST_CASE("dataset rows pair matched and permuted parameters", "[likelihood]") {
    const auto [thetas, sims] = draw_design(
        [](double t) -> ModelSpec { return GaussianLoc{t, 1.0}; }, 0, 1, 8, 20, 3);
    const SbiDataset ds = build_dataset(thetas, sims, 5);

    REQUIRE(ds.z.size() == 16);
    REQUIRE(ds.z.head(8).sum() == 8);
    REQUIRE(ds.z.tail(8).sum() == 0);

    // permutation is a bijection and the theta marginals match across classes
    std::vector<int> perm = ds.permutation;
    std::sort(perm.begin(), perm.end());
    for (int i = 0; i < 8; ++i) REQUIRE(perm[i] == i);
    VectorXd a = ds.thetas.col(0).head(8), b = ds.thetas.col(0).tail(8);
    std::sort(a.data(), a.data() + 8);
    std::sort(b.data(), b.data() + 8);
    REQUIRE(a == b);

    // batches are reused between the halves
    REQUIRE(ds.summaries.row(3) == ds.summaries.row(11));

    REQUIRE_THROWS_AS(build_dataset(thetas.topRows(1), {sims[0]}, 1),
                      std::invalid_argument);
}

TEST_CASE("two-parameter permutation is a seeded coin flip", "[likelihood]") {
    const auto [thetas, sims] = draw_design(
        [](double t) -> ModelSpec { return GaussianLoc{t, 1.0}; }, 0, 1, 2, 10, 9);
    bool seen_swap = false, seen_id = false;
    for (std::uint64_t s = 0; s < 30; ++s) {
        const SbiDataset ds = build_dataset(thetas, sims, s);
        if (ds.permutation[0] == 1) seen_swap = true;
        if (ds.permutation[0] == 0) seen_id = true;
    }
    REQUIRE(seen_swap);
    REQUIRE(seen_id);
}

TEST_CASE("logistic fit solves a separable-free problem to tolerance",
          "[likelihood]") {
    CounterRng rng(11);
    const int n = 2000;
    MatrixXd X(n, 2);
    VectorXi z(n);
    for (int i = 0; i < n; ++i) {
        X(i, 0) = rng.normal();
        X(i, 1) = rng.normal();
        const double p = 1.0 / (1.0 + std::exp(-(0.5 + X(i, 0) - 0.7 * X(i, 1))));
        z[i] = rng.uniform() < p ? 1 : 0;
    }
    const LogisticModel m = fit_logistic(X, z);
    REQUIRE(m.grad_norm <= 1e-8);

    // the link is monotone: larger score means larger probability
    VectorXd lowf = VectorXd::Zero(2), highf = VectorXd::Ones(2);
    if (m.score(lowf) > m.score(highf)) std::swap(lowf, highf);
    REQUIRE(m.prob(lowf) <= m.prob(highf));
}

TEST_CASE("a model constant in theta yields a flat likelihood surface",
          "[likelihood]") {
    const auto [thetas, sims] = draw_design(
        [](double) -> ModelSpec { return GaussianLoc{0.0, 1.0}; }, -1, 1, 5000,
        50, 21);
    const LikelihoodModel lik = fit_likelihood(build_dataset(thetas, sims, 22));

    const Sample obs = simulate(GaussianLoc{0.0, 1.0}, 50, 23).as_observed();
    const VectorXd summary = batch_summary(obs);
    double lo = 1e300, hi = -1e300;
    for (int i = 0; i <= 20; ++i) {
        VectorXd th(1);
        th << -1.0 + 0.1 * i;
        const double ll = lik.log_likelihood(th, summary);
        lo = std::min(lo, ll);
        hi = std::max(hi, ll);
    }
    REQUIRE(hi - lo <= std::log(1.5));
}

TEST_CASE("likelihood surface peaks near the sample mean", "[likelihood]") {
    const auto [thetas, sims] = draw_design(
        [](double t) -> ModelSpec { return GaussianLoc{t, 1.0}; }, 1.5, 3.5, 2000,
        100, 31);
    const LikelihoodModel lik = fit_likelihood(build_dataset(thetas, sims, 32));

    const Sample obs = simulate(GaussianLoc{2.5, 1.0}, 100, 33).as_observed();
    const VectorXd summary = batch_summary(obs);
    double best = -1e300, best_theta = 0.0;
    for (int i = 0; i <= 200; ++i) {
        VectorXd th(1);
        th << 1.5 + 0.01 * i;
        const double ll = lik.log_likelihood(th, summary);
        if (ll > best) {
            best = ll;
            best_theta = th[0];
        }
    }
    REQUIRE(std::abs(best_theta - obs.col0().mean()) <= 0.2);
}

TEST_CASE("a constant statistic keeps the whole grid", "[likelihood]") {
    const auto [thetas, sims] = draw_design(
        [](double t) -> ModelSpec { return GaussianLoc{t, 1.0}; }, 0, 1, 50, 20,
        41);
    const Sample obs = simulate(GaussianLoc{0.5, 1.0}, 20, 42).as_observed();
    const auto res = invert_test_cs(
        thetas, sims, obs,
        [](const VectorXd&, const Sample&) { return 1.0; }, 0.05, 0.2);
    REQUIRE(res.b.sum() == 50);  // ties count as >=
    REQUIRE(res.cs.count() == res.cs.grid.rows());
}

TEST_CASE("test inversion holds its level at the true parameter",
          "[likelihood]") {
    // reject rate of pv(theta*) < 0.05 stays below 0.08 across replications
    const int reps = 200;
    int rejects = 0;
    const MatrixXd eval = grid_1d(2.5, 2.5, 1);
    for (int rep = 0; rep < reps; ++rep) {
        const auto [thetas, sims] = draw_design(
            [](double t) -> ModelSpec { return GaussianLoc{t, 1.0}; }, 1.5, 3.5,
            256, 100, 900 + rep);
        const LikelihoodModel lik =
            fit_likelihood(build_dataset(thetas, sims, 50 + rep));
        const Sample obs =
            simulate(GaussianLoc{2.5, 1.0}, 100, 7000 + rep).as_observed();
        const StatFn T = [&](const VectorXd& th, const Sample& batch) {
            return -lik.log_likelihood(th, batch);
        };
        const auto res = invert_test_cs(thetas, sims, obs, T, 0.05, 0.06, &eval);
        if (res.surface.smoothed[0] < 0.05) ++rejects;
    }
    REQUIRE(rejects <= 0.08 * reps);
}

TEST_CASE("pv surface and indicators stay in range", "[likelihood]") {
    const auto [thetas, sims] = draw_design(
        [](double t) -> ModelSpec { return GaussianLoc{t, 1.0}; }, 1.5, 3.5, 200,
        100, 61);
    const LikelihoodModel lik = fit_likelihood(build_dataset(thetas, sims, 62));
    const Sample obs = simulate(GaussianLoc{2.5, 1.0}, 100, 63).as_observed();
    const StatFn T = [&](const VectorXd& th, const Sample& batch) {
        return -lik.log_likelihood(th, batch);
    };
    const auto res = invert_test_cs(thetas, sims, obs, T, 0.05, 0.1);
    for (int j = 0; j < res.b.size(); ++j) {
        REQUIRE((res.b[j] == 0 || res.b[j] == 1));
    }
    REQUIRE(res.surface.smoothed.minCoeff() >= 0.0);
    REQUIRE(res.surface.smoothed.maxCoeff() <= 1.0);
}
