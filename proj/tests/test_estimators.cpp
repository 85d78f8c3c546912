#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <fmmd/estimators.hpp>
#include <fmmd/gaussian.hpp>
#include <fmmd/rng.hpp>

#include "test_util.hpp"

using namespace fmmd;

namespace {

// brute-force oracle: explicit double loop over ordered distinct pairs
double ustat_brute(const KernelSpec& k, const FunctionSet& X, const FunctionSet& Y) {
    const Index n = X.size();
    double acc = 0.0;
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j) {
            if (i == j) continue;
            acc += k.eval(X.sample(i), X.sample(j)) + k.eval(Y.sample(i), Y.sample(j)) -
                   k.eval(X.sample(i), Y.sample(j)) - k.eval(X.sample(j), Y.sample(i));
        }
    return acc / (static_cast<double>(n) * (n - 1));
}

double linear_brute(const KernelSpec& k, const FunctionSet& X, const FunctionSet& Y) {
    const Index n = X.size();
    double acc = 0.0;
    for (Index i = 0; i + 1 < n; i += 2) {
        acc += k.eval(X.sample(i), X.sample(i + 1)) + k.eval(Y.sample(i), Y.sample(i + 1)) -
               k.eval(X.sample(i), Y.sample(i + 1)) - k.eval(X.sample(i + 1), Y.sample(i));
    }
    return 2.0 * acc / static_cast<double>(n);
}

}  // namespace

TEST_CASE("u-statistic equals the brute-force double loop") {
    auto mesh = Mesh::uniform(12, 0.0, 1.0);
    Rng rng(31);
    auto k = KernelSpec::se(FeatureMap::identity(), {0.8});
    for (int rep = 0; rep < 5; ++rep) {
        auto X = test::random_set(mesh, 5, rng);
        auto Y = test::random_set(mesh, 5, rng);
        CHECK(std::abs(mmd_u_statistic(k, X, Y) - ustat_brute(k, X, Y)) < 1e-12);
    }
}

TEST_CASE("u-statistic corner cases") {
    auto mesh = Mesh::uniform(10, 0.0, 1.0);
    Rng rng(32);
    auto k = KernelSpec::se(FeatureMap::identity(), {1.0});

    auto X = test::random_set(mesh, 6, rng);
    CHECK(mmd_u_statistic(k, X, X) == 0.0);

    // n = 2 reduces to a single h value by symmetry
    auto X2 = test::random_set(mesh, 2, rng);
    auto Y2 = test::random_set(mesh, 2, rng);
    const double h = k.eval(X2.sample(0), X2.sample(1)) + k.eval(Y2.sample(0), Y2.sample(1)) -
                     k.eval(X2.sample(0), Y2.sample(1)) - k.eval(X2.sample(1), Y2.sample(0));
    CHECK(mmd_u_statistic(k, X2, Y2) == doctest::Approx(h).epsilon(1e-12));

    // exchangeability
    auto Y = test::random_set(mesh, 6, rng);
    CHECK(mmd_u_statistic(k, X, Y) == doctest::Approx(mmd_u_statistic(k, Y, X)).epsilon(1e-13));

    auto X1 = test::random_set(mesh, 1, rng);
    auto Y1 = test::random_set(mesh, 1, rng);
    CHECK_THROWS_AS((void)mmd_u_statistic(k, X1, Y1), InsufficientData);
    auto Y5 = test::random_set(mesh, 5, rng);
    CHECK_THROWS_AS((void)mmd_u_statistic(k, X, Y5), std::invalid_argument);
}

TEST_CASE("linear estimator") {
    auto mesh = Mesh::uniform(10, 0.0, 1.0);
    Rng rng(33);
    auto k = KernelSpec::se(FeatureMap::identity(), {1.0});

    auto X = test::random_set(mesh, 6, rng);
    auto Y = test::random_set(mesh, 6, rng);
    CHECK(mmd_linear(k, X, X) == 0.0);
    CHECK(std::abs(mmd_linear(k, X, Y) - linear_brute(k, X, Y)) < 1e-12);

    auto X2 = test::random_set(mesh, 2, rng);
    auto Y2 = test::random_set(mesh, 2, rng);
    const double h = k.eval(X2.sample(0), X2.sample(1)) + k.eval(Y2.sample(0), Y2.sample(1)) -
                     k.eval(X2.sample(0), Y2.sample(1)) - k.eval(X2.sample(1), Y2.sample(0));
    CHECK(mmd_linear(k, X2, Y2) == doctest::Approx(h).epsilon(1e-12));

    auto X5 = test::random_set(mesh, 5, rng);
    auto Y5 = test::random_set(mesh, 5, rng);
    CHECK_THROWS_AS((void)mmd_linear(k, X5, Y5), std::invalid_argument);
}

TEST_CASE("u-statistic is unbiased for the closed-form value") {
    // scalar Gaussians: mesh with a single point and unit weight
    Vector pt(1);
    pt << 0.0;
    auto mesh = Mesh::from_points(pt);
    auto spec_p = GaussianSpec::from_covariance(mesh, Vector::Zero(1), Matrix::Identity(1, 1));
    auto spec_q = GaussianSpec::from_covariance(mesh, Vector::Ones(1), Matrix::Identity(1, 1));
    auto k = KernelSpec::se(FeatureMap::identity(), {1.0});

    const Matrix T = Matrix::Identity(1, 1);
    const double truth =
        closed_form_mmd(make_operator_triple(T, Matrix::Identity(1, 1), Matrix::Identity(1, 1)),
                        Vector::Zero(1), Vector::Ones(1));

    const int trials = 2000, n = 50;
    double sum = 0.0, sum_sq = 0.0;
    for (int t = 0; t < trials; ++t) {
        auto X = sample_gp(spec_p, n, derive_seed(909, 2 * t));
        auto Y = sample_gp(spec_q, n, derive_seed(909, 2 * t + 1));
        const double v = mmd_u_statistic(k, X, Y);
        sum += v;
        sum_sq += v * v;
    }
    const double mean = sum / trials;
    const double se = std::sqrt((sum_sq / trials - mean * mean) / (trials - 1));
    CHECK(std::abs(mean - truth) < 3.0 * se);
}

TEST_CASE("permutation test mechanics") {
    auto mesh = Mesh::uniform(10, 0.0, 1.0);
    Rng rng(34);
    auto X = test::random_set(mesh, 8, rng);
    auto Y = test::random_set(mesh, 8, rng);
    auto k = KernelSpec::se(FeatureMap::identity(), {1.0});

    const auto r1 = permutation_test(k, X, Y, 0.05, 64, 42);
    const auto r2 = permutation_test(k, X, Y, 0.05, 64, 42);
    CHECK(r1.statistic == r2.statistic);
    CHECK(r1.threshold == r2.threshold);
    CHECK(r1.p_value == r2.p_value);
    CHECK(r1.reject == r2.reject);
    CHECK(r1.reject == (r1.statistic > r1.threshold));
    CHECK(r1.p_value >= 1.0 / 65.0);
    CHECK(r1.p_value <= 1.0);

    // a single permutation is its own threshold order statistic; recompute it
    // from the seeded shuffle and the re-split pooled samples
    const auto single = permutation_test(k, X, Y, 0.05, 1, 7);
    Rng perm_rng(derive_seed(7, 1));
    std::vector<int> idx(16);
    std::iota(idx.begin(), idx.end(), 0);
    perm_rng.shuffle(idx.begin(), idx.end());
    Matrix pooled(10, 16);
    pooled.leftCols(8) = X.values();
    pooled.rightCols(8) = Y.values();
    Matrix xv(10, 8), yv(10, 8);
    for (int i = 0; i < 8; ++i) {
        xv.col(i) = pooled.col(idx[i]);
        yv.col(i) = pooled.col(idx[8 + i]);
    }
    const double permuted_stat =
        mmd_u_statistic(k, FunctionSet(mesh, xv), FunctionSet(mesh, yv));
    CHECK(single.n_permutations == 1);
    CHECK(single.threshold == doctest::Approx(permuted_stat).epsilon(1e-12));
    CHECK(single.p_value == doctest::Approx((single.statistic > single.threshold ? 1.0 : 2.0) / 2.0));

    CHECK_THROWS_AS((void)permutation_test(k, X, Y, 0.0, 10, 1), std::invalid_argument);
    CHECK_THROWS_AS((void)permutation_test(k, X, Y, 0.05, 0, 1), std::invalid_argument);
}

TEST_CASE("p-values are near uniform under the null") {
    Vector pt(1);
    pt << 0.0;
    auto mesh = Mesh::from_points(pt);
    auto spec = GaussianSpec::from_covariance(mesh, Vector::Zero(1), Matrix::Identity(1, 1));
    auto k = KernelSpec::se(FeatureMap::identity(), {1.0});

    const int trials = 500, n = 16, perms = 99;
    std::vector<double> pvals(trials);
    for (int t = 0; t < trials; ++t) {
        auto X = sample_gp(spec, n, derive_seed(77, 2 * t));
        auto Y = sample_gp(spec, n, derive_seed(77, 2 * t + 1));
        pvals[t] = permutation_test(k, X, Y, 0.05, perms, derive_seed(78, t)).p_value;
    }
    std::sort(pvals.begin(), pvals.end());
    double ks = 0.0;
    for (int i = 0; i < trials; ++i) {
        const double ecdf_hi = static_cast<double>(i + 1) / trials;
        const double ecdf_lo = static_cast<double>(i) / trials;
        ks = std::max({ks, std::abs(ecdf_hi - pvals[i]), std::abs(pvals[i] - ecdf_lo)});
    }
    CHECK(ks < 0.1);
}

TEST_CASE("power harness hits the nominal size under the null") {
    auto mesh = Mesh::uniform(8, 0.0, 1.0);
    auto spec = GaussianSpec::from_ground(mesh, Vector::Zero(8), GroundKernel::squared_exponential(0.3));
    SampleGenerator gen = [spec](std::uint64_t seed) { return sample_gp(spec, 20, seed); };
    auto rule = median_se_rule(FeatureMap::identity());

    const auto report = power_harness(gen, gen, rule, 0.05, 200, 99, 555);
    CHECK(report.n_trials == 200);
    CHECK(report.trial_seeds.size() == 200);
    CHECK(report.rejection_rate >= 0.01);
    CHECK(report.rejection_rate <= 0.11);

    // scheduling independence: a second run reproduces the rate exactly
    const auto again = power_harness(gen, gen, rule, 0.05, 200, 99, 555);
    CHECK(again.rejection_rate == report.rejection_rate);
}
