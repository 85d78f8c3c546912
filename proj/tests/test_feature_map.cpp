#include <doctest.h>

#include <array>
#include <cmath>
#include <fmmd/feature_map.hpp>
#include <fmmd/rng.hpp>

#include "test_util.hpp"

using namespace fmmd;

TEST_CASE("identity and square maps") {
    auto mesh = Mesh::uniform(20, 0.0, 1.0);
    FunctionSample x{mesh, Vector::Constant(20, 2.0)};

    auto id = FeatureMap::identity();
    CHECK(id.part_count() == 1);
    CHECK(id.apply(x).parts[0].values == x.values);

    auto sq = FeatureMap::square();
    CHECK(sq.part_count() == 2);
    const auto mapped = sq.apply(x);
    CHECK(mapped.parts[0].values == x.values);
    CHECK((mapped.parts[1].values.array() == 4.0).all());
}

TEST_CASE("spectral map with a single component") {
    auto mesh = Mesh::uniform(30, 0.0, 1.0);
    Vector lambda(1);
    lambda << 4.0;
    FunctionSet basis(mesh, Matrix::Ones(30, 1));  // e1 == 1 is orthonormal on [0,1]
    auto T = FeatureMap::spectral(lambda, basis);
    FunctionSample x{mesh, Vector::Constant(30, 3.0)};
    const auto y = T.apply(x);
    CHECK(y.parts[0].values.maxCoeff() == doctest::Approx(6.0).epsilon(1e-12));
    CHECK(y.parts[0].values.minCoeff() == doctest::Approx(6.0).epsilon(1e-12));
}

TEST_CASE("spectral map validation") {
    auto mesh = Mesh::uniform(10, 0.0, 1.0);
    FunctionSet ones(mesh, Matrix::Ones(10, 1));
    Vector bad(1);
    bad << -1.0;
    CHECK_THROWS_AS((void)FeatureMap::spectral(bad, ones), std::invalid_argument);
    // not orthonormal: norm is 2, not 1
    FunctionSet twos(mesh, 2.0 * Matrix::Ones(10, 1));
    Vector lam(1);
    lam << 1.0;
    CHECK_THROWS_AS((void)FeatureMap::spectral(lam, twos), std::invalid_argument);
}

TEST_CASE("mapped squared distance") {
    auto mesh = Mesh::uniform(25, 0.0, 1.0);
    Rng rng(3);
    auto x = test::random_sample(mesh, rng);
    auto y = test::random_sample(mesh, rng);

    auto id = FeatureMap::identity();
    const std::array<double, 1> unit{1.0};
    CHECK(mapped_sq_distance(id, x, x, unit) == 0.0);
    CHECK(mapped_sq_distance(id, x, y, unit) == doctest::Approx(sq_distance(x, y)).epsilon(1e-12));

    auto sq = FeatureMap::square();
    FunctionSample one{mesh, Vector::Ones(25)};
    FunctionSample zero{mesh, Vector::Zero(25)};
    const std::array<double, 2> both{1.0, 1.0};
    CHECK(mapped_sq_distance(sq, one, zero, both) == doctest::Approx(2.0).epsilon(1e-12));

    CHECK_THROWS_AS((void)mapped_sq_distance(sq, x, y, unit), std::invalid_argument);
}

TEST_CASE("linear variants are linear in the sample") {
    auto mesh = Mesh::uniform(24, 0.0, 1.0);
    Rng rng(5);
    const auto k0 = GroundKernel::squared_exponential(0.3);
    auto pool = test::random_set(mesh, 8, rng);
    const std::array<FeatureMap, 3> maps{FeatureMap::identity(),
                                         FeatureMap::integral_operator(k0, mesh),
                                         FeatureMap::fpca(pool, 0.9)};
    for (const auto& T : maps) {
        auto x = test::random_sample(mesh, rng);
        auto y = test::random_sample(mesh, rng);
        const double a = 0.7, b = -1.3;
        FunctionSample combo{mesh, a * x.values + b * y.values};
        const Vector lhs = T.apply(combo).parts[0].values;
        const Vector rhs = a * T.apply(x).parts[0].values + b * T.apply(y).parts[0].values;
        CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("fpca recovers a rank-1 pool") {
    auto mesh = Mesh::uniform(40, 0.0, 1.0);
    Vector u(40);
    for (Index i = 0; i < 40; ++i) u[i] = std::sin(2.0 * M_PI * mesh->points()[i]) + 0.2;
    Rng rng(9);
    Matrix vals(40, 6);
    for (Index c = 0; c < 6; ++c) vals.col(c) = (1.0 + rng.normal()) * u;
    auto T = FeatureMap::fpca(FunctionSet(mesh, vals), 0.95);
    CHECK(T.retained() == 1);
    // eigenfunction proportional to u up to sign, unit norm in the mesh metric
    FunctionSample e1{mesh, T.eigenfunctions().col(0)};
    FunctionSample uu{mesh, u};
    const double cosine = inner_product(e1, uu) / std::sqrt(sq_norm(e1) * sq_norm(uu));
    CHECK(std::abs(cosine) == doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("fpca eigenfunctions are orthonormal and ordered") {
    auto mesh = Mesh::uniform(35, 0.0, 1.0);
    Rng rng(13);
    auto pool = test::random_set(mesh, 12, rng);
    auto T = FeatureMap::fpca(pool, 1.0);
    const Vector& lam = T.eigenvalues();
    for (Index i = 0; i + 1 < lam.size(); ++i) CHECK(lam[i] >= lam[i + 1]);
    CHECK(lam.minCoeff() > 0.0);
    for (Index i = 0; i < T.retained(); ++i) {
        for (Index j = 0; j <= i; ++j) {
            FunctionSample ei{mesh, T.eigenfunctions().col(i)};
            FunctionSample ej{mesh, T.eigenfunctions().col(j)};
            CHECK(inner_product(ei, ej) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-8));
        }
    }
}

TEST_CASE("fpca keeps everything above the spectral floor at full retention") {
    auto mesh = Mesh::uniform(15, 0.0, 1.0);
    Rng rng(17);
    auto pool = test::random_set(mesh, 4, rng);  // rank <= 3 after centring
    auto T = FeatureMap::fpca(pool, 1.0);
    CHECK(T.retained() == 3);
}

TEST_CASE("fpca error paths") {
    auto mesh = Mesh::uniform(10, 0.0, 1.0);
    Matrix single = Matrix::Ones(10, 1);
    CHECK_THROWS_AS((void)FeatureMap::fpca(FunctionSet(mesh, single), 0.95), InsufficientData);
    Matrix identical = Matrix::Ones(10, 5);
    CHECK_THROWS_AS((void)FeatureMap::fpca(FunctionSet(mesh, identical), 0.95), DegenerateSpectrum);
}

TEST_CASE("spectral map round-trips through the reconstructed operator") {
    auto mesh = Mesh::uniform(30, 0.0, 1.0);
    Rng rng(21);
    auto pool = test::random_set(mesh, 20, rng);
    auto fp = FeatureMap::fpca(pool, 1.0);

    // operator with action sum_n mu_n <., e_n> e_n equals the spectral map
    // with eigenvalues mu_n^2 (the spectral variant applies square roots)
    const Index k = fp.retained();
    Vector mu = fp.eigenvalues().cwiseSqrt();
    Matrix action = Matrix::Zero(30, 30);
    for (Index i = 0; i < k; ++i)
        action += mu[i] * fp.eigenfunctions().col(i) *
                  (fp.eigenfunctions().col(i).transpose() * mesh->weights().asDiagonal());
    auto op = FeatureMap::from_operator(action, mesh);

    auto x = test::random_sample(mesh, rng);
    const Vector a = fp.apply(x).parts[0].values;
    const Vector b = op.apply(x).parts[0].values;
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-8);
}
