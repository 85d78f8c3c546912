#include "fmmd/kernels.hpp"

#include <algorithm>
#include <cmath>

#include "fmmd/rng.hpp"

namespace fmmd {

namespace {

void check_bandwidths(const FeatureMap& T, const std::vector<double>& bw) {
    if (static_cast<int>(bw.size()) != T.part_count())
        throw std::invalid_argument("bandwidth count does not match feature map part count");
    for (double g : bw)
        if (!(g > 0.0)) throw std::invalid_argument("bandwidths must be positive");
}

// sum over parts of the squared quadrature distances divided by gamma_p^2,
// for all pairs of columns between two mapped sets
Matrix scaled_sq_distances(const MappedSet& a, const MappedSet& b, const std::vector<double>& bw,
                           const Vector& weights) {
    Matrix acc = Matrix::Zero(a.parts[0].cols(), b.parts[0].cols());
    for (std::size_t p = 0; p < a.parts.size(); ++p) {
        const Matrix za = weights.array().sqrt().matrix().asDiagonal() * a.parts[p];
        const Matrix zb = weights.array().sqrt().matrix().asDiagonal() * b.parts[p];
        const Vector na = za.colwise().squaredNorm();
        const Vector nb = zb.colwise().squaredNorm();
        Matrix d2 = (-2.0 * (za.transpose() * zb));
        d2.colwise() += na;
        d2.rowwise() += nb.transpose();
        acc += d2.cwiseMax(0.0) / (bw[p] * bw[p]);
    }
    return acc;
}

}  // namespace

KernelSpec KernelSpec::se(FeatureMap T, std::vector<double> bandwidths) {
    check_bandwidths(T, bandwidths);
    KernelSpec k(Kind::SeT, std::move(T));
    k.bandwidths_ = std::move(bandwidths);
    return k;
}

KernelSpec KernelSpec::imq(FeatureMap T, std::vector<double> bandwidths) {
    check_bandwidths(T, bandwidths);
    KernelSpec k(Kind::ImqT, std::move(T));
    k.bandwidths_ = std::move(bandwidths);
    return k;
}

KernelSpec KernelSpec::cov() { return KernelSpec(Kind::Cov, FeatureMap::identity()); }

KernelSpec KernelSpec::random_feature(Vector eigenvalues, const FunctionSet& basis, int n_features,
                                      std::uint64_t seed, FeatureBasis phi) {
    if (n_features < 1) throw std::invalid_argument("n_features must be at least 1");
    // validates positivity/ordering/orthonormality
    FeatureMap spectral = FeatureMap::spectral(eigenvalues, basis);
    KernelSpec k(Kind::RandomFeature, std::move(spectral));
    k.rf_eigenvalues_ = std::move(eigenvalues);
    k.rf_coeff_ = basis.values().transpose() * basis.mesh()->weights().asDiagonal();
    k.rf_n_features_ = n_features;
    k.rf_seed_ = seed;
    k.rf_phi_ = phi;
    const Index m = k.rf_eigenvalues_.size();
    k.rf_weights_.resize(n_features, m);
    for (int l = 0; l < n_features; ++l)
        for (Index i = 0; i < m; ++i)
            k.rf_weights_(l, i) = counter_normal(seed, static_cast<std::uint64_t>(l),
                                                 static_cast<std::uint64_t>(i)) *
                                  std::sqrt(k.rf_eigenvalues_[i]);
    return k;
}

double KernelSpec::eval(const FunctionSample& x, const FunctionSample& y) const {
    switch (kind_) {
        case Kind::SeT:
            return std::exp(-0.5 * mapped_sq_distance(map_, x, y, bandwidths_));
        case Kind::ImqT:
            return 1.0 / std::sqrt(mapped_sq_distance(map_, x, y, bandwidths_) + 1.0);
        case Kind::Cov: {
            const double ip = inner_product(x, y);
            return ip * ip;
        }
        case Kind::RandomFeature: {
            require_same_mesh(*x.mesh, *map_.mesh(), "KernelSpec::eval");
            require_same_mesh(*y.mesh, *map_.mesh(), "KernelSpec::eval");
            const Vector ax = rf_weights_ * (rf_coeff_ * x.values);
            const Vector ay = rf_weights_ * (rf_coeff_ * y.values);
            double acc = 0.0;
            if (rf_phi_ == FeatureBasis::CosSin) {
                for (int l = 0; l < rf_n_features_; ++l) acc += std::cos(ax[l] - ay[l]);
            } else {
                for (int l = 0; l < rf_n_features_; ++l) acc += std::cos(ax[l]) * std::cos(ay[l]);
            }
            return acc / rf_n_features_;
        }
    }
    throw std::logic_error("unreachable");
}

Matrix KernelSpec::gram(const FunctionSet& A, const FunctionSet& B) const {
    require_same_mesh(*A.mesh(), *B.mesh(), "KernelSpec::gram");
    switch (kind_) {
        case Kind::SeT:
        case Kind::ImqT: {
            const MappedSet ma = map_.apply_set(A);
            const MappedSet mb = map_.apply_set(B);
            Matrix e = scaled_sq_distances(ma, mb, bandwidths_, A.mesh()->weights());
            if (kind_ == Kind::SeT) return (-0.5 * e.array()).exp().matrix();
            return (e.array() + 1.0).rsqrt().matrix();
        }
        case Kind::Cov: {
            const Matrix ip = A.values().transpose() * A.mesh()->weights().asDiagonal() * B.values();
            return ip.array().square().matrix();
        }
        case Kind::RandomFeature: {
            require_same_mesh(*A.mesh(), *map_.mesh(), "KernelSpec::gram");
            const Matrix fa = rf_weights_ * (rf_coeff_ * A.values());
            const Matrix fb = rf_weights_ * (rf_coeff_ * B.values());
            if (rf_phi_ == FeatureBasis::CosSin) {
                return (fa.array().cos().matrix().transpose() * fb.array().cos().matrix() +
                        fa.array().sin().matrix().transpose() * fb.array().sin().matrix()) /
                       rf_n_features_;
            }
            return fa.array().cos().matrix().transpose() * fb.array().cos().matrix() / rf_n_features_;
        }
    }
    throw std::logic_error("unreachable");
}

KernelSpec::GramTriple KernelSpec::grams(const FunctionSet& X, const FunctionSet& Y) const {
    GramTriple g;
    g.xx = gram(X, X);
    g.yy = gram(Y, Y);
    g.xy = gram(X, Y);
    // exact unit diagonal for the exponential kernels
    if (kind_ == Kind::SeT) {
        g.xx.diagonal().setOnes();
        g.yy.diagonal().setOnes();
    }
    return g;
}

std::vector<double> median_heuristic(const FeatureMap& T, const FunctionSet& X, const FunctionSet& Y) {
    require_same_mesh(*X.mesh(), *Y.mesh(), "median_heuristic");
    const Index n = X.size() + Y.size();
    if (n < 2) throw InsufficientData("median heuristic needs at least 2 pooled samples");

    Matrix pooled(X.mesh()->size(), n);
    pooled.leftCols(X.size()) = X.values();
    pooled.rightCols(Y.size()) = Y.values();
    const MappedSet mp = T.apply_set(FunctionSet(X.mesh(), std::move(pooled)));

    std::vector<double> gamma_sq(mp.parts.size());
    const Vector sw = X.mesh()->sqrt_weights();
    for (std::size_t p = 0; p < mp.parts.size(); ++p) {
        const Matrix z = sw.asDiagonal() * mp.parts[p];
        const Vector nn = z.colwise().squaredNorm();
        std::vector<double> d2;
        d2.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
        for (Index i = 0; i < n; ++i)
            for (Index j = i + 1; j < n; ++j)
                d2.push_back(std::max(nn[i] + nn[j] - 2.0 * z.col(i).dot(z.col(j)), 0.0));
        const std::size_t m = d2.size();
        std::nth_element(d2.begin(), d2.begin() + m / 2, d2.end());
        double med = d2[m / 2];
        if (m % 2 == 0) {
            const double lower = *std::max_element(d2.begin(), d2.begin() + m / 2);
            med = 0.5 * (med + lower);
        }
        if (!(med > 0.0)) throw DegenerateBandwidth("median of pairwise squared distances is zero");
        gamma_sq[p] = med;
    }
    return gamma_sq;
}

}  // namespace fmmd
