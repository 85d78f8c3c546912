#include "fmmd/feature_map.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

namespace fmmd {

FeatureMap FeatureMap::identity() { return FeatureMap(Kind::Identity); }

FeatureMap FeatureMap::square() { return FeatureMap(Kind::Square); }

FeatureMap FeatureMap::spectral(Vector eigenvalues, const FunctionSet& eigenfunctions) {
    if (eigenvalues.size() != eigenfunctions.size())
        throw std::invalid_argument("eigenvalue/eigenfunction count mismatch");
    if (eigenvalues.size() == 0) throw std::invalid_argument("spectral map needs at least one component");
    for (Index i = 0; i < eigenvalues.size(); ++i) {
        if (!(eigenvalues[i] > 0.0)) throw std::invalid_argument("eigenvalues must be strictly positive");
        if (i > 0 && eigenvalues[i] > eigenvalues[i - 1])
            throw std::invalid_argument("eigenvalues must be sorted descending");
    }
    FeatureMap T(Kind::Spectral);
    T.mesh_ = eigenfunctions.mesh();
    T.eigenvalues_ = std::move(eigenvalues);
    T.basis_ = eigenfunctions.values();
    T.coeff_ = T.basis_.transpose() * T.mesh_->weights().asDiagonal();
    const Matrix g = T.coeff_ * T.basis_;
    if ((g - Matrix::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff() > 1e-8)
        throw std::invalid_argument("eigenfunctions are not orthonormal in the mesh inner product");
    return T;
}

FeatureMap FeatureMap::integral_operator(const GroundKernel& k0, const MeshPtr& mesh) {
    if (!mesh) throw std::invalid_argument("integral operator needs a mesh");
    FeatureMap T(Kind::IntegralOp);
    T.mesh_ = mesh;
    T.action_ = k0.covariance_operator(*mesh).action;
    return T;
}

FeatureMap FeatureMap::from_operator(Matrix action, MeshPtr mesh) {
    if (!mesh) throw std::invalid_argument("operator map needs a mesh");
    if (action.rows() != mesh->size() || action.cols() != mesh->size())
        throw std::invalid_argument("operator matrix does not match mesh size");
    FeatureMap T(Kind::IntegralOp);
    T.mesh_ = std::move(mesh);
    T.action_ = std::move(action);
    return T;
}

FeatureMap FeatureMap::fpca(const FunctionSet& pool, double var_fraction) {
    if (pool.size() < 2) throw InsufficientData("fpca needs at least 2 samples");
    if (!(var_fraction > 0.0) || var_fraction > 1.0)
        throw std::invalid_argument("var_fraction must lie in (0, 1]");

    const MeshPtr mesh = pool.mesh();
    const Index n_mesh = mesh->size();
    const Index n = pool.size();

    const Vector mean = pool.values().rowwise().mean();
    Matrix centred = pool.values().colwise() - mean;
    // work in the quadrature-symmetrised basis so Euclidean eigenpairs are
    // orthonormal in the mesh inner product after the W^{-1/2} lift
    Matrix Z = mesh->sqrt_weights().asDiagonal() * centred;

    Vector lam;
    Matrix vecs;  // columns orthonormal in R^{n_mesh}
    if (n < n_mesh) {
        // dual form: eigen of the small sample Gram
        const Matrix G = Z.transpose() * Z / static_cast<double>(n - 1);
        Eigen::SelfAdjointEigenSolver<Matrix> es(G);
        const Vector d = es.eigenvalues();
        const Matrix U = es.eigenvectors();
        lam.resize(n);
        vecs.resize(n_mesh, n);
        for (Index i = 0; i < n; ++i) {
            const Index src = n - 1 - i;  // descending
            lam[i] = d[src];
            const double s = std::sqrt(std::max(d[src], 0.0) * static_cast<double>(n - 1));
            vecs.col(i) = s > 0.0 ? Vector(Z * U.col(src) / s) : Vector(Vector::Zero(n_mesh));
        }
    } else {
        const Matrix B = Z * Z.transpose() / static_cast<double>(n - 1);
        Eigen::SelfAdjointEigenSolver<Matrix> es(B);
        const Vector d = es.eigenvalues();
        const Matrix V = es.eigenvectors();
        lam.resize(n_mesh);
        vecs.resize(n_mesh, n_mesh);
        for (Index i = 0; i < n_mesh; ++i) {
            lam[i] = d[n_mesh - 1 - i];
            vecs.col(i) = V.col(n_mesh - 1 - i);
        }
    }

    const double lam_max = lam.size() > 0 ? lam[0] : 0.0;
    if (!(lam_max > 0.0)) throw DegenerateSpectrum("pool has no variance to explain");
    const double floor = 1e-12 * lam_max;

    Index keep;
    if (var_fraction >= 1.0) {
        keep = 0;
        while (keep < lam.size() && lam[keep] > floor) ++keep;
    } else {
        double total = 0.0;
        for (Index i = 0; i < lam.size(); ++i) total += std::max(lam[i], 0.0);
        double acc = 0.0;
        keep = 0;
        while (keep < lam.size() && acc < var_fraction * total) {
            acc += std::max(lam[keep], 0.0);
            ++keep;
        }
        // never retain numerically-zero components
        while (keep > 1 && lam[keep - 1] <= floor) --keep;
    }
    if (keep == 0) throw DegenerateSpectrum("pool has no variance to explain");

    FeatureMap T(Kind::Fpca);
    T.mesh_ = mesh;
    T.var_fraction_ = var_fraction;
    T.eigenvalues_ = lam.head(keep);
    T.basis_.resize(n_mesh, keep);
    const Vector inv_sw = mesh->sqrt_weights().cwiseInverse();
    for (Index i = 0; i < keep; ++i) {
        Vector e = inv_sw.asDiagonal() * vecs.col(i);
        Index arg = 0;
        e.cwiseAbs().maxCoeff(&arg);
        if (e[arg] < 0.0) e = -e;
        T.basis_.col(i) = e;
    }
    T.coeff_ = T.basis_.transpose() * mesh->weights().asDiagonal();
    return T;
}

MappedSample FeatureMap::apply(const FunctionSample& x) const {
    switch (kind_) {
        case Kind::Identity:
            return {{x}};
        case Kind::Square: {
            FunctionSample sq{x.mesh, x.values.array().square().matrix()};
            return {{x, std::move(sq)}};
        }
        case Kind::Spectral:
        case Kind::Fpca: {
            require_same_mesh(*x.mesh, *mesh_, "FeatureMap::apply");
            const Vector c = eigenvalues_.array().sqrt().matrix().asDiagonal() * (coeff_ * x.values);
            return {{FunctionSample{mesh_, basis_ * c}}};
        }
        case Kind::IntegralOp: {
            require_same_mesh(*x.mesh, *mesh_, "FeatureMap::apply");
            return {{FunctionSample{mesh_, action_ * x.values}}};
        }
    }
    throw std::logic_error("unreachable");
}

MappedSet FeatureMap::apply_set(const FunctionSet& xs) const {
    MappedSet out;
    out.mesh = xs.mesh();
    switch (kind_) {
        case Kind::Identity:
            out.parts = {xs.values()};
            return out;
        case Kind::Square:
            out.parts = {xs.values(), xs.values().array().square().matrix()};
            return out;
        case Kind::Spectral:
        case Kind::Fpca: {
            require_same_mesh(*xs.mesh(), *mesh_, "FeatureMap::apply_set");
            out.parts = {basis_ * (eigenvalues_.array().sqrt().matrix().asDiagonal() * (coeff_ * xs.values()))};
            return out;
        }
        case Kind::IntegralOp: {
            require_same_mesh(*xs.mesh(), *mesh_, "FeatureMap::apply_set");
            out.parts = {action_ * xs.values()};
            return out;
        }
    }
    throw std::logic_error("unreachable");
}

double mapped_sq_distance(const FeatureMap& T, const FunctionSample& x, const FunctionSample& y,
                          std::span<const double> bandwidths) {
    if (static_cast<int>(bandwidths.size()) != T.part_count())
        throw std::invalid_argument("bandwidth count does not match feature map part count");
    const MappedSample tx = T.apply(x);
    const MappedSample ty = T.apply(y);
    double acc = 0.0;
    for (std::size_t p = 0; p < tx.parts.size(); ++p) {
        if (!(bandwidths[p] > 0.0)) throw std::invalid_argument("bandwidths must be positive");
        acc += sq_distance(tx.parts[p], ty.parts[p]) / (bandwidths[p] * bandwidths[p]);
    }
    return acc;
}

}  // namespace fmmd
