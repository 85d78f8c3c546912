#pragma once

#include <span>
#include <vector>

#include "fmmd/ground_kernel.hpp"
#include "fmmd/mesh.hpp"

namespace fmmd {

/// Image of one sample under a feature map; the squaring map produces the
/// direct-sum pair (x, x^2), every other map a single part.
struct MappedSample {
    std::vector<FunctionSample> parts;
};

/// Batch form: parts[p] has one column per input sample.
struct MappedSet {
    MeshPtr mesh;
    std::vector<Matrix> parts;
};

/// Map T applied to samples before a squared-exponential or inverse
/// multi-quadric kernel.
///
/// Variants:
///  - Identity:    x -> x
///  - Spectral:    x -> sum_n lambda_n^{1/2} <x, e_n> e_n  (square-root scaling)
///  - IntegralOp:  x -> C_{k0} x, the covariance operator of a ground kernel
///                 applied directly (no square root)
///  - Square:      x -> (x, x^2) pointwise
///  - Fpca:        Spectral map built from the empirical covariance of a pool
class FeatureMap {
public:
    enum class Kind { Identity, Spectral, IntegralOp, Square, Fpca };

    static FeatureMap identity();
    static FeatureMap square();

    /// eigenvalues strictly positive, sorted descending; eigenfunction columns
    /// orthonormal under the mesh inner product within 1e-8.
    static FeatureMap spectral(Vector eigenvalues, const FunctionSet& eigenfunctions);

    /// Materializes the covariance operator of k0 on the mesh.
    static FeatureMap integral_operator(const GroundKernel& k0, const MeshPtr& mesh);

    /// IntegralOp from an explicit action matrix on value vectors.
    static FeatureMap from_operator(Matrix action, MeshPtr mesh);

    /// Mean-centred empirical covariance of the pool, eigendecomposed in the
    /// quadrature metric; keeps the smallest count of components whose
    /// eigenvalue mass reaches var_fraction. Eigenfunction signs are fixed by
    /// making each one's largest-magnitude value positive.
    static FeatureMap fpca(const FunctionSet& pool, double var_fraction);

    Kind kind() const { return kind_; }
    int part_count() const { return kind_ == Kind::Square ? 2 : 1; }
    const MeshPtr& mesh() const { return mesh_; }

    const Vector& eigenvalues() const { return eigenvalues_; }
    /// columns are eigenfunction values on the mesh
    const Matrix& eigenfunctions() const { return basis_; }
    const Matrix& action() const { return action_; }
    int retained() const { return static_cast<int>(eigenvalues_.size()); }
    double var_fraction() const { return var_fraction_; }

    MappedSample apply(const FunctionSample& x) const;
    MappedSet apply_set(const FunctionSet& xs) const;

private:
    FeatureMap(Kind kind) : kind_(kind) {}

    Kind kind_;
    MeshPtr mesh_;
    Vector eigenvalues_;
    Matrix basis_;      // eigenfunction values, one column per component
    Matrix coeff_;      // basis^T W: values -> basis coefficients
    Matrix action_;     // IntegralOp only
    double var_fraction_ = 1.0;
};

/// sum over direct-sum parts of ||T(x)_p - T(y)_p||^2 / gamma_p^2, the
/// exponent fed to the SE-T and IMQ-T kernels. Bandwidth count must match the
/// part count.
double mapped_sq_distance(const FeatureMap& T, const FunctionSample& x, const FunctionSample& y,
                          std::span<const double> bandwidths);

}  // namespace fmmd
