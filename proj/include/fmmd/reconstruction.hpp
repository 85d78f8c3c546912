#pragma once

#include <cstdint>
#include <utility>

#include "fmmd/ground_kernel.hpp"
#include "fmmd/kernels.hpp"
#include "fmmd/mesh.hpp"

namespace fmmd {

/// Scattered observations of one function: strictly increasing locations,
/// one value per location. Locations may differ per sample.
struct Observation {
    Vector locations;
    Vector values;
    double noise_sd = 0.0;
};

/// Point evaluation of x at the given locations plus iid Gaussian noise.
/// Locations must be sorted strictly increasing and lie inside x's mesh span.
Observation discretise(const FunctionSample& x, const Vector& locations, double noise_sd,
                       std::uint64_t seed);

/// Maps scattered observations back onto a common target mesh.
///
///  - LinearInterp:    piecewise linear through the observations, clamped to
///                     the end values outside their span
///  - KernelInterp:    solves (K0 + noise_var I) c = values and evaluates
///                     k0(t, locations) c; noise_var = 0 interpolates the
///                     observations exactly, noise_var > 0 is the posterior
///                     mean of a Gaussian process with that noise level
///  - BasisProjection: keeps the first `keep` coefficients of the (linearly
///                     interpolated) sample in an orthonormal basis
class Reconstructor {
public:
    enum class Kind { LinearInterp, KernelInterp, BasisProjection };

    static Reconstructor linear_interp(MeshPtr target_mesh);
    static Reconstructor kernel_interp(MeshPtr target_mesh, GroundKernel k0, double noise_var);
    static Reconstructor basis_projection(const FunctionSet& basis, int keep);

    Kind kind() const { return kind_; }
    const MeshPtr& target_mesh() const { return target_mesh_; }

    FunctionSample reconstruct(const Observation& obs) const;

    /// Convenience: discretise then reconstruct each member of a set, with
    /// per-sample observation locations drawn by the caller.
    FunctionSet reconstruct_all(const std::vector<Observation>& observations) const;

private:
    explicit Reconstructor(Kind kind) : kind_(kind) {}

    Kind kind_;
    MeshPtr target_mesh_;
    GroundKernel k0_ = GroundKernel::squared_exponential(1.0);
    double noise_var_ = 0.0;
    Matrix basis_;
    Matrix coeff_;
    int keep_ = 0;
};

/// Realized estimator perturbation and its a-priori bound:
///   lhs = |MMD^2(X,Y) - MMD^2(RX,RY)| (U-statistic),
///   rhs = (4 L / n) sum_i ||T(rx_i)-T(x_i)|| + ||T(ry_i)-T(y_i)||
/// with norms in the bandwidth-scaled feature metric, L = 1/sqrt(e) for the
/// squared-exponential kernel and 2/(3 sqrt(3)) for the inverse
/// multi-quadric. lhs <= rhs holds deterministically.
std::pair<double, double> approx_mmd_bound(const KernelSpec& k, const FunctionSet& X,
                                           const FunctionSet& Y, const FunctionSet& RX,
                                           const FunctionSet& RY);

}  // namespace fmmd
