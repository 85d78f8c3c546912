#include "fmmd/reconstruction.hpp"

#include <Eigen/Cholesky>
#include <cmath>

#include "fmmd/estimators.hpp"
#include "fmmd/rng.hpp"

namespace fmmd {

namespace {

void check_locations(const Vector& locations) {
    if (locations.size() < 1) throw std::invalid_argument("observation needs at least one location");
    for (Index i = 1; i < locations.size(); ++i)
        if (locations[i] <= locations[i - 1])
            throw std::invalid_argument("observation locations must be strictly increasing");
}

// piecewise linear evaluation with clamped extrapolation
double interp_at(const Vector& knots, const Vector& vals, double t) {
    const Index n = knots.size();
    if (n == 1 || t <= knots[0]) return vals[0];
    if (t >= knots[n - 1]) return vals[n - 1];
    Index lo = 0, hi = n - 1;
    while (hi - lo > 1) {
        const Index mid = (lo + hi) / 2;
        (knots[mid] <= t ? lo : hi) = mid;
    }
    const double frac = (t - knots[lo]) / (knots[lo + 1] - knots[lo]);
    return vals[lo] + frac * (vals[lo + 1] - vals[lo]);
}

Vector interp_onto(const Vector& knots, const Vector& vals, const Vector& targets) {
    Vector out(targets.size());
    for (Index i = 0; i < targets.size(); ++i) out[i] = interp_at(knots, vals, targets[i]);
    return out;
}

}  // namespace

Observation discretise(const FunctionSample& x, const Vector& locations, double noise_sd,
                       std::uint64_t seed) {
    check_locations(locations);
    if (noise_sd < 0.0) throw std::invalid_argument("noise_sd must be nonnegative");
    const double lo = x.mesh->t_min(), hi = x.mesh->t_max();
    if (locations[0] < lo || locations[locations.size() - 1] > hi)
        throw std::invalid_argument("observation locations fall outside the mesh span");
    Observation obs;
    obs.locations = locations;
    obs.values = interp_onto(x.mesh->points(), x.values, locations);
    obs.noise_sd = noise_sd;
    if (noise_sd > 0.0) {
        Rng rng(seed);
        for (Index i = 0; i < obs.values.size(); ++i) obs.values[i] += noise_sd * rng.normal();
    }
    return obs;
}

Reconstructor Reconstructor::linear_interp(MeshPtr target_mesh) {
    if (!target_mesh) throw std::invalid_argument("reconstructor needs a target mesh");
    Reconstructor r(Kind::LinearInterp);
    r.target_mesh_ = std::move(target_mesh);
    return r;
}

Reconstructor Reconstructor::kernel_interp(MeshPtr target_mesh, GroundKernel k0, double noise_var) {
    if (!target_mesh) throw std::invalid_argument("reconstructor needs a target mesh");
    if (noise_var < 0.0) throw std::invalid_argument("noise_var must be nonnegative");
    Reconstructor r(Kind::KernelInterp);
    r.target_mesh_ = std::move(target_mesh);
    r.k0_ = k0;
    r.noise_var_ = noise_var;
    return r;
}

Reconstructor Reconstructor::basis_projection(const FunctionSet& basis, int keep) {
    if (keep < 1 || keep > basis.size())
        throw std::invalid_argument("keep must lie in [1, basis size]");
    Reconstructor r(Kind::BasisProjection);
    r.target_mesh_ = basis.mesh();
    r.basis_ = basis.values().leftCols(keep);
    r.coeff_ = r.basis_.transpose() * basis.mesh()->weights().asDiagonal();
    r.keep_ = keep;
    return r;
}

FunctionSample Reconstructor::reconstruct(const Observation& obs) const {
    check_locations(obs.locations);
    if (obs.values.size() != obs.locations.size())
        throw std::invalid_argument("observation length mismatch");

    switch (kind_) {
        case Kind::LinearInterp:
            return {target_mesh_, interp_onto(obs.locations, obs.values, target_mesh_->points())};
        case Kind::KernelInterp: {
            const Index m = obs.locations.size();
            Matrix K(m, m);
            for (Index j = 0; j < m; ++j)
                for (Index i = 0; i < m; ++i) K(i, j) = k0_(obs.locations[i], obs.locations[j]);
            double jitter = 1e-10 * std::max(K.trace() / static_cast<double>(m), 1e-30);
            Eigen::LLT<Matrix> llt;
            bool ok = false;
            for (int attempt = 0; attempt < 4; ++attempt) {
                llt.compute(K + (noise_var_ + jitter) * Matrix::Identity(m, m));
                if (llt.info() == Eigen::Success) {
                    ok = true;
                    break;
                }
                jitter *= 10.0;
            }
            if (!ok) throw NumericalFailure("kernel interpolation system is singular");
            const Vector c = llt.solve(obs.values);
            Vector out(target_mesh_->size());
            for (Index j = 0; j < target_mesh_->size(); ++j) {
                double acc = 0.0;
                for (Index i = 0; i < m; ++i) acc += k0_(target_mesh_->points()[j], obs.locations[i]) * c[i];
                out[j] = acc;
            }
            return {target_mesh_, std::move(out)};
        }
        case Kind::BasisProjection: {
            const Vector on_mesh = interp_onto(obs.locations, obs.values, target_mesh_->points());
            const Vector beta = coeff_ * on_mesh;
            return {target_mesh_, basis_ * beta};
        }
    }
    throw std::logic_error("unreachable");
}

FunctionSet Reconstructor::reconstruct_all(const std::vector<Observation>& observations) const {
    if (observations.empty()) throw InsufficientData("no observations to reconstruct");
    Matrix values(target_mesh_->size(), static_cast<Index>(observations.size()));
    for (std::size_t i = 0; i < observations.size(); ++i)
        values.col(static_cast<Index>(i)) = reconstruct(observations[i]).values;
    return FunctionSet(target_mesh_, std::move(values));
}

std::pair<double, double> approx_mmd_bound(const KernelSpec& k, const FunctionSet& X,
                                           const FunctionSet& Y, const FunctionSet& RX,
                                           const FunctionSet& RY) {
    if (k.kind() != KernelSpec::Kind::SeT && k.kind() != KernelSpec::Kind::ImqT)
        throw std::invalid_argument("perturbation bound applies to SE-T and IMQ-T kernels only");
    if (X.size() != RX.size() || Y.size() != RY.size() || X.size() != Y.size())
        throw std::invalid_argument("sample counts must match");
    require_same_mesh(*X.mesh(), *RX.mesh(), "approx_mmd_bound");
    require_same_mesh(*Y.mesh(), *RY.mesh(), "approx_mmd_bound");

    const double lhs = std::abs(mmd_u_statistic(k, X, Y) - mmd_u_statistic(k, RX, RY));

    // Lipschitz constants of r -> exp(-r^2/2) and r -> (r^2+1)^{-1/2} in the
    // feature-space distance r. With bandwidths, r is the scaled distance
    // sqrt(sum_p ||.||_p^2 / gamma_p^2), which is exactly the square root of
    // mapped_sq_distance; a single bandwidth gamma therefore turns L into
    // L / gamma as expected.
    const double L = k.kind() == KernelSpec::Kind::SeT ? 1.0 / std::sqrt(std::exp(1.0))
                                                       : 2.0 / (3.0 * std::sqrt(3.0));

    const auto& T = k.feature_map();
    const auto& bw = k.bandwidths();
    double acc = 0.0;
    for (Index i = 0; i < X.size(); ++i) {
        acc += std::sqrt(mapped_sq_distance(T, RX.sample(i), X.sample(i), bw));
        acc += std::sqrt(mapped_sq_distance(T, RY.sample(i), Y.sample(i), bw));
    }
    const double rhs = 4.0 * L * acc / static_cast<double>(X.size());
    return {lhs, rhs};
}

}  // namespace fmmd
