#pragma once

#include <cstdint>
#include <vector>

#include "fmmd/feature_map.hpp"
#include "fmmd/mesh.hpp"

namespace fmmd {

/// Kernel on function space.
///
///  - SeT:           exp(-(1/2) sum_p ||T(x)_p - T(y)_p||^2 / gamma_p^2)
///  - ImqT:          (sum_p ||T(x)_p - T(y)_p||^2 / gamma_p^2 + 1)^{-1/2}
///  - Cov:           <x, y>^2 in the mesh inner product
///  - RandomFeature: Monte-Carlo feature expansion
///                   (1/n_S) sum_l Phi(sum_i lambda_i^{1/2} <x,e_i> eta_i^l) *
///                           Phi(sum_j lambda_j^{1/2} <y,e_j> eta_j^l)
///                   with eta_i^l standard normal drawn from (seed, l, i)
///                   counters. The CosSin basis stacks cos and sin features
///                   per draw and converges to the squared-exponential kernel
///                   of the matching spectral map as n_S grows.
class KernelSpec {
public:
    enum class Kind { SeT, ImqT, Cov, RandomFeature };
    enum class FeatureBasis { CosSin, Cos };

    static KernelSpec se(FeatureMap T, std::vector<double> bandwidths);
    static KernelSpec imq(FeatureMap T, std::vector<double> bandwidths);
    static KernelSpec cov();
    static KernelSpec random_feature(Vector eigenvalues, const FunctionSet& basis, int n_features,
                                     std::uint64_t seed, FeatureBasis phi = FeatureBasis::CosSin);

    Kind kind() const { return kind_; }
    const FeatureMap& feature_map() const { return map_; }
    const std::vector<double>& bandwidths() const { return bandwidths_; }

    double eval(const FunctionSample& x, const FunctionSample& y) const;

    /// Kxx, Kyy symmetric; Kxy is |X| x |Y|. Entries equal eval on the pair.
    struct GramTriple {
        Matrix xx, yy, xy;
    };
    GramTriple grams(const FunctionSet& X, const FunctionSet& Y) const;

    Matrix gram(const FunctionSet& A, const FunctionSet& B) const;

private:
    KernelSpec(Kind kind, FeatureMap map) : kind_(kind), map_(std::move(map)) {}

    Kind kind_;
    FeatureMap map_;
    std::vector<double> bandwidths_;
    // random-feature state
    Vector rf_eigenvalues_;
    Matrix rf_coeff_;     // basis^T W
    Matrix rf_weights_;   // n_S x n_basis, eta_i^l * sqrt(lambda_i)
    int rf_n_features_ = 0;
    std::uint64_t rf_seed_ = 0;
    FeatureBasis rf_phi_ = FeatureBasis::CosSin;
};

/// Bandwidths-squared per direct-sum part: the median over all unordered
/// distinct pairs of pooled samples of ||T(a) - T(b)||^2. Even pair counts
/// take the midpoint of the central two; zero-distance pairs are included.
std::vector<double> median_heuristic(const FeatureMap& T, const FunctionSet& X, const FunctionSet& Y);

}  // namespace fmmd
