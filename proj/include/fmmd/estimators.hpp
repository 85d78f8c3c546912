#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "fmmd/kernels.hpp"

namespace fmmd {

struct TestResult {
    double statistic = 0.0;   // squared-MMD estimate
    double threshold = 0.0;   // bootstrap (1 - alpha) quantile
    double p_value = 1.0;
    bool reject = false;      // statistic > threshold
    int n_permutations = 0;
    double alpha = 0.0;
};

struct PowerReport {
    double rejection_rate = 0.0;
    int n_trials = 0;
    std::vector<std::uint64_t> trial_seeds;
};

/// Unbiased quadratic-time estimate of squared MMD from Gram matrices.
/// Requires |X| = |Y| = n >= 2; averages
/// h(z_i, z_j) = Kxx(i,j) + Kyy(i,j) - Kxy(i,j) - Kxy(j,i) over i != j.
double mmd_u_statistic(const Matrix& Kxx, const Matrix& Kyy, const Matrix& Kxy);

double mmd_u_statistic(const KernelSpec& k, const FunctionSet& X, const FunctionSet& Y);

/// Unbiased linear-time estimate: (2/n) sum over disjoint consecutive pairs
/// of h(z_{2i-1}, z_{2i}). Requires even n; makes only O(n) kernel calls.
double mmd_linear(const KernelSpec& k, const FunctionSet& X, const FunctionSet& Y);

/// Two-sample permutation test. The pooled Gram matrix is built once and each
/// permutation only reshuffles indices into it. Permutations carry seeds
/// derived from (seed, index), so the result is independent of evaluation
/// order. p-value uses the add-one convention
/// (1 + #{permuted >= observed}) / (n_perm + 1).
TestResult permutation_test(const KernelSpec& k, const FunctionSet& X, const FunctionSet& Y,
                            double alpha, int n_perm, std::uint64_t seed);

using SampleGenerator = std::function<FunctionSet(std::uint64_t seed)>;
using KernelRule = std::function<KernelSpec(const FunctionSet&, const FunctionSet&)>;

KernelRule fixed_kernel(KernelSpec k);

/// Squared-exponential kernel with per-trial median-heuristic bandwidths.
KernelRule median_se_rule(FeatureMap T);

/// Repeats draw -> kernel rule -> permutation test and reports the rejection
/// rate. Trial seeds derive from the master seed; trials may run concurrently
/// and the report does not depend on scheduling.
PowerReport power_harness(const SampleGenerator& gen_p, const SampleGenerator& gen_q,
                          const KernelRule& rule, double alpha, int n_trials, int n_perm,
                          std::uint64_t seed);

}  // namespace fmmd
