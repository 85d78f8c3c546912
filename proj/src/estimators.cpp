#include "fmmd/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fmmd/parallel.hpp"
#include "fmmd/rng.hpp"

namespace fmmd {

namespace {

void check_sizes(Index nx, Index ny) {
    if (nx != ny) throw std::invalid_argument("estimators require equal sample sizes");
    if (nx < 2) throw InsufficientData("estimators need at least 2 samples per set");
}

// U-statistic evaluated through an index view into the pooled Gram matrix;
// idx[0..n) select the first sample, idx[n..2n) the second.
double ustat_from_pooled(const Matrix& P, const std::vector<int>& idx, int n) {
    double sxx = 0.0, syy = 0.0, sxy = 0.0, diag = 0.0;
    for (int i = 0; i < n; ++i) {
        const int ai = idx[i], bi = idx[n + i];
        const double* col_ai = P.col(ai).data();
        const double* col_bi = P.col(bi).data();
        for (int j = 0; j < n; ++j) {
            const int aj = idx[j], bj = idx[n + j];
            if (i != j) {
                sxx += col_ai[aj];
                syy += col_bi[bj];
            }
            sxy += col_ai[bj];
        }
        diag += col_ai[bi];
    }
    const double denom = static_cast<double>(n) * (n - 1);
    return (sxx + syy - 2.0 * (sxy - diag)) / denom;
}

}  // namespace

double mmd_u_statistic(const Matrix& Kxx, const Matrix& Kyy, const Matrix& Kxy) {
    check_sizes(Kxx.rows(), Kyy.rows());
    if (Kxx.rows() != Kxx.cols() || Kyy.rows() != Kyy.cols())
        throw std::invalid_argument("Kxx and Kyy must be square");
    if (Kxy.rows() != Kxx.rows() || Kxy.cols() != Kyy.rows())
        throw std::invalid_argument("Kxy shape does not match Kxx/Kyy");
    const Index n = Kxx.rows();
    // one shared accumulation order so identical inputs cancel exactly
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (Index j = 0; j < n; ++j)
        for (Index i = 0; i < n; ++i) {
            if (i == j) continue;
            sxx += Kxx(i, j);
            syy += Kyy(i, j);
            sxy += Kxy(i, j);
        }
    return (sxx + syy - 2.0 * sxy) / (static_cast<double>(n) * (n - 1));
}

double mmd_u_statistic(const KernelSpec& k, const FunctionSet& X, const FunctionSet& Y) {
    check_sizes(X.size(), Y.size());
    const auto g = k.grams(X, Y);
    return mmd_u_statistic(g.xx, g.yy, g.xy);
}

double mmd_linear(const KernelSpec& k, const FunctionSet& X, const FunctionSet& Y) {
    check_sizes(X.size(), Y.size());
    const Index n = X.size();
    if (n % 2 != 0) throw std::invalid_argument("linear estimator requires an even sample count");
    double acc = 0.0;
    for (Index i = 0; i + 1 < n; i += 2) {
        const auto x0 = X.sample(i), x1 = X.sample(i + 1);
        const auto y0 = Y.sample(i), y1 = Y.sample(i + 1);
        acc += k.eval(x0, x1) + k.eval(y0, y1) - k.eval(x0, y1) - k.eval(x1, y0);
    }
    return 2.0 * acc / static_cast<double>(n);
}

TestResult permutation_test(const KernelSpec& k, const FunctionSet& X, const FunctionSet& Y,
                            double alpha, int n_perm, std::uint64_t seed) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0, 1)");
    if (n_perm < 1) throw std::invalid_argument("n_perm must be at least 1");
    check_sizes(X.size(), Y.size());
    require_same_mesh(*X.mesh(), *Y.mesh(), "permutation_test");
    const int n = static_cast<int>(X.size());

    Matrix pooled_vals(X.mesh()->size(), 2 * n);
    pooled_vals.leftCols(n) = X.values();
    pooled_vals.rightCols(n) = Y.values();
    const FunctionSet pooled(X.mesh(), std::move(pooled_vals));
    const Matrix P = k.gram(pooled, pooled);

    std::vector<int> identity(2 * n);
    std::iota(identity.begin(), identity.end(), 0);
    const double statistic = ustat_from_pooled(P, identity, n);

    std::vector<double> permuted(n_perm);
    parallel_for(static_cast<std::size_t>(n_perm), [&](std::size_t b) {
        Rng rng(derive_seed(seed, b + 1));
        std::vector<int> idx(2 * n);
        std::iota(idx.begin(), idx.end(), 0);
        rng.shuffle(idx.begin(), idx.end());
        permuted[b] = ustat_from_pooled(P, idx, n);
    });

    int n_ge = 0;
    for (double v : permuted)
        if (v >= statistic) ++n_ge;

    std::vector<double> sorted = permuted;
    std::sort(sorted.begin(), sorted.end());
    auto rank = static_cast<long>(std::ceil((1.0 - alpha) * (n_perm + 1)));
    rank = std::clamp<long>(rank, 1, n_perm);
    const double threshold = sorted[rank - 1];

    TestResult r;
    r.statistic = statistic;
    r.threshold = threshold;
    r.p_value = (1.0 + n_ge) / (n_perm + 1.0);
    r.reject = statistic > threshold;
    r.n_permutations = n_perm;
    r.alpha = alpha;
    return r;
}

KernelRule fixed_kernel(KernelSpec k) {
    return [k = std::move(k)](const FunctionSet&, const FunctionSet&) { return k; };
}

KernelRule median_se_rule(FeatureMap T) {
    return [T = std::move(T)](const FunctionSet& X, const FunctionSet& Y) {
        const auto gamma_sq = median_heuristic(T, X, Y);
        std::vector<double> gamma(gamma_sq.size());
        for (std::size_t i = 0; i < gamma_sq.size(); ++i) gamma[i] = std::sqrt(gamma_sq[i]);
        return KernelSpec::se(T, std::move(gamma));
    };
}

PowerReport power_harness(const SampleGenerator& gen_p, const SampleGenerator& gen_q,
                          const KernelRule& rule, double alpha, int n_trials, int n_perm,
                          std::uint64_t seed) {
    if (n_trials < 1) throw std::invalid_argument("n_trials must be at least 1");
    PowerReport report;
    report.n_trials = n_trials;
    report.trial_seeds.resize(n_trials);
    std::vector<char> rejected(n_trials, 0);
    parallel_for(static_cast<std::size_t>(n_trials), [&](std::size_t i) {
        const std::uint64_t trial_seed = derive_seed(seed, i + 1);
        report.trial_seeds[i] = trial_seed;
        const FunctionSet X = gen_p(derive_seed(trial_seed, 1));
        const FunctionSet Y = gen_q(derive_seed(trial_seed, 2));
        const KernelSpec k = rule(X, Y);
        const TestResult r = permutation_test(k, X, Y, alpha, n_perm, derive_seed(trial_seed, 3));
        rejected[i] = r.reject ? 1 : 0;
    });
    int n_rej = 0;
    for (char c : rejected) n_rej += c;
    report.rejection_rate = static_cast<double>(n_rej) / n_trials;
    return report;
}

}  // namespace fmmd
