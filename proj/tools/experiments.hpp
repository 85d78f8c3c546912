#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <fmmd/csv.hpp>
#include <fmmd/estimators.hpp>
#include <fmmd/gaussian.hpp>
#include <fmmd/reconstruction.hpp>

namespace fmmd::bench {

// Desk-scale defaults keep every experiment under a few minutes; the
// paper_scale flag restores 500 trials / 1000 permutations.
struct ExperimentConfig {
    std::string experiment;
    double alpha = 0.05;
    int n_trials = 100;
    int n_perm = 200;
    int n_samples = 0;                    // 0 -> per-experiment default
    int mesh_size = 0;                    // 0 -> per-experiment default
    std::vector<std::string> kernels;     // empty -> {ID, CEXP, COV, SQR, FPCA}
    std::vector<double> deltas;           // empty -> per-experiment default
    std::vector<int> mesh_grid;           // scaling only
    std::vector<double> lengthscales;     // scaling only; 0 means white noise
    std::vector<int> subsample_sizes;     // size/growth only
    std::uint64_t seed = 12345;
    std::string data_path;
    bool paper_scale = false;
};

// data generators used by the synthetic benchmarks; delta = 0 (or 1 for the
// rescaling family) is the null configuration
SampleGenerator mean_shift_generator(double delta, int n, const MeshPtr& mesh);
SampleGenerator var_shift1_generator(double delta, int n, const MeshPtr& mesh);
SampleGenerator var_shift2_generator(double delta, int n, const MeshPtr& mesh);
// irregularly observed, noise-corrupted pair smoothed onto the target mesh;
// is_y switches mean structure, observation density and noise level
SampleGenerator higher_order_generator(double delta, int n, const MeshPtr& target, bool is_y);

/// ID | CEXP | COV | SQR | FPCA, with per-trial median-heuristic bandwidths
/// (FPCA also refits its basis on each trial's pooled samples).
KernelRule kernel_rule(const std::string& id, const MeshPtr& mesh);

const std::vector<std::string>& all_kernel_ids();

std::vector<ResultRow> run_scaling(const ExperimentConfig& cfg);
std::vector<ResultRow> run_benchmark(const ExperimentConfig& cfg);
std::vector<ResultRow> run_size(const ExperimentConfig& cfg);
std::vector<ResultRow> run_growth(const ExperimentConfig& cfg);

struct ValidateRow {
    std::string name;
    double closed_form = 0.0;
    double mc_mean = 0.0;
    double mc_se = 0.0;
    double xi2_theory = 0.0;      // NaN when the triple does not commute
    double xi2_empirical = 0.0;
    bool flagged = false;
};
struct ValidateOutcome {
    std::vector<ValidateRow> rows;
    bool any_flagged = false;
};

/// Battery of Gaussian pairs whose exact squared MMD is known; each case is
/// re-estimated by Monte-Carlo U-statistics and flagged when the mean drifts
/// more than three standard errors from the exact value.
ValidateOutcome run_validate(const ExperimentConfig& cfg);

std::string validate_csv(const std::vector<ValidateRow>& rows);

}  // namespace fmmd::bench
