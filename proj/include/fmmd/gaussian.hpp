#pragma once

#include <cstdint>
#include <utility>

#include "fmmd/feature_map.hpp"
#include "fmmd/ground_kernel.hpp"
#include "fmmd/mesh.hpp"

namespace fmmd {

/// Gaussian measure discretised on a mesh: mean values and the pointwise
/// covariance matrix Sigma_ij = k0(t_i, t_j). Sampling factorizes
/// Sigma + jitter*I; jitter defaults to 1e-10 * trace/N and escalates
/// tenfold up to three times before failing.
struct GaussianSpec {
    MeshPtr mesh;
    Vector mean;
    Matrix covariance;
    double jitter = 0.0;

    static GaussianSpec from_ground(MeshPtr mesh, Vector mean, const GroundKernel& k0);
    static GaussianSpec from_covariance(MeshPtr mesh, Vector mean, Matrix covariance,
                                        double jitter = -1.0);
};

/// n independent draws mean + L eta with L L^T = covariance + jitter I.
FunctionSet sample_gp(const GaussianSpec& spec, int n, std::uint64_t seed);

// ---------------------------------------------------------------------------
// Closed forms. All operators and vectors below live in the
// quadrature-symmetrised basis: a pointwise covariance Sigma becomes
// W^{1/2} Sigma W^{1/2}, mean values v become W^{1/2} v, and a feature map
// with action matrix M becomes W^{1/2} M W^{-1/2}. In that basis the
// quadrature inner product is Euclidean, finite-mesh determinants converge to
// operator determinants as the mesh refines, and an identity map with
// bandwidth gamma is simply I/gamma.
// ---------------------------------------------------------------------------

Matrix quad_symmetrise(const Matrix& pointwise, const Mesh& mesh);
Vector quad_coords(const Vector& values, const Mesh& mesh);

/// Symmetrised operator of a linear feature map divided by the bandwidth.
/// Square maps have no operator form and are rejected.
Matrix feature_operator(const FeatureMap& T, const Mesh& mesh, double bandwidth);

/// Kernel operator T with the covariance operators S, R of the two measures.
/// commuting is set when all three pairwise commutators vanish within
/// 1e-8 relative tolerance; it selects the cheaper determinant path and
/// gates the variance formulas.
struct OperatorTriple {
    Matrix T, S, R;
    bool commuting = false;
};

OperatorTriple make_operator_triple(Matrix T, Matrix S, Matrix R);

/// E_{y ~ N(a,S)} exp(-||T(x) - T(y)||^2 / 2)
///   = det(I + TST)^{-1/2} exp(-<(I+TST)^{-1} T(x-a), T(x-a)>/2),
/// always in (0, 1].
double mean_embedding(const Matrix& T, const Matrix& S, const Vector& a, const Vector& x);

/// Exact squared MMD between N(a,S) and N(b,R) under the
/// squared-exponential kernel with operator T; valid for arbitrary
/// symmetric PSD S, R.
double closed_form_mmd_general(const Matrix& T, const Matrix& S, const Matrix& R, const Vector& a,
                               const Vector& b);

/// Simplified determinant form available when T, S, R commute.
double closed_form_mmd_commuting(const Matrix& T, const Matrix& S, const Matrix& R, const Vector& a,
                                 const Vector& b);

/// Dispatches on the commuting flag; both paths agree within 1e-8 on
/// commuting inputs.
double closed_form_mmd(const OperatorTriple& ops, const Vector& a, const Vector& b);

/// Asymptotic variance components of the quadratic (xi1) and linear-time
/// (xi2) estimators for the mean-shift pair N(0,S) vs N(m,S). Requires T and
/// S to commute. Tiny negative round-off is clipped to zero.
std::pair<double, double> xi_mean_shift(const Matrix& T, const Matrix& S, const Vector& m);

/// General-pair variance components for N(a,S) vs N(b,R); requires the
/// commuting triple. Reduces exactly to xi_mean_shift at S = R, a = 0.
std::pair<double, double> xi_general(const OperatorTriple& ops, const Vector& a, const Vector& b);

/// closed_form_mmd / sqrt(xi2); the power surrogate of the linear-time test.
double snr_ratio(const OperatorTriple& ops, const Vector& a, const Vector& b);

/// Large-mesh limits of the surrogate for the mean-shift test with bandwidth
/// growing faster than sqrt(N):
///  - WhiteNoise:        sqrt(N) ||m||^2 / (2 sqrt(1 + ||m||^2))
///  - SmoothCovariance:  ||m||^2 / (2 sqrt(||C_{k0}||_HS^2 + ||C^{1/2}m||^2)),
///    independent of N.
/// Norms use the quadrature metric of m's mesh, which doubles as the
/// reference mesh for the operator norms.
enum class ScalingCase { WhiteNoise, SmoothCovariance };
double scaling_rhs(ScalingCase scaling_case, const FunctionSample& m, const GroundKernel& k0, int N);

/// For independent x ~ N(mu1, S1), y ~ N(mu2, S2) on R^N (plain Euclidean
/// norms, no quadrature):
///   E||x-y||^2 = Tr(S1 + S2) + ||mu1 - mu2||^2
/// and |median/expectation - 1| is bounded by
///   sqrt(2) (1 - ||mu1-mu2||^4 / E^2)^{1/2}.
struct MedianLemmaResult {
    double expectation;
    double bound;
};
MedianLemmaResult median_lemma(const Vector& mu1, const Vector& mu2, const Matrix& S1,
                               const Matrix& S2);

}  // namespace fmmd
