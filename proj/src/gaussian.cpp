#include "fmmd/gaussian.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "fmmd/rng.hpp"

namespace fmmd {

namespace {

Matrix symmetrized(const Matrix& m) { return 0.5 * (m + m.transpose()); }

void require_symmetric_psd(const Matrix& m, const char* name) {
    if (m.rows() != m.cols()) throw InvalidOperator(std::string(name) + " must be square");
    const double scale = 1.0 + m.cwiseAbs().maxCoeff();
    if ((m - m.transpose()).cwiseAbs().maxCoeff() > 1e-8 * scale)
        throw InvalidOperator(std::string(name) + " must be symmetric");
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(m), Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    const double hi = es.eigenvalues().cwiseAbs().maxCoeff();
    if (lo < -1e-8 * std::max(hi, 1.0))
        throw InvalidOperator(std::string(name) + " must be positive semi-definite");
}

bool commute(const Matrix& a, const Matrix& b) {
    const double scale = 1.0 + a.norm() * b.norm();
    return (a * b - b * a).norm() <= 1e-8 * scale;
}

// log det(I + M) through the symmetric eigendecomposition; stays in the log
// domain so eigenvalues up to ~1e6 pose no overflow problem
double logdet_I_plus(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(m), Eigen::EigenvaluesOnly);
    double acc = 0.0;
    for (Index i = 0; i < es.eigenvalues().size(); ++i) {
        const double lam = es.eigenvalues()[i];
        if (lam <= -1.0) throw NumericalFailure("determinant argument is singular");
        acc += std::log1p(lam);
    }
    return acc;
}

// <(I + M)^{-1} d, d> for symmetric PSD M
double quad_form_inv(const Matrix& m, const Vector& d) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(m));
    const Vector u = es.eigenvectors().transpose() * d;
    double acc = 0.0;
    for (Index i = 0; i < u.size(); ++i) acc += u[i] * u[i] / (1.0 + std::max(es.eigenvalues()[i], -0.5));
    return acc;
}

// symmetric PSD square root with negative eigenvalues clipped at zero
Matrix sqrt_psd(const Matrix& m) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(m));
    Vector r = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
    return es.eigenvectors() * r.asDiagonal() * es.eigenvectors().transpose();
}

}  // namespace

GaussianSpec GaussianSpec::from_ground(MeshPtr mesh, Vector mean, const GroundKernel& k0) {
    if (!mesh) throw std::invalid_argument("gaussian spec needs a mesh");
    return from_covariance(mesh, std::move(mean), k0.gram(*mesh));
}

GaussianSpec GaussianSpec::from_covariance(MeshPtr mesh, Vector mean, Matrix covariance,
                                           double jitter) {
    if (!mesh) throw std::invalid_argument("gaussian spec needs a mesh");
    if (mean.size() != mesh->size()) throw std::invalid_argument("mean length does not match mesh");
    if (covariance.rows() != mesh->size() || covariance.cols() != mesh->size())
        throw std::invalid_argument("covariance shape does not match mesh");
    require_symmetric_psd(covariance, "covariance");
    GaussianSpec spec;
    spec.mesh = std::move(mesh);
    spec.mean = std::move(mean);
    spec.covariance = std::move(covariance);
    if (jitter < 0.0) {
        const double tr = spec.covariance.trace();
        spec.jitter = 1e-10 * (tr > 0.0 ? tr / static_cast<double>(spec.covariance.rows()) : 1.0);
    } else {
        spec.jitter = jitter;
    }
    return spec;
}

FunctionSet sample_gp(const GaussianSpec& spec, int n, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_gp needs n >= 1");
    const Index dim = spec.mesh->size();

    Matrix chol;
    double j = spec.jitter;
    bool ok = false;
    for (int attempt = 0; attempt < 4; ++attempt) {
        Eigen::LLT<Matrix> llt(spec.covariance + j * Matrix::Identity(dim, dim));
        if (llt.info() == Eigen::Success) {
            chol = llt.matrixL();
            ok = true;
            break;
        }
        j *= 10.0;
    }
    if (!ok) throw NumericalFailure("covariance factorization failed after jitter escalation");

    Rng rng(seed);
    Matrix values(dim, n);
    Vector eta(dim);
    for (int c = 0; c < n; ++c) {
        for (Index i = 0; i < dim; ++i) eta[i] = rng.normal();
        values.col(c) = spec.mean + chol * eta;
    }
    return FunctionSet(spec.mesh, std::move(values));
}

Matrix quad_symmetrise(const Matrix& pointwise, const Mesh& mesh) {
    const Vector& sw = mesh.sqrt_weights();
    return sw.asDiagonal() * pointwise * sw.asDiagonal();
}

Vector quad_coords(const Vector& values, const Mesh& mesh) {
    return mesh.sqrt_weights().asDiagonal() * values;
}

Matrix feature_operator(const FeatureMap& T, const Mesh& mesh, double bandwidth) {
    if (!(bandwidth > 0.0)) throw std::invalid_argument("bandwidth must be positive");
    const Index n = mesh.size();
    switch (T.kind()) {
        case FeatureMap::Kind::Identity:
            return Matrix::Identity(n, n) / bandwidth;
        case FeatureMap::Kind::Spectral:
        case FeatureMap::Kind::Fpca: {
            const Matrix e_tilde = mesh.sqrt_weights().asDiagonal() * T.eigenfunctions();
            return symmetrized(e_tilde * T.eigenvalues().cwiseSqrt().asDiagonal() *
                               e_tilde.transpose()) /
                   bandwidth;
        }
        case FeatureMap::Kind::IntegralOp: {
            const Matrix m = mesh.sqrt_weights().asDiagonal() * T.action() *
                             mesh.sqrt_weights().cwiseInverse().asDiagonal();
            return symmetrized(m) / bandwidth;
        }
        case FeatureMap::Kind::Square:
            throw std::invalid_argument("the squaring map has no linear operator form");
    }
    throw std::logic_error("unreachable");
}

OperatorTriple make_operator_triple(Matrix T, Matrix S, Matrix R) {
    require_symmetric_psd(T, "T");
    require_symmetric_psd(S, "S");
    require_symmetric_psd(R, "R");
    OperatorTriple ops;
    ops.commuting = commute(T, S) && commute(S, R) && commute(T, R);
    ops.T = std::move(T);
    ops.S = std::move(S);
    ops.R = std::move(R);
    return ops;
}

double mean_embedding(const Matrix& T, const Matrix& S, const Vector& a, const Vector& x) {
    require_symmetric_psd(T, "T");
    require_symmetric_psd(S, "S");
    const Matrix tst = symmetrized(T * S * T);
    const Vector d = T * (x - a);
    Eigen::SelfAdjointEigenSolver<Matrix> es(tst);
    const Vector u = es.eigenvectors().transpose() * d;
    double logdet = 0.0, q = 0.0;
    for (Index i = 0; i < u.size(); ++i) {
        const double lam = std::max(es.eigenvalues()[i], 0.0);
        logdet += std::log1p(lam);
        q += u[i] * u[i] / (1.0 + lam);
    }
    return std::exp(-0.5 * logdet - 0.5 * q);
}

double closed_form_mmd_commuting(const Matrix& T, const Matrix& S, const Matrix& R, const Vector& a,
                                 const Vector& b) {
    const Matrix tst = symmetrized(T * S * T);
    const Matrix trt = symmetrized(T * R * T);
    const Matrix tsrt = symmetrized(T * (S + R) * T);
    const Vector d = T * (a - b);
    const double q = quad_form_inv(tsrt, d);
    return std::exp(-0.5 * logdet_I_plus(2.0 * tst)) + std::exp(-0.5 * logdet_I_plus(2.0 * trt)) -
           2.0 * std::exp(-0.5 * logdet_I_plus(tsrt) - 0.5 * q);
}

double closed_form_mmd_general(const Matrix& T, const Matrix& S, const Matrix& R, const Vector& a,
                               const Vector& b) {
    const Index n = T.rows();
    const Matrix tst = symmetrized(T * S * T);
    const Matrix trt = symmetrized(T * R * T);
    const Matrix tsrt = symmetrized(T * (S + R) * T);
    const Vector d = T * (a - b);
    const double q = quad_form_inv(tsrt, d);

    // det((I+TST)(I + (TRT)^{1/2}(I+TST)^{-1}(TRT)^{1/2}))
    const Matrix root = sqrt_psd(trt);
    const Matrix m1 = Matrix::Identity(n, n) + tst;
    const Matrix inner = symmetrized(root * m1.ldlt().solve(root));
    const double log_cross = logdet_I_plus(tst) + logdet_I_plus(inner);

    return std::exp(-0.5 * logdet_I_plus(2.0 * tst)) + std::exp(-0.5 * logdet_I_plus(2.0 * trt)) -
           2.0 * std::exp(-0.5 * log_cross - 0.5 * q);
}

double closed_form_mmd(const OperatorTriple& ops, const Vector& a, const Vector& b) {
    return ops.commuting ? closed_form_mmd_commuting(ops.T, ops.S, ops.R, a, b)
                         : closed_form_mmd_general(ops.T, ops.S, ops.R, a, b);
}

std::pair<double, double> xi_mean_shift(const Matrix& T, const Matrix& S, const Vector& m) {
    require_symmetric_psd(T, "T");
    require_symmetric_psd(S, "S");
    if (!commute(T, S)) throw InvalidOperator("xi_mean_shift requires commuting T and S");

    // every term is a function of A = TST and the vector Tm, so one
    // eigendecomposition covers all determinants and quadratic forms
    Eigen::SelfAdjointEigenSolver<Matrix> es(symmetrized(T * S * T));
    const Vector lam = es.eigenvalues().cwiseMax(0.0);
    const Vector u = es.eigenvectors().transpose() * (T * m);

    double q2 = 0.0, q3 = 0.0, q4 = 0.0, qs = 0.0;
    double ld2 = 0.0, ld4 = 0.0, ld_sigma = 0.0;
    for (Index i = 0; i < lam.size(); ++i) {
        const double l = lam[i], uu = u[i] * u[i];
        q2 += uu / (1.0 + 2.0 * l);
        q3 += uu / (1.0 + 3.0 * l);
        q4 += uu / (1.0 + 4.0 * l);
        qs += uu * (1.0 + 2.0 * l) / ((1.0 + l) * (1.0 + 3.0 * l));
        ld2 += std::log1p(2.0 * l);
        ld4 += std::log1p(4.0 * l);
        ld_sigma += std::log1p(l) + std::log1p(3.0 * l);
    }
    const double det_sigma = std::exp(-0.5 * ld_sigma);  // det((I+A)(I+3A))^{-1/2}
    const double det2_inv = std::exp(-ld2);              // det(I+2A)^{-1}
    const double det4 = std::exp(-0.5 * ld4);            // det(I+4A)^{-1/2}

    const double xi1 = 2.0 * det_sigma * (1.0 + std::exp(-q3) - 2.0 * std::exp(-0.5 * qs)) -
                       2.0 * det2_inv * (1.0 + std::exp(-q2) - 2.0 * std::exp(-0.5 * q2));
    const double xi2 = 2.0 * det4 * (1.0 + std::exp(-q4)) -
                       2.0 * det2_inv * (1.0 + std::exp(-q2) - 4.0 * std::exp(-0.5 * q2)) -
                       8.0 * det_sigma * std::exp(-0.5 * qs);
    return {std::max(xi1, 0.0), std::max(xi2, 0.0)};
}

namespace {

struct PairTerms {
    double alpha;
    double beta;
};

// one (S, R) ordering of the variance decomposition; the full xi values sum
// this with the roles of S and R swapped
PairTerms xi_pair_terms(const Matrix& T, const Matrix& S, const Matrix& R, const Vector& d) {
    const Index n = T.rows();
    const Matrix I = Matrix::Identity(n, n);
    const Matrix a_s = symmetrized(T * S * T);
    const Matrix a_r = symmetrized(T * R * T);
    const Matrix a_sr = symmetrized(T * (S + R) * T);
    const Matrix a_2sr = symmetrized(T * (2.0 * S + R) * T);
    // (I+TST)(I+TRT) + TST(2I + T(S+R)T)
    const Matrix sigma = symmetrized((I + a_s) * (I + a_r) + a_s * (2.0 * I + a_sr));

    const double ld_s = logdet_I_plus(a_s);
    const double ld_3s = logdet_I_plus(3.0 * a_s);
    const double ld_2s = logdet_I_plus(2.0 * a_s);
    const double ld_4s = logdet_I_plus(4.0 * a_s);
    const double ld_r = logdet_I_plus(a_r);
    const double ld_sr = logdet_I_plus(a_sr);
    const double ld_2sr = logdet_I_plus(2.0 * a_sr);
    const double ld_2xsr = logdet_I_plus(a_2sr);
    const double ld_sigma = logdet_I_plus(sigma - I);

    const double q_sr = quad_form_inv(a_sr, d);
    const double q_2sr = quad_form_inv(2.0 * a_sr, d);
    const double q_2xsr = quad_form_inv(a_2sr, d);
    // <(I + 2 TST) Sigma^{-1} d, d>
    const Vector z = sigma.ldlt().solve(d);
    const double q_sigma = d.dot(z) + 2.0 * d.dot(a_s * z);

    PairTerms out;
    out.alpha = std::exp(-0.5 * (ld_s + ld_3s)) - std::exp(-ld_2s) +
                std::exp(-0.5 * (ld_r + ld_2xsr)) * std::exp(-q_2xsr) -
                std::exp(-ld_sr) * std::exp(-q_sr) -
                2.0 * std::exp(-0.5 * ld_sigma) * std::exp(-0.5 * q_sigma) +
                2.0 * std::exp(-0.5 * (ld_2s + ld_sr)) * std::exp(-0.5 * q_sr);
    out.beta = std::exp(-0.5 * ld_4s) - std::exp(-ld_2s) +
               std::exp(-0.5 * ld_2sr) * std::exp(-q_2sr) - std::exp(-ld_sr) * std::exp(-q_sr) +
               4.0 * std::exp(-0.5 * (ld_sr + ld_2s)) * std::exp(-0.5 * q_sr) -
               4.0 * std::exp(-0.5 * ld_sigma) * std::exp(-0.5 * q_sigma);
    return out;
}

}  // namespace

std::pair<double, double> xi_general(const OperatorTriple& ops, const Vector& a, const Vector& b) {
    if (!ops.commuting) throw InvalidOperator("xi_general requires a commuting operator triple");
    const Vector d = ops.T * (a - b);
    const PairTerms sr = xi_pair_terms(ops.T, ops.S, ops.R, d);
    const PairTerms rs = xi_pair_terms(ops.T, ops.R, ops.S, d);
    return {std::max(sr.alpha + rs.alpha, 0.0), std::max(sr.beta + rs.beta, 0.0)};
}

double snr_ratio(const OperatorTriple& ops, const Vector& a, const Vector& b) {
    const double mmd = closed_form_mmd(ops, a, b);
    const auto [xi1, xi2] = xi_general(ops, a, b);
    (void)xi1;
    if (xi2 <= 1e-14) throw DegenerateSnr("variance term vanished; ratio undefined");
    return mmd / std::sqrt(xi2);
}

double scaling_rhs(ScalingCase scaling_case, const FunctionSample& m, const GroundKernel& k0,
                   int N) {
    const double m_sq = sq_norm(m);
    if (scaling_case == ScalingCase::WhiteNoise) {
        if (N < 1) throw std::invalid_argument("N must be positive");
        return std::sqrt(static_cast<double>(N)) * m_sq / (2.0 * std::sqrt(1.0 + m_sq));
    }
    const Matrix B = k0.covariance_operator(*m.mesh).symmetric;
    const double hs_sq = B.squaredNorm();
    const Vector mq = quad_coords(m.values, *m.mesh);
    const double cm = mq.dot(B * mq);
    return m_sq / (2.0 * std::sqrt(hs_sq + cm));
}

MedianLemmaResult median_lemma(const Vector& mu1, const Vector& mu2, const Matrix& S1,
                               const Matrix& S2) {
    if (mu1.size() != mu2.size() || S1.rows() != mu1.size() || S2.rows() != mu1.size())
        throw std::invalid_argument("median_lemma dimension mismatch");
    require_symmetric_psd(S1, "S1");
    require_symmetric_psd(S2, "S2");
    const double mu_sq = (mu1 - mu2).squaredNorm();
    const double expectation = (S1 + S2).trace() + mu_sq;
    MedianLemmaResult out;
    out.expectation = expectation;
    if (expectation <= 0.0) {
        out.bound = 0.0;
        return out;
    }
    const double ratio = (mu_sq * mu_sq) / (expectation * expectation);
    out.bound = std::sqrt(2.0) * std::sqrt(std::max(0.0, 1.0 - ratio));
    return out;
}

}  // namespace fmmd
