#include "fmmd/ground_kernel.hpp"

#include <cmath>

namespace fmmd {

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kSqrt3 = 1.7320508075688772935274463415058724;
}  // namespace

GroundKernel GroundKernel::squared_exponential(double lengthscale) {
    if (!(lengthscale > 0.0)) throw std::invalid_argument("lengthscale must be positive");
    return {Kind::SquaredExponential, lengthscale, 0, 1.0};
}

GroundKernel GroundKernel::matern15(double lengthscale) {
    if (!(lengthscale > 0.0)) throw std::invalid_argument("lengthscale must be positive");
    return {Kind::Matern15, lengthscale, 0, 1.0};
}

GroundKernel GroundKernel::cosine(int n_freq, double domain_length) {
    if (n_freq < 1) throw std::invalid_argument("n_freq must be a positive integer");
    if (!(domain_length > 0.0)) throw std::invalid_argument("domain_length must be positive");
    return {Kind::Cosine, 0.0, n_freq, domain_length};
}

GroundKernel GroundKernel::cosine_exponential(int n_freq, double lengthscale, double domain_length) {
    if (n_freq < 1) throw std::invalid_argument("n_freq must be a positive integer");
    if (!(lengthscale > 0.0)) throw std::invalid_argument("lengthscale must be positive");
    if (!(domain_length > 0.0)) throw std::invalid_argument("domain_length must be positive");
    return {Kind::CosineExponential, lengthscale, n_freq, domain_length};
}

GroundKernel GroundKernel::dirac() { return {Kind::Dirac, 0.0, 0, 1.0}; }

double GroundKernel::operator()(double s, double t) const {
    switch (kind_) {
        case Kind::SquaredExponential: {
            const double d = s - t;
            return std::exp(-d * d / (2.0 * lengthscale_ * lengthscale_));
        }
        case Kind::Matern15: {
            const double r = kSqrt3 * std::abs(s - t) / lengthscale_;
            return (1.0 + r) * std::exp(-r);
        }
        case Kind::Cosine: {
            const double u = (s - t) / domain_length_;
            double acc = 0.0;
            for (int n = 0; n < n_freq_; ++n) acc += std::cos(2.0 * kPi * n * u);
            return acc;
        }
        case Kind::CosineExponential: {
            const double u = (s - t) / domain_length_;
            double acc = 0.0;
            for (int n = 0; n < n_freq_; ++n) acc += std::cos(2.0 * kPi * n * u);
            return std::exp(-u * u / (2.0 * lengthscale_ * lengthscale_)) * acc;
        }
        case Kind::Dirac:
            return s == t ? 1.0 : 0.0;
    }
    return 0.0;
}

Matrix GroundKernel::gram(const Mesh& mesh) const {
    const Index n = mesh.size();
    if (kind_ == Kind::Dirac) return Matrix::Identity(n, n);
    Matrix K(n, n);
    const Vector& t = mesh.points();
    for (Index j = 0; j < n; ++j) {
        K(j, j) = (*this)(t[j], t[j]);
        for (Index i = j + 1; i < n; ++i) {
            const double v = (*this)(t[i], t[j]);
            K(i, j) = v;
            K(j, i) = v;
        }
    }
    return K;
}

GroundKernel::OperatorMatrices GroundKernel::covariance_operator(const Mesh& mesh) const {
    const Matrix K = gram(mesh);
    const Vector& w = mesh.weights();
    const Vector& sw = mesh.sqrt_weights();
    OperatorMatrices out;
    out.action = K * w.asDiagonal();
    out.symmetric = sw.asDiagonal() * K * sw.asDiagonal();
    return out;
}

}  // namespace fmmd
