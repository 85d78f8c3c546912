#pragma once

#include "fmmd/mesh.hpp"

namespace fmmd {

/// Scalar kernel k0 on the 1-D domain. These back covariance operators,
/// Gaussian process laws and interpolants.
///
/// Cosine frequencies count cycles over the domain; for an interval of
/// length L the difference s - t is rescaled by 1/L before the cosine (and,
/// for the cosine-exponential, the squared-exponential) factor, so the kernel
/// on [0, L] matches the unit-interval kernel under rescaling.
class GroundKernel {
public:
    enum class Kind { SquaredExponential, Matern15, Cosine, CosineExponential, Dirac };

    static GroundKernel squared_exponential(double lengthscale);
    /// Matern with smoothness 3/2: (1 + sqrt(3)|d|/l) exp(-sqrt(3)|d|/l).
    static GroundKernel matern15(double lengthscale);
    /// sum_{n=0}^{F-1} cos(2 pi n (s-t)/L)
    static GroundKernel cosine(int n_freq, double domain_length = 1.0);
    /// squared-exponential envelope times the cosine sum
    static GroundKernel cosine_exponential(int n_freq, double lengthscale, double domain_length = 1.0);
    /// white noise: 1 if s == t else 0
    static GroundKernel dirac();

    double operator()(double s, double t) const;

    Kind kind() const { return kind_; }
    double lengthscale() const { return lengthscale_; }
    int n_freq() const { return n_freq_; }

    /// K[i][j] = k0(t_i, t_j); symmetric, PSD up to round-off.
    Matrix gram(const Mesh& mesh) const;

    /// Finite-mesh representation of the integral operator f -> int k0(s,.)f(s)ds.
    /// `action` = K W acts on value vectors; `symmetric` = W^{1/2} K W^{1/2} is
    /// similar to it, so its eigenvalues approximate the operator spectrum and
    /// its trace approximates the operator trace.
    struct OperatorMatrices {
        Matrix action;
        Matrix symmetric;
    };
    OperatorMatrices covariance_operator(const Mesh& mesh) const;

private:
    GroundKernel(Kind kind, double lengthscale, int n_freq, double domain_length)
        : kind_(kind), lengthscale_(lengthscale), n_freq_(n_freq), domain_length_(domain_length) {}

    Kind kind_;
    double lengthscale_;
    int n_freq_;
    double domain_length_;
};

}  // namespace fmmd
