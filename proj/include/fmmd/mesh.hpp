#pragma once

#include <Eigen/Dense>
#include <memory>
#include <utility>

#include "fmmd/errors.hpp"

namespace fmmd {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Ordered sample locations on a 1-D interval with quadrature weights.
///
/// The weights turn sums over mesh values into integrals: sum_i w_i f(t_i)
/// approximates the integral of f over the interval, so inner products of
/// discretised functions are stable under mesh refinement. Uniform meshes use
/// the equal weight (t_max - t_min)/N; arbitrary strictly increasing point
/// sets get trapezoid weights.
class Mesh {
public:
    /// n_points >= 2 evenly spaced points covering [t_min, t_max].
    static std::shared_ptr<const Mesh> uniform(Index n_points, double t_min, double t_max);

    /// Mesh through the given strictly increasing points. Evenly spaced
    /// points (within 1e-9 of the span) get the uniform weight rule,
    /// anything else trapezoid weights. A single point is allowed (weight 1)
    /// for scalar problems.
    static std::shared_ptr<const Mesh> from_points(Vector points);

    Index size() const { return points_.size(); }
    const Vector& points() const { return points_; }
    const Vector& weights() const { return weights_; }
    const Vector& sqrt_weights() const { return sqrt_weights_; }
    double t_min() const { return t_min_; }
    double t_max() const { return t_max_; }
    double length() const { return t_max_ - t_min_; }

private:
    Mesh(Vector points, Vector weights, double t_min, double t_max);

    Vector points_;
    Vector weights_;
    Vector sqrt_weights_;
    double t_min_;
    double t_max_;
};

using MeshPtr = std::shared_ptr<const Mesh>;

bool same_mesh(const Mesh& a, const Mesh& b);

inline void require_same_mesh(const Mesh& a, const Mesh& b, const char* where) {
    if (!same_mesh(a, b)) throw IncompatibleMesh(std::string(where) + ": samples live on different meshes");
}

/// Discretised function: one value per mesh point.
struct FunctionSample {
    MeshPtr mesh;
    Vector values;

    FunctionSample() = default;
    FunctionSample(MeshPtr m, Vector v);
};

/// Collection of samples sharing one mesh; one column per sample.
class FunctionSet {
public:
    FunctionSet(MeshPtr mesh, Matrix values);

    const MeshPtr& mesh() const { return mesh_; }
    Index size() const { return values_.cols(); }
    const Matrix& values() const { return values_; }
    Matrix& values() { return values_; }
    FunctionSample sample(Index i) const { return {mesh_, values_.col(i)}; }

private:
    MeshPtr mesh_;
    Matrix values_;
};

/// Quadrature-weighted L^2 inner product: sum_i w_i x_i y_i.
double inner_product(const FunctionSample& x, const FunctionSample& y);

double sq_norm(const FunctionSample& x);

/// ||x - y||^2 in the quadrature metric; zero iff the value vectors agree.
double sq_distance(const FunctionSample& x, const FunctionSample& y);

}  // namespace fmmd
