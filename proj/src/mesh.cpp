#include "fmmd/mesh.hpp"

#include <cmath>

namespace fmmd {

namespace {

void check_points(const Vector& points) {
    if (points.size() < 1) throw std::invalid_argument("mesh needs at least one point");
    for (Index i = 0; i < points.size(); ++i) {
        if (!std::isfinite(points[i])) throw std::invalid_argument("mesh points must be finite");
        if (i > 0 && points[i] <= points[i - 1])
            throw std::invalid_argument("mesh points must be strictly increasing");
    }
}

}  // namespace

Mesh::Mesh(Vector points, Vector weights, double t_min, double t_max)
    : points_(std::move(points)),
      weights_(std::move(weights)),
      sqrt_weights_(weights_.array().sqrt()),
      t_min_(t_min),
      t_max_(t_max) {}

std::shared_ptr<const Mesh> Mesh::uniform(Index n_points, double t_min, double t_max) {
    if (n_points < 2) throw std::invalid_argument("uniform mesh needs at least 2 points");
    if (!(t_min < t_max)) throw std::invalid_argument("degenerate interval");
    Vector pts = Vector::LinSpaced(n_points, t_min, t_max);
    Vector w = Vector::Constant(n_points, (t_max - t_min) / static_cast<double>(n_points));
    return std::shared_ptr<const Mesh>(new Mesh(std::move(pts), std::move(w), t_min, t_max));
}

std::shared_ptr<const Mesh> Mesh::from_points(Vector points) {
    check_points(points);
    const Index n = points.size();
    Vector w(n);
    if (n == 1) {
        w[0] = 1.0;
    } else {
        const double span = points[n - 1] - points[0];
        const double h = span / static_cast<double>(n - 1);
        bool uniform = true;
        for (Index i = 1; i < n && uniform; ++i)
            uniform = std::abs(points[i] - points[i - 1] - h) <= 1e-9 * span;
        if (uniform) {
            w.setConstant(span / static_cast<double>(n));
        } else {
            w[0] = 0.5 * (points[1] - points[0]);
            for (Index i = 1; i + 1 < n; ++i) w[i] = 0.5 * (points[i + 1] - points[i - 1]);
            w[n - 1] = 0.5 * (points[n - 1] - points[n - 2]);
        }
    }
    const double a = points[0], b = points[n - 1];
    return std::shared_ptr<const Mesh>(new Mesh(std::move(points), std::move(w), a, b));
}

bool same_mesh(const Mesh& a, const Mesh& b) {
    if (&a == &b) return true;
    return a.size() == b.size() && a.points() == b.points() && a.weights() == b.weights();
}

FunctionSample::FunctionSample(MeshPtr m, Vector v) : mesh(std::move(m)), values(std::move(v)) {
    if (!mesh) throw std::invalid_argument("sample needs a mesh");
    if (values.size() != mesh->size())
        throw std::invalid_argument("sample length does not match mesh size");
    if (!values.allFinite()) throw std::invalid_argument("sample values must be finite");
}

FunctionSet::FunctionSet(MeshPtr mesh, Matrix values) : mesh_(std::move(mesh)), values_(std::move(values)) {
    if (!mesh_) throw std::invalid_argument("function set needs a mesh");
    if (values_.rows() != mesh_->size())
        throw std::invalid_argument("function set rows do not match mesh size");
    if (!values_.allFinite()) throw std::invalid_argument("function set values must be finite");
}

double inner_product(const FunctionSample& x, const FunctionSample& y) {
    require_same_mesh(*x.mesh, *y.mesh, "inner_product");
    return (x.values.array() * y.values.array() * x.mesh->weights().array()).sum();
}

double sq_norm(const FunctionSample& x) {
    return (x.values.array().square() * x.mesh->weights().array()).sum();
}

double sq_distance(const FunctionSample& x, const FunctionSample& y) {
    require_same_mesh(*x.mesh, *y.mesh, "sq_distance");
    return ((x.values - y.values).array().square() * x.mesh->weights().array()).sum();
}

}  // namespace fmmd
