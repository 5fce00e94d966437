#ifndef RCSBF_GEOMETRY_HPP
#define RCSBF_GEOMETRY_HPP

#include <Eigen/Dense>

#include "rcsbf/errors.hpp"

namespace rcsbf {

// Point on an embedded manifold, stored in ambient coordinates
// (R^d for Euclidean space, R^{d+1} for the sphere and the hyperboloid).
struct ManifoldPoint {
    Eigen::VectorXd ambient;
};

// Tangent vector together with its base point.
struct TangentVector {
    Eigen::VectorXd base;
    Eigen::VectorXd ambient;
};

// Riemannian backend with closed-form geodesic primitives. Immutable value,
// safe to share across threads.
//
//   Euclidean(d)          flat R^d
//   Sphere(d, rho)        round sphere of radius rho in R^{d+1}
//   Hyperbolic(d, rho)    hyperboloid sheet <x,x>_M = -rho^2, x0 > 0,
//                         with the Minkowski form -x0 y0 + sum_k xk yk
class GeometryBackend {
public:
    enum class Kind { Euclidean, Sphere, Hyperbolic };

    static GeometryBackend euclidean(int dim);
    static GeometryBackend sphere(int dim, double radius);
    static GeometryBackend hyperbolic(int dim, double radius);

    Kind kind() const { return kind_; }
    int dim() const { return dim_; }
    double radius() const { return radius_; }
    int ambient_dim() const { return kind_ == Kind::Euclidean ? dim_ : dim_ + 1; }

    // pi*rho on the sphere, +infinity otherwise.
    double injectivity_radius() const;

    // Riemannian inner product of two tangent vectors at x.
    double metric_inner(const ManifoldPoint& x, const TangentVector& u,
                        const TangentVector& v) const;
    double norm(const ManifoldPoint& x, const TangentVector& u) const;

    double geodesic_distance(const ManifoldPoint& x, const ManifoldPoint& y) const;

    // Endpoint of the geodesic with gamma(0) = x, gamma'(0) = u at time 1.
    ManifoldPoint exp_map(const ManifoldPoint& x, const TangentVector& u) const;

    // Inverse of exp within the injectivity radius; ||log_x y||_x = d(x, y).
    TangentVector log_map(const ManifoldPoint& x, const ManifoldPoint& y) const;

    // Parallel transport of u from T_x M to T_y M along the minimizing
    // geodesic. Metric-preserving; inverse of the reverse transport.
    TangentVector parallel_transport(const ManifoldPoint& x, const ManifoldPoint& y,
                                     const TangentVector& u) const;

    // Retraction of a near-manifold ambient point; idempotent.
    ManifoldPoint project_point(const Eigen::VectorXd& ambient) const;

    // Orthogonal (Minkowski-orthogonal on the hyperboloid) projection onto
    // the tangent space at x; idempotent.
    TangentVector project_tangent(const ManifoldPoint& x, const Eigen::VectorXd& ambient) const;

    // Normal component II(u, w) of the Gauss formula at x: the ambient time
    // derivative of a tangent field w along a curve with velocity u is the
    // covariant derivative plus this term. Zero on Euclidean space.
    Eigen::VectorXd curvature_correction(const ManifoldPoint& x, const Eigen::VectorXd& u,
                                         const Eigen::VectorXd& w) const;

    // |constraint residual| of an ambient point: | |p| - rho | for the
    // sphere, | sqrt(-<p,p>_M) - rho | for the hyperboloid, 0 on R^d.
    double embedding_residual(const Eigen::VectorXd& ambient) const;

    // |<x, u>| scaled pairing that must vanish for tangency.
    double tangency_residual(const ManifoldPoint& x, const Eigen::VectorXd& u) const;

    bool operator==(const GeometryBackend& o) const {
        return kind_ == o.kind_ && dim_ == o.dim_ && radius_ == o.radius_;
    }

private:
    GeometryBackend(Kind k, int d, double r) : kind_(k), dim_(d), radius_(r) {}

    // Ambient pairing: dot product, or the Minkowski form on the hyperboloid.
    double pairing(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const;
    void check_point(const ManifoldPoint& x, const char* what) const;
    void check_base(const ManifoldPoint& x, const TangentVector& u, const char* what) const;

    Kind kind_;
    int dim_;
    double radius_;
};

}  // namespace rcsbf

#endif  // RCSBF_GEOMETRY_HPP
