#include "rcsbf/geometry.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace rcsbf {

namespace {

constexpr double kAntipodalGuard = 1e-8;   // angle margin below pi
constexpr double kBaseTol = 1e-9;
constexpr double kTinyAngle = 1e-6;        // switch to series for sinc-type factors

double sinc(double t) {
    if (std::abs(t) < kTinyAngle) {
        const double t2 = t * t;
        return 1.0 - t2 / 6.0 + t2 * t2 / 120.0;
    }
    return std::sin(t) / t;
}

double sinhc(double t) {
    if (std::abs(t) < kTinyAngle) {
        const double t2 = t * t;
        return 1.0 + t2 / 6.0 + t2 * t2 / 120.0;
    }
    return std::sinh(t) / t;
}

double minkowski(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    double s = -a[0] * b[0];
    for (Eigen::Index k = 1; k < a.size(); ++k) s += a[k] * b[k];
    return s;
}

// Angle between unit vectors, accurate near both 0 and pi.
double unit_angle(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    if (a.dot(b) >= 0.0) {
        return 2.0 * std::asin(std::min(1.0, 0.5 * (a - b).norm()));
    }
    return M_PI - 2.0 * std::asin(std::min(1.0, 0.5 * (a + b).norm()));
}

}  // namespace

GeometryBackend GeometryBackend::euclidean(int dim) {
    if (dim < 1) throw ParamError("GeometryBackend: dimension must be >= 1");
    return GeometryBackend(Kind::Euclidean, dim, 0.0);
}

GeometryBackend GeometryBackend::sphere(int dim, double radius) {
    if (dim < 1) throw ParamError("GeometryBackend: dimension must be >= 1");
    if (!(radius > 0.0)) throw ParamError("GeometryBackend: radius must be positive");
    return GeometryBackend(Kind::Sphere, dim, radius);
}

GeometryBackend GeometryBackend::hyperbolic(int dim, double radius) {
    if (dim < 1) throw ParamError("GeometryBackend: dimension must be >= 1");
    if (!(radius > 0.0)) throw ParamError("GeometryBackend: radius must be positive");
    return GeometryBackend(Kind::Hyperbolic, dim, radius);
}

double GeometryBackend::injectivity_radius() const {
    if (kind_ == Kind::Sphere) return M_PI * radius_;
    return std::numeric_limits<double>::infinity();
}

double GeometryBackend::pairing(const Eigen::VectorXd& a, const Eigen::VectorXd& b) const {
    if (kind_ == Kind::Hyperbolic) return minkowski(a, b);
    return a.dot(b);
}

void GeometryBackend::check_point(const ManifoldPoint& x, const char* what) const {
    if (x.ambient.size() != ambient_dim()) {
        throw DomainError(std::string(what) + ": ambient dimension mismatch");
    }
}

void GeometryBackend::check_base(const ManifoldPoint& x, const TangentVector& u,
                                 const char* what) const {
    if (u.base.size() != x.ambient.size() ||
        (u.base - x.ambient).lpNorm<Eigen::Infinity>() > kBaseTol * (1.0 + x.ambient.norm())) {
        throw BaseMismatchError(std::string(what) + ": tangent vector not based at x");
    }
}

double GeometryBackend::metric_inner(const ManifoldPoint& x, const TangentVector& u,
                                     const TangentVector& v) const {
    check_point(x, "metric_inner");
    check_base(x, u, "metric_inner");
    check_base(x, v, "metric_inner");
    return pairing(u.ambient, v.ambient);
}

double GeometryBackend::norm(const ManifoldPoint& x, const TangentVector& u) const {
    return std::sqrt(std::max(0.0, metric_inner(x, u, u)));
}

double GeometryBackend::geodesic_distance(const ManifoldPoint& x, const ManifoldPoint& y) const {
    check_point(x, "geodesic_distance");
    check_point(y, "geodesic_distance");
    switch (kind_) {
        case Kind::Euclidean:
            return (y.ambient - x.ambient).norm();
        case Kind::Sphere: {
            const double theta = unit_angle(x.ambient / radius_, y.ambient / radius_);
            if (theta > M_PI - kAntipodalGuard) {
                throw AntipodalError("geodesic_distance: antipodal points on the sphere");
            }
            return radius_ * theta;
        }
        case Kind::Hyperbolic: {
            // cosh(d/rho) = 1 + q/(2 rho^2) with q = <x-y, x-y>_M >= 0;
            // the difference form avoids cancellation for close points.
            const double q = std::max(0.0, minkowski(x.ambient - y.ambient, x.ambient - y.ambient));
            const double e = q / (2.0 * radius_ * radius_);
            return radius_ * std::log1p(e + std::sqrt(e * (e + 2.0)));
        }
    }
    return 0.0;
}

ManifoldPoint GeometryBackend::exp_map(const ManifoldPoint& x, const TangentVector& u) const {
    check_point(x, "exp_map");
    check_base(x, u, "exp_map");
    switch (kind_) {
        case Kind::Euclidean:
            return {x.ambient + u.ambient};
        case Kind::Sphere: {
            const double theta = u.ambient.norm() / radius_;
            if (theta == 0.0) return x;
            Eigen::VectorXd p = std::cos(theta) * x.ambient + sinc(theta) * u.ambient;
            return project_point(p);
        }
        case Kind::Hyperbolic: {
            const double theta =
                std::sqrt(std::max(0.0, minkowski(u.ambient, u.ambient))) / radius_;
            if (theta == 0.0) return x;
            Eigen::VectorXd p = std::cosh(theta) * x.ambient + sinhc(theta) * u.ambient;
            return project_point(p);
        }
    }
    return x;
}

TangentVector GeometryBackend::log_map(const ManifoldPoint& x, const ManifoldPoint& y) const {
    check_point(x, "log_map");
    check_point(y, "log_map");
    switch (kind_) {
        case Kind::Euclidean:
            return {x.ambient, y.ambient - x.ambient};
        case Kind::Sphere: {
            const double theta = unit_angle(x.ambient / radius_, y.ambient / radius_);
            if (theta > M_PI - kAntipodalGuard) {
                throw AntipodalError("log_map: antipodal points on the sphere");
            }
            const double rho2 = radius_ * radius_;
            Eigen::VectorXd proj = y.ambient - (x.ambient.dot(y.ambient) / rho2) * x.ambient;
            const double n = proj.norm();  // rho sin(theta)
            if (n == 0.0) return {x.ambient, Eigen::VectorXd::Zero(ambient_dim())};
            return {x.ambient, (radius_ * theta / n) * proj};
        }
        case Kind::Hyperbolic: {
            const double d = geodesic_distance(x, y);
            const double rho2 = radius_ * radius_;
            const double beta = -minkowski(x.ambient, y.ambient) / rho2;  // cosh(theta)
            Eigen::VectorXd proj = y.ambient - beta * x.ambient;
            const double n = std::sqrt(std::max(0.0, minkowski(proj, proj)));  // rho sinh(theta)
            if (n == 0.0) return {x.ambient, Eigen::VectorXd::Zero(ambient_dim())};
            return {x.ambient, (d / n) * proj};
        }
    }
    return {x.ambient, Eigen::VectorXd::Zero(ambient_dim())};
}

TangentVector GeometryBackend::parallel_transport(const ManifoldPoint& x, const ManifoldPoint& y,
                                                  const TangentVector& u) const {
    check_point(x, "parallel_transport");
    check_point(y, "parallel_transport");
    check_base(x, u, "parallel_transport");
    switch (kind_) {
        case Kind::Euclidean:
            return {y.ambient, u.ambient};
        case Kind::Sphere: {
            const Eigen::VectorXd a = x.ambient / radius_;
            const Eigen::VectorXd b = y.ambient / radius_;
            const double denom = 1.0 + a.dot(b);
            if (denom < kAntipodalGuard) {
                throw AntipodalError("parallel_transport: antipodal points on the sphere");
            }
            Eigen::VectorXd out = u.ambient - (b.dot(u.ambient) / denom) * (a + b);
            return {y.ambient, out};
        }
        case Kind::Hyperbolic: {
            const Eigen::VectorXd a = x.ambient / radius_;
            const Eigen::VectorXd b = y.ambient / radius_;
            const double denom = 1.0 - minkowski(a, b);  // 1 + cosh(theta) >= 2
            Eigen::VectorXd out = u.ambient + (minkowski(b, u.ambient) / denom) * (a + b);
            return {y.ambient, out};
        }
    }
    return {y.ambient, u.ambient};
}

ManifoldPoint GeometryBackend::project_point(const Eigen::VectorXd& ambient) const {
    if (ambient.size() != ambient_dim()) {
        throw DomainError("project_point: ambient dimension mismatch");
    }
    switch (kind_) {
        case Kind::Euclidean:
            return {ambient};
        case Kind::Sphere: {
            const double n = ambient.norm();
            if (!(std::abs(n - radius_) < 0.1 * radius_)) {
                throw ProjectionError("project_point: point too far from the sphere");
            }
            return {(radius_ / n) * ambient};
        }
        case Kind::Hyperbolic: {
            const double q = -minkowski(ambient, ambient);
            const double n = q > 0.0 ? std::sqrt(q) : 0.0;
            if (!(std::abs(n - radius_) < 0.1 * radius_) || ambient[0] <= 0.0) {
                throw ProjectionError("project_point: point too far from the hyperboloid sheet");
            }
            return {(radius_ / n) * ambient};
        }
    }
    return {ambient};
}

TangentVector GeometryBackend::project_tangent(const ManifoldPoint& x,
                                               const Eigen::VectorXd& ambient) const {
    check_point(x, "project_tangent");
    if (ambient.size() != ambient_dim()) {
        throw DomainError("project_tangent: ambient dimension mismatch");
    }
    const double rho2 = radius_ * radius_;
    switch (kind_) {
        case Kind::Euclidean:
            return {x.ambient, ambient};
        case Kind::Sphere:
            return {x.ambient, ambient - (x.ambient.dot(ambient) / rho2) * x.ambient};
        case Kind::Hyperbolic:
            return {x.ambient, ambient + (minkowski(x.ambient, ambient) / rho2) * x.ambient};
    }
    return {x.ambient, ambient};
}

Eigen::VectorXd GeometryBackend::curvature_correction(const ManifoldPoint& x,
                                                      const Eigen::VectorXd& u,
                                                      const Eigen::VectorXd& w) const {
    const double rho2 = radius_ * radius_;
    switch (kind_) {
        case Kind::Euclidean:
            return Eigen::VectorXd::Zero(dim_);
        case Kind::Sphere:
            return -(u.dot(w) / rho2) * x.ambient;
        case Kind::Hyperbolic:
            return (minkowski(u, w) / rho2) * x.ambient;
    }
    return Eigen::VectorXd::Zero(ambient_dim());
}

double GeometryBackend::embedding_residual(const Eigen::VectorXd& ambient) const {
    switch (kind_) {
        case Kind::Euclidean:
            return 0.0;
        case Kind::Sphere:
            return std::abs(ambient.norm() - radius_);
        case Kind::Hyperbolic: {
            const double q = -minkowski(ambient, ambient);
            if (!(q > 0.0)) return std::numeric_limits<double>::infinity();
            return std::abs(std::sqrt(q) - radius_);
        }
    }
    return 0.0;
}

double GeometryBackend::tangency_residual(const ManifoldPoint& x,
                                          const Eigen::VectorXd& u) const {
    switch (kind_) {
        case Kind::Euclidean:
            return 0.0;
        case Kind::Sphere:
            return std::abs(x.ambient.dot(u)) / radius_;
        case Kind::Hyperbolic:
            return std::abs(minkowski(x.ambient, u)) / radius_;
    }
    return 0.0;
}

}  // namespace rcsbf
