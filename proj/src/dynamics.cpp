#include "rcsbf/dynamics.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace rcsbf {

KernelSpec KernelSpec::cucker_smale(double beta) {
    if (!(beta >= 0.0)) throw ParamError("KernelSpec: beta must be >= 0");
    KernelSpec k;
    k.kind = Kind::CuckerSmale;
    k.beta = beta;
    return k;
}

KernelSpec KernelSpec::constant(double phi0) {
    if (!(phi0 >= 0.0)) throw ParamError("KernelSpec: phi0 must be >= 0");
    KernelSpec k;
    k.kind = Kind::Constant;
    k.phi0 = phi0;
    return k;
}

double kernel_eval(const KernelSpec& k, double r) {
    if (!(r >= 0.0)) throw DomainError("kernel_eval: r must be >= 0");
    switch (k.kind) {
        case KernelSpec::Kind::CuckerSmale:
            return std::pow(1.0 + r * r, -k.beta);
        case KernelSpec::Kind::Constant:
            return k.phi0;
    }
    return 0.0;
}

double kernel_min_on(const KernelSpec& k, double r_max) {
    if (!(r_max >= 0.0)) throw DomainError("kernel_min_on: r_max must be >= 0");
    switch (k.kind) {
        case KernelSpec::Kind::CuckerSmale:
            return kernel_eval(k, r_max);  // nonincreasing
        case KernelSpec::Kind::Constant:
            return k.phi0;
    }
    return 0.0;
}

TargetDistances::TargetDistances(Eigen::MatrixXd m) : m_(std::move(m)) {
    if (m_.size() == 0) return;
    if (m_.rows() != m_.cols()) throw ParamError("TargetDistances: matrix must be square");
    for (int i = 0; i < m_.rows(); ++i) {
        if (m_(i, i) != 0.0) throw ParamError("TargetDistances: diagonal must be zero");
        for (int j = 0; j < m_.cols(); ++j) {
            if (m_(i, j) < 0.0) throw ParamError("TargetDistances: entries must be >= 0");
            if (m_(i, j) != m_(j, i)) throw ParamError("TargetDistances: matrix must be symmetric");
        }
    }
}

double TargetDistances::min_offdiag() const {
    double v = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m_.rows(); ++i)
        for (int j = 0; j < m_.cols(); ++j)
            if (i != j) v = std::min(v, m_(i, j));
    return v;
}

double TargetDistances::max_offdiag() const {
    double v = 0.0;
    for (int i = 0; i < m_.rows(); ++i)
        for (int j = 0; j < m_.cols(); ++j)
            if (i != j) v = std::max(v, m_(i, j));
    return v;
}

void ModelParams::validate() const {
    if (N < 1) throw ParamError("ModelParams: N must be >= 1");
    if (d < 1) throw ParamError("ModelParams: d must be >= 1");
    if (kappa0 < 0.0 || kappa1 < 0.0 || kappa2 < 0.0) {
        throw ParamError("ModelParams: coupling strengths must be >= 0");
    }
    if (targets.size() != N) {
        throw ParamError("ModelParams: target matrix size inconsistent with N");
    }
}

Eigen::MatrixXd euclidean_velocities(const SystemState& s, const ModelParams& p, bool classical) {
    if (classical || p.c.is_infinite()) return s.w;
    Eigen::MatrixXd v(s.w.rows(), s.w.cols());
    for (int i = 0; i < s.w.rows(); ++i) {
        v.row(i) = to_velocity(s.w.row(i).transpose(), p.c).transpose();
    }
    return v;
}

Eigen::MatrixXd manifold_velocities(const GeometryBackend& b, const SystemState& s,
                                    const ModelParams& p) {
    Eigen::MatrixXd v(s.w.rows(), s.w.cols());
    for (int i = 0; i < s.w.rows(); ++i) {
        const ManifoldPoint xi{s.x.row(i).transpose()};
        const TangentVector wi{xi.ambient, s.w.row(i).transpose()};
        const double wn = b.norm(xi, wi);
        if (wn == 0.0 || p.c.is_infinite()) {
            v.row(i) = s.w.row(i);
        } else {
            const double speed = invert_momentum_norm(wn, p.c);
            v.row(i) = (speed / wn) * s.w.row(i);
        }
    }
    return v;
}

namespace {

// Shared assembly for the flat models: the caller supplies velocities.
Rhs flat_rhs(const SystemState& s, const ModelParams& p, const Eigen::MatrixXd& v) {
    const int n = s.particle_count();
    Rhs out;
    out.dx = v;
    out.dw = Eigen::MatrixXd::Zero(n, s.w.cols());
    const bool bonding = p.kappa1 + p.kappa2 > 0.0;

    for (int i = 0; i < n; ++i) {
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(s.w.cols());
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const Eigen::VectorXd xji = s.x.row(j) - s.x.row(i);
            const double r = xji.norm();
            const Eigen::VectorXd vji = v.row(j) - v.row(i);
            acc += (p.kappa0 / n) * kernel_eval(p.kernel, r) * vji;
            if (!bonding) continue;
            if (r <= kCollisionEps) {
                throw CollisionError("rhs: particle pair below collision threshold", i, j);
            }
            const Eigen::VectorXd u = xji / r;
            const double strength = p.kappa1 * vji.dot(u) + p.kappa2 * (r - p.targets(i, j));
            acc += (strength / (2.0 * n)) * u;
        }
        out.dw.row(i) = acc.transpose();
    }
    return out;
}

}  // namespace

Rhs euclidean_rhs(const SystemState& s, const ModelParams& p) {
    return flat_rhs(s, p, euclidean_velocities(s, p));
}

Rhs classical_rhs(const SystemState& s, const ModelParams& p) {
    return flat_rhs(s, p, euclidean_velocities(s, p, /*classical=*/true));
}

Rhs manifold_rhs(const GeometryBackend& b, const SystemState& s, const ModelParams& p) {
    const int n = s.particle_count();
    const Eigen::MatrixXd v = manifold_velocities(b, s, p);
    Rhs out;
    out.dx = v;
    out.dw = Eigen::MatrixXd::Zero(n, s.w.cols());
    const bool bonding = p.kappa1 + p.kappa2 > 0.0;
    const double inj = b.injectivity_radius();

    for (int i = 0; i < n; ++i) {
        const ManifoldPoint xi{s.x.row(i).transpose()};
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(s.w.cols());
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const ManifoldPoint xj{s.x.row(j).transpose()};
            const double dij = b.geodesic_distance(xi, xj);
            if (dij >= inj) {
                throw InjectivityError("manifold_rhs: pair separation at injectivity radius");
            }
            const TangentVector vj{xj.ambient, v.row(j).transpose()};
            const Eigen::VectorXd pv = b.parallel_transport(xj, xi, vj).ambient;
            const Eigen::VectorXd rel = pv - v.row(i).transpose();
            acc += (p.kappa0 / n) * kernel_eval(p.kernel, dij) * rel;
            if (!bonding) continue;
            if (dij <= kCollisionEps) {
                throw CollisionError("manifold_rhs: pair below collision threshold", i, j);
            }
            const Eigen::VectorXd dir = b.log_map(xi, xj).ambient / dij;
            const double radial = b.metric_inner(xi, {xi.ambient, rel}, {xi.ambient, dir});
            const double strength = p.kappa1 * radial + p.kappa2 * (dij - p.targets(i, j));
            acc += (strength / (2.0 * n)) * dir;
        }
        out.dw.row(i) = acc.transpose();
    }
    return out;
}

ForceDecomposition force_decomposition(const SystemState& s, const ModelParams& p, int i,
                                       const GeometryBackend* b, bool classical) {
    const int n = s.particle_count();
    if (i < 0 || i >= n) throw ParamError("force_decomposition: particle index out of range");
    const bool manifold = b != nullptr && b->kind() != GeometryBackend::Kind::Euclidean;

    ForceDecomposition fd;
    const int m = static_cast<int>(s.w.cols());
    fd.alignment = Eigen::VectorXd::Zero(m);
    fd.velocity_bonding = Eigen::VectorXd::Zero(m);
    fd.spring_bonding = Eigen::VectorXd::Zero(m);

    if (!manifold) {
        const Eigen::MatrixXd v = euclidean_velocities(s, p, classical);
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const Eigen::VectorXd xji = s.x.row(j) - s.x.row(i);
            const double r = xji.norm();
            const Eigen::VectorXd vji = v.row(j) - v.row(i);
            fd.alignment += (p.kappa0 / n) * kernel_eval(p.kernel, r) * vji;
            if (p.kappa1 + p.kappa2 == 0.0) continue;
            if (r <= kCollisionEps) {
                throw CollisionError("force_decomposition: pair below collision threshold", i, j);
            }
            const Eigen::VectorXd u = xji / r;
            fd.velocity_bonding += (p.kappa1 * vji.dot(u) / (2.0 * n)) * u;
            fd.spring_bonding += (p.kappa2 * (r - p.targets(i, j)) / (2.0 * n)) * u;
        }
        return fd;
    }

    const Eigen::MatrixXd v = manifold_velocities(*b, s, p);
    const ManifoldPoint xi{s.x.row(i).transpose()};
    for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        const ManifoldPoint xj{s.x.row(j).transpose()};
        const double dij = b->geodesic_distance(xi, xj);
        const TangentVector vj{xj.ambient, v.row(j).transpose()};
        const Eigen::VectorXd rel =
            b->parallel_transport(xj, xi, vj).ambient - v.row(i).transpose();
        fd.alignment += (p.kappa0 / n) * kernel_eval(p.kernel, dij) * rel;
        if (p.kappa1 + p.kappa2 == 0.0) continue;
        if (dij <= kCollisionEps) {
            throw CollisionError("force_decomposition: pair below collision threshold", i, j);
        }
        const Eigen::VectorXd dir = b->log_map(xi, xj).ambient / dij;
        const double radial = b->metric_inner(xi, {xi.ambient, rel}, {xi.ambient, dir});
        fd.velocity_bonding += (p.kappa1 * radial / (2.0 * n)) * dir;
        fd.spring_bonding += (p.kappa2 * (dij - p.targets(i, j)) / (2.0 * n)) * dir;
    }
    return fd;
}

}  // namespace rcsbf
