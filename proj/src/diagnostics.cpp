#include "rcsbf/diagnostics.hpp"

#include <cmath>
#include <limits>

namespace rcsbf {

namespace {

double pair_distance(const SystemState& s, int i, int j, const GeometryBackend* b) {
    if (b == nullptr || b->kind() == GeometryBackend::Kind::Euclidean) {
        return (s.x.row(i) - s.x.row(j)).norm();
    }
    return b->geodesic_distance({s.x.row(i).transpose()}, {s.x.row(j).transpose()});
}

Eigen::MatrixXd state_velocities(const SystemState& s, const ModelParams& p,
                                 const GeometryBackend* b, bool classical) {
    if (b != nullptr && b->kind() != GeometryBackend::Kind::Euclidean) {
        return manifold_velocities(*b, s, p);
    }
    return euclidean_velocities(s, p, classical);
}

// Metric norm of a tangent vector at particle i (Minkowski-induced on the
// hyperboloid; plain Euclidean otherwise).
double metric_norm(const SystemState& s, int i, const Eigen::VectorXd& u,
                   const GeometryBackend* b) {
    if (b == nullptr || b->kind() == GeometryBackend::Kind::Euclidean) return u.norm();
    const ManifoldPoint xi{s.x.row(i).transpose()};
    return b->norm(xi, {xi.ambient, u});
}

}  // namespace

double kinetic_energy(const SystemState& s, const ModelParams& p, const GeometryBackend* b,
                      bool classical) {
    const SpeedOfLight c = classical ? SpeedOfLight::infinite() : p.c;
    const Eigen::MatrixXd v = state_velocities(s, p, b, classical);
    double e = 0.0;
    for (int i = 0; i < s.particle_count(); ++i) {
        e += particle_kinetic_energy_from_speed(metric_norm(s, i, v.row(i).transpose(), b), c);
    }
    return e;
}

double potential_energy(const SystemState& s, const ModelParams& p, const GeometryBackend* b) {
    const int n = s.particle_count();
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const double r = pair_distance(s, i, j, b);
            const double e = r - p.targets(i, j);
            sum += e * e;
        }
    }
    return p.kappa2 / (8.0 * n) * sum;
}

double energy_production(const SystemState& s, const ModelParams& p, const GeometryBackend* b,
                         bool classical) {
    const int n = s.particle_count();
    const bool manifold = b != nullptr && b->kind() != GeometryBackend::Kind::Euclidean;
    const Eigen::MatrixXd v = state_velocities(s, p, b, classical);

    double align = 0.0;
    double radial = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const double r = pair_distance(s, i, j, b);
            Eigen::VectorXd vji;
            if (manifold) {
                const ManifoldPoint xi{s.x.row(i).transpose()};
                const ManifoldPoint xj{s.x.row(j).transpose()};
                const TangentVector vj{xj.ambient, v.row(j).transpose()};
                vji = b->parallel_transport(xj, xi, vj).ambient - v.row(i).transpose();
            } else {
                vji = v.row(j) - v.row(i);
            }
            const double vji_norm = metric_norm(s, i, vji, b);
            align += kernel_eval(p.kernel, r) * vji_norm * vji_norm;
            if (p.kappa1 > 0.0) {
                if (r <= 0.0) {
                    throw CollisionError("energy_production: pair at zero distance", i, j);
                }
                double proj;
                if (manifold) {
                    const ManifoldPoint xi{s.x.row(i).transpose()};
                    const ManifoldPoint xj{s.x.row(j).transpose()};
                    const Eigen::VectorXd dir = b->log_map(xi, xj).ambient / r;
                    proj = b->metric_inner(xi, {xi.ambient, vji}, {xi.ambient, dir});
                } else {
                    proj = vji.dot((s.x.row(j) - s.x.row(i)).transpose()) / r;
                }
                radial += proj * proj;
            }
        }
    }
    return p.kappa0 / (2.0 * n) * align + p.kappa1 / (4.0 * n) * radial;
}

EnergyReport energy_report(const SystemState& s, const ModelParams& p, const GeometryBackend* b,
                           bool classical) {
    EnergyReport r;
    r.kinetic = kinetic_energy(s, p, b, classical);
    r.potential = potential_energy(s, p, b);
    r.total = r.kinetic + r.potential;
    r.production = energy_production(s, p, b, classical);
    return r;
}

FlockingReport flocking_metrics(const SystemState& s, const GeometryBackend* b,
                                const ModelParams* p, bool classical) {
    const int n = s.particle_count();
    const bool manifold = b != nullptr && b->kind() != GeometryBackend::Kind::Euclidean;
    ModelParams defaults;
    Eigen::MatrixXd v;
    if (p != nullptr) {
        v = state_velocities(s, *p, b, classical);
    } else {
        v = s.w;  // classical reading when no params supplied
    }

    FlockingReport rep;
    rep.min_pair_dist = n > 1 ? std::numeric_limits<double>::infinity() : 0.0;
    rep.max_pair_dist = 0.0;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double r = pair_distance(s, i, j, b);
            rep.min_pair_dist = std::min(rep.min_pair_dist, r);
            rep.max_pair_dist = std::max(rep.max_pair_dist, r);
            Eigen::VectorXd dv;
            if (manifold) {
                const ManifoldPoint xi{s.x.row(i).transpose()};
                const ManifoldPoint xj{s.x.row(j).transpose()};
                if (r >= b->injectivity_radius()) {
                    throw InjectivityError("flocking_metrics: pair beyond injectivity radius");
                }
                const TangentVector vj{xj.ambient, v.row(j).transpose()};
                dv = b->parallel_transport(xj, xi, vj).ambient - v.row(i).transpose();
            } else {
                dv = v.row(j) - v.row(i);
            }
            rep.max_rel_speed = std::max(rep.max_rel_speed, metric_norm(s, i, dv, b));
        }
    }
    rep.momentum_sum_norm = s.w.colwise().sum().norm();
    return rep;
}

std::pair<double, double> distance_bounds(const ModelParams& p, double initial_energy) {
    if (!(p.kappa2 > 0.0)) throw ParamError("distance_bounds: kappa2 must be positive");
    const double excess = std::max(0.0, initial_energy - p.N);
    const double spread = std::sqrt(4.0 * p.N * excess / p.kappa2);
    return {p.targets.min_offdiag() - spread, p.targets.max_offdiag() + spread};
}

bool check_collision_avoidance(const ModelParams& p, double initial_energy) {
    if (!(p.kappa2 > 0.0)) throw ParamError("check_collision_avoidance: kappa2 must be positive");
    const double rmin = p.targets.min_offdiag();
    return initial_energy < p.N + p.kappa2 / (4.0 * p.N) * rmin * rmin;
}

bool check_flocking_hypotheses(const ModelParams& p, const SystemState& s0, double r_upper) {
    const int n = s0.particle_count();
    double min_dist = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            min_dist = std::min(min_dist, (s0.x.row(i) - s0.x.row(j)).norm());
    if (!(min_dist > 0.0)) return false;
    if (!(p.kappa0 > 0.0 && p.kappa1 > 0.0 && p.kappa2 > 0.0)) return false;
    if (!(kernel_min_on(p.kernel, r_upper) > 0.0)) return false;
    return s0.w.colwise().sum().norm() <= 1e-12;
}

bool check_manifold_wellposedness(const GeometryBackend& b, const ModelParams& p,
                                  double initial_energy) {
    if (!(p.kappa2 > 0.0)) {
        throw ParamError("check_manifold_wellposedness: kappa2 must be positive");
    }
    const double inj = b.injectivity_radius();
    const double rmax = p.targets.max_offdiag();
    if (!(rmax < inj)) return false;
    double margin = p.targets.min_offdiag();
    if (std::isfinite(inj)) margin = std::min(margin, inj - rmax);
    return initial_energy < p.N + p.kappa2 / (4.0 * p.N) * margin * margin;
}

AdmissibilityReport admissibility_report(const SystemState& s0, const ModelParams& p,
                                         const GeometryBackend* b, bool classical) {
    AdmissibilityReport rep;
    const double e0 = kinetic_energy(s0, p, b, classical) + potential_energy(s0, p, b);
    auto [lo, hi] = distance_bounds(p, e0);
    rep.r_lower = lo;
    rep.r_upper = hi;
    rep.collision_avoidance_ok = check_collision_avoidance(p, e0);
    rep.flocking_hypotheses_ok = check_flocking_hypotheses(p, s0, hi);
    if (b != nullptr && b->kind() != GeometryBackend::Kind::Euclidean) {
        rep.manifold_wellposed_ok = check_manifold_wellposedness(*b, p, e0);
    }
    return rep;
}

}  // namespace rcsbf
