#include "rcsbf/integrate.hpp"

#include <cmath>
#include <limits>

namespace rcsbf {

namespace {

constexpr int kBisectionIters = 10;

struct FlatDeriv {
    Eigen::MatrixXd dx;
    Eigen::MatrixXd dw;
};

FlatDeriv flat_deriv(const SystemState& s, const ModelParams& p, bool classical) {
    const Rhs r = classical ? classical_rhs(s, p) : euclidean_rhs(s, p);
    return {r.dx, r.dw};
}

// Ambient derivative for a manifold state. Stage states coming from an RK
// update may sit slightly off the constraint set, so both the point and the
// momentum are retracted before evaluating the model. The momentum
// derivative adds the Gauss-formula normal term: the ambient rate of change
// of a tangent field is the covariant value plus II(v, w).
FlatDeriv manifold_deriv(const GeometryBackend& b, const SystemState& raw,
                         const ModelParams& p) {
    SystemState s = raw;
    const int n = s.particle_count();
    for (int i = 0; i < n; ++i) {
        const ManifoldPoint xi = b.project_point(s.x.row(i).transpose());
        s.x.row(i) = xi.ambient.transpose();
        s.w.row(i) = b.project_tangent(xi, s.w.row(i).transpose()).ambient.transpose();
    }
    const Rhs r = manifold_rhs(b, s, p);
    FlatDeriv out{r.dx, r.dw};
    for (int i = 0; i < n; ++i) {
        const ManifoldPoint xi{s.x.row(i).transpose()};
        out.dw.row(i) +=
            b.curvature_correction(xi, r.dx.row(i).transpose(), s.w.row(i).transpose())
                .transpose();
    }
    return out;
}

template <typename DerivFn>
SystemState rk_step(const SystemState& s, double dt, StepperConfig::Scheme scheme,
                    DerivFn&& deriv) {
    SystemState out = s;
    if (scheme == StepperConfig::Scheme::Euler) {
        const FlatDeriv k1 = deriv(s);
        out.x = s.x + dt * k1.dx;
        out.w = s.w + dt * k1.dw;
        out.t = s.t + dt;
        return out;
    }
    const FlatDeriv k1 = deriv(s);
    SystemState mid = s;
    mid.t = s.t + 0.5 * dt;
    mid.x = s.x + 0.5 * dt * k1.dx;
    mid.w = s.w + 0.5 * dt * k1.dw;
    const FlatDeriv k2 = deriv(mid);
    mid.x = s.x + 0.5 * dt * k2.dx;
    mid.w = s.w + 0.5 * dt * k2.dw;
    const FlatDeriv k3 = deriv(mid);
    SystemState end = s;
    end.t = s.t + dt;
    end.x = s.x + dt * k3.dx;
    end.w = s.w + dt * k3.dw;
    const FlatDeriv k4 = deriv(end);
    out.x = s.x + dt / 6.0 * (k1.dx + 2.0 * k2.dx + 2.0 * k3.dx + k4.dx);
    out.w = s.w + dt / 6.0 * (k1.dw + 2.0 * k2.dw + 2.0 * k3.dw + k4.dw);
    out.t = s.t + dt;
    return out;
}

double min_pair_distance(const SystemState& s, const GeometryBackend* b, int* pi, int* pj) {
    const int n = s.particle_count();
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            double r;
            if (b == nullptr || b->kind() == GeometryBackend::Kind::Euclidean) {
                r = (s.x.row(i) - s.x.row(j)).norm();
            } else {
                r = b->geodesic_distance({s.x.row(i).transpose()}, {s.x.row(j).transpose()});
            }
            if (r < best) {
                best = r;
                if (pi) *pi = i;
                if (pj) *pj = j;
            }
        }
    }
    return best;
}

// Closest approach of any pair over one step, assuming straight-line
// relative motion between the endpoint states. Particles can pass through
// each other within a single step, so endpoint distances alone are not a
// usable event test.
struct Approach {
    double rmin = std::numeric_limits<double>::infinity();
    double t_offset = 0.0;  // offset of the minimizer from the step start
    int pair_i = -1;
    int pair_j = -1;
};

Approach closest_approach(const SystemState& a, const SystemState& c, double h) {
    Approach out;
    const int n = a.particle_count();
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const Eigen::VectorXd d0 = (a.x.row(i) - a.x.row(j)).transpose();
            const Eigen::VectorXd d1 = (c.x.row(i) - c.x.row(j)).transpose();
            const Eigen::VectorXd rate = (d1 - d0) / h;
            double t_best = 0.0;
            double r_best = d0.norm();
            if (d1.norm() < r_best) {
                r_best = d1.norm();
                t_best = h;
            }
            const double speed2 = rate.squaredNorm();
            if (speed2 > 0.0) {
                const double t_star = -d0.dot(rate) / speed2;
                if (t_star > 0.0 && t_star < h) {
                    const double r_star = (d0 + t_star * rate).norm();
                    if (r_star < r_best) {
                        r_best = r_star;
                        t_best = t_star;
                    }
                }
            }
            if (r_best < out.rmin) {
                out.rmin = r_best;
                out.t_offset = t_best;
                out.pair_i = i;
                out.pair_j = j;
            }
        }
    }
    return out;
}

}  // namespace

void StepperConfig::validate() const {
    if (!(dt > 0.0)) throw ParamError("StepperConfig: dt must be positive");
    if (t_end < 0.0) throw ParamError("StepperConfig: t_end must be >= 0");
    if (t_end > 0.0 && dt > t_end) throw ParamError("StepperConfig: dt must not exceed t_end");
    if (collision_epsilon < kCollisionEps) {
        throw ParamError("StepperConfig: collision_epsilon below the dynamics threshold");
    }
    if (record_stride < 1) throw ParamError("StepperConfig: record_stride must be >= 1");
}

SystemState step_euclidean(const SystemState& s, const ModelParams& p, double dt,
                           StepperConfig::Scheme scheme, bool classical) {
    return rk_step(s, dt, scheme,
                   [&](const SystemState& q) { return flat_deriv(q, p, classical); });
}

SystemState step_manifold(const GeometryBackend& b, const SystemState& s, const ModelParams& p,
                          double dt, StepperConfig::Scheme scheme) {
    SystemState out = rk_step(s, dt, scheme,
                              [&](const SystemState& q) { return manifold_deriv(b, q, p); });
    for (int i = 0; i < out.particle_count(); ++i) {
        const ManifoldPoint xi = b.project_point(out.x.row(i).transpose());
        out.x.row(i) = xi.ambient.transpose();
        out.w.row(i) = b.project_tangent(xi, out.w.row(i).transpose()).ambient.transpose();
    }
    return out;
}

Trajectory simulate(const SystemState& s0, const ModelParams& p, const StepperConfig& cfg,
                    const GeometryBackend* b, bool classical) {
    cfg.validate();
    p.validate();
    const bool manifold = b != nullptr && b->kind() != GeometryBackend::Kind::Euclidean;

    auto advance = [&](const SystemState& s, double dt) {
        return manifold ? step_manifold(*b, s, p, dt, cfg.scheme)
                        : step_euclidean(s, p, dt, cfg.scheme, classical);
    };

    Trajectory traj;
    auto record = [&](const SystemState& s) {
        traj.times.push_back(s.t);
        traj.states.push_back(s);
        traj.energies.push_back(energy_report(s, p, b, classical));
        traj.flockings.push_back(flocking_metrics(s, b, &p, classical));
    };

    SystemState current = s0;
    record(current);
    if (cfg.t_end == 0.0) return traj;

    const long long steps = static_cast<long long>(std::ceil(cfg.t_end / cfg.dt - 1e-12));

    // True if [s_lo, s_lo + span] contains an approach below the collision
    // threshold; fills `end` with the state at span when integrable.
    auto interval_collides = [&](const SystemState& s_lo, double span, SystemState& end,
                                 bool& have_end) {
        try {
            end = advance(s_lo, span);
            have_end = true;
            return closest_approach(s_lo, end, span).rmin < cfg.collision_epsilon;
        } catch (const CollisionError&) {
            have_end = false;
            return true;
        }
    };

    // Halve the step interval around the first sub-interval containing the
    // approach; after kBisectionIters halvings the event time is known to
    // within dt / 2^10. The returned state sits at the closest approach of
    // the final sub-interval.
    auto localize_collision = [&](const SystemState& s_lo, double dt) {
        SystemState lo = s_lo;
        double span = dt;
        for (int iter = 0; iter < kBisectionIters; ++iter) {
            span *= 0.5;
            SystemState mid;
            bool have_mid = false;
            if (!interval_collides(lo, span, mid, have_mid) && have_mid) {
                lo = mid;  // dip lies in the second half
            }
        }
        // Land on the interior minimizer of the final sub-interval.
        SystemState best = lo;
        double best_r = min_pair_distance(lo, b, nullptr, nullptr);
        try {
            const SystemState end = advance(lo, span);
            const Approach ap = closest_approach(lo, end, span);
            for (const double t_off : {ap.t_offset, span}) {
                if (t_off <= 0.0) continue;
                const SystemState cand = t_off == span ? end : advance(lo, t_off);
                const double r = min_pair_distance(cand, b, nullptr, nullptr);
                if (r < best_r) {
                    best_r = r;
                    best = cand;
                }
            }
        } catch (const CollisionError&) {
            // Keep the last integrable state.
        }
        return best;
    };

    for (long long k = 0; k < steps; ++k) {
        const double dt = std::min(cfg.dt, cfg.t_end - current.t);
        if (dt <= 0.0) break;
        SystemState next;
        bool collided = false;
        try {
            next = advance(current, dt);
            collided = closest_approach(current, next, dt).rmin < cfg.collision_epsilon;
        } catch (const CollisionError&) {
            collided = true;
        } catch (const InjectivityError&) {
            int pi = -1, pj = -1;
            min_pair_distance(current, b, &pi, &pj);
            traj.termination = {Termination::Kind::InjectivityViolated, current.t, pi, pj};
            record(current);
            return traj;
        } catch (const AntipodalError&) {
            int pi = -1, pj = -1;
            min_pair_distance(current, b, &pi, &pj);
            traj.termination = {Termination::Kind::InjectivityViolated, current.t, pi, pj};
            record(current);
            return traj;
        }
        if (collided) {
            SystemState hit = localize_collision(current, dt);
            int pi = -1, pj = -1;
            min_pair_distance(hit, b, &pi, &pj);
            traj.termination = {Termination::Kind::CollisionDetected, hit.t, pi, pj};
            record(hit);
            return traj;
        }
        current = next;
        if ((k + 1) % cfg.record_stride == 0 || k + 1 == steps) {
            record(current);
        }
    }
    traj.termination = {Termination::Kind::Completed, current.t, -1, -1};
    return traj;
}

}  // namespace rcsbf
