#include "rcsbf/scenario.hpp"

#include <cmath>
#include <future>
#include <limits>

#include "rcsbf/numerics.hpp"

namespace rcsbf {

namespace {

constexpr double kSmallKappa2 = 1e-2;  // numerical reading of "kappa2 << 1"

// Kinetic energy evaluated on momentum norms: Gamma~(w) = c / sqrt(c^2 - |w|^2).
// This is the c-uniform majorant used by the sweep admissibility condition.
double momentum_kinetic_energy(const Eigen::MatrixXd& w, double c) {
    double e = 0.0;
    for (int i = 0; i < w.rows(); ++i) {
        const double wn = w.row(i).norm();
        if (!(wn < c)) {
            throw ConditionError("limit sweep: initial momentum norm must be below the smallest c");
        }
        const double gamma = c / std::sqrt((c - wn) * (c + wn));
        e += c * c * (gamma - 1.0) + gamma * gamma - std::log(gamma);
    }
    return e;
}

Eigen::MatrixXd recenter_rows(Eigen::MatrixXd w) {
    const Eigen::RowVectorXd mean = w.colwise().mean();
    w.rowwise() -= mean;
    // Push the summation residual into the first row so the column sums are
    // zero to machine precision.
    w.row(0) -= w.colwise().sum();
    return w;
}

ModelParams base_params(int N, int d) {
    ModelParams p;
    p.N = N;
    p.d = d;
    p.kappa0 = 1.0;
    p.kappa1 = 1.0;
    p.kappa2 = 1.0;
    p.kernel = KernelSpec::cucker_smale(0.5);
    return p;
}

TargetDistances constant_targets(int N, double r) {
    Eigen::MatrixXd m = Eigen::MatrixXd::Constant(N, N, r);
    m.diagonal().setZero();
    return TargetDistances(m);
}

}  // namespace

TargetDistances build_pattern_targets(const std::vector<Eigen::VectorXd>& points) {
    const int n = static_cast<int>(points.size());
    if (n < 2) throw DegenerateError("build_pattern_targets: need at least two points");
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const double r = (points[i] - points[j]).norm();
            if (r == 0.0) throw DegenerateError("build_pattern_targets: duplicate points");
            m(i, j) = m(j, i) = r;
        }
    }
    return TargetDistances(m);
}

ScenarioSpec build_collision_example(double R, double kappa0, double kappa1, double kappa2) {
    ScenarioSpec spec;
    spec.kind = ScenarioSpec::Kind::CollisionExample;
    spec.collision_R = R;
    spec.collision_x1 = -R / 4.0;
    spec.collision_x2 = R / 4.0;
    spec.collision_v1 = 1.0;
    spec.collision_v2 = -1.0;

    spec.params = base_params(2, 1);
    spec.params.c = SpeedOfLight::infinite();
    spec.params.kappa0 = kappa0;
    spec.params.kappa1 = kappa1;
    spec.params.kappa2 = kappa2;
    spec.params.targets = constant_targets(2, R);

    spec.stepper.dt = 1e-3;
    spec.stepper.t_end = 10.0;
    spec.stepper.collision_epsilon = 1e-6;
    spec.stepper.record_stride = 10;

    verify_collision_conditions(spec);
    return spec;
}

void verify_collision_conditions(const ScenarioSpec& spec) {
    const double R = spec.collision_R;
    const double x1 = spec.collision_x1, x2 = spec.collision_x2;
    const double v1 = spec.collision_v1, v2 = spec.collision_v2;
    const double kappa0 = spec.params.kappa0;
    const double kappa1 = spec.params.kappa1;
    const double kappa2 = spec.params.kappa2;
    if (!(std::abs(x1) < R / 2.0 && std::abs(x2) < R / 2.0 && x1 < 0.0 && 0.0 < x2 &&
          v2 < 0.0 && 0.0 < v1)) {
        throw ConditionError("collision example: ordering/position-bound clause fails");
    }
    if (!(kappa2 > 0.0 && kappa2 <= kSmallKappa2)) {
        throw ConditionError("collision example: weak-spring clause (kappa2 small) fails");
    }
    const double gap = x2 - x1;
    const double e0 = 0.5 * (v1 * v1 + v2 * v2) + 2.0 + kappa2 / 8.0 * (gap - R) * (gap - R);
    const double r_upper = R + std::sqrt(8.0 * std::max(0.0, e0 - 2.0) / kappa2);
    const double phi_m = kernel_min_on(spec.params.kernel, r_upper);
    const KernelSpec kernel = spec.params.kernel;
    const double big_phi =
        adaptive_simpson([kernel](double r) { return kernel_eval(kernel, r); }, 0.0, gap, 1e-10);
    if (!(kappa0 * big_phi - kappa0 * phi_m * gap < v1 - v2)) {
        throw ConditionError("collision example: kernel-primitive clause fails");
    }
    if (!(kappa0 * big_phi + 0.5 * kappa1 * gap < v1 - v2)) {
        throw ConditionError("collision example: damping-bound clause fails");
    }
}

ScenarioSpec build_flocking_scenario(int N, int d, std::uint64_t seed, const ModelParams& p) {
    if (N < 2) throw ParamError("build_flocking_scenario: N must be >= 2");
    ScenarioSpec spec;
    spec.kind = ScenarioSpec::Kind::Flocking;
    spec.seed = seed;
    spec.params = p;
    spec.params.N = N;
    spec.params.d = d;
    if (spec.params.targets.size() != N) {
        spec.params.targets = constant_targets(N, spec.flocking_target_distance);
    }
    spec.stepper.dt = 1e-3;
    spec.stepper.t_end = 100.0;
    spec.stepper.collision_epsilon = kCollisionEps;
    spec.stepper.record_stride = 100;

    const ScenarioRuntime rt = materialize(spec);  // throws on degenerate draws
    const double e0 = kinetic_energy(rt.initial_state, rt.params) +
                      potential_energy(rt.initial_state, rt.params);
    auto [lo, hi] = distance_bounds(rt.params, e0);
    (void)lo;
    if (!check_flocking_hypotheses(rt.params, rt.initial_state, hi)) {
        throw ConditionError("build_flocking_scenario: hypotheses checker rejected the draw");
    }
    return spec;
}

ScenarioSpec make_default_pattern_scenario(std::uint64_t seed) {
    ScenarioSpec spec;
    spec.kind = ScenarioSpec::Kind::Pattern;
    spec.seed = seed;
    // Five-point star: vertices of the regular pentagon, radius 1.
    for (int k = 0; k < 5; ++k) {
        const double a = M_PI / 2.0 + 2.0 * M_PI * k / 5.0;
        Eigen::VectorXd pnt(2);
        pnt << std::cos(a), std::sin(a);
        spec.pattern_points.push_back(pnt);
    }
    spec.params = base_params(5, 2);
    spec.params.c = SpeedOfLight::infinite();
    spec.params.targets = build_pattern_targets(spec.pattern_points);
    spec.stepper.dt = 1e-3;
    spec.stepper.t_end = 50.0;
    spec.stepper.record_stride = 100;
    return spec;
}

ScenarioSpec make_default_collision_scenario() {
    return build_collision_example(2.0, 0.01, 0.01, 1e-4);
}

ScenarioSpec make_default_flocking_scenario(std::uint64_t seed) {
    ModelParams p = base_params(6, 2);
    p.c = SpeedOfLight::finite(10.0);
    return build_flocking_scenario(6, 2, seed, p);
}

ScenarioSpec make_default_sphere_scenario(std::uint64_t seed) {
    ScenarioSpec spec;
    spec.kind = ScenarioSpec::Kind::Manifold;
    spec.seed = seed;
    spec.backend = GeometryBackend::sphere(2, 1.0);
    spec.params = base_params(5, 2);
    spec.params.c = SpeedOfLight::finite(5.0);
    spec.stepper.dt = 1e-3;
    spec.stepper.t_end = 10.0;
    spec.stepper.record_stride = 10;
    spec.manifold_cap_radius = 0.7;
    spec.manifold_momentum_scale = 0.1;
    return spec;
}

namespace {

SystemState flocking_initial_state(const ScenarioSpec& spec, const ModelParams& p) {
    Rng rng(spec.seed);
    const int n = p.N;
    SystemState s;
    s.x.resize(n, p.d);
    for (int attempt = 0; attempt < 100; ++attempt) {
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < p.d; ++k) s.x(i, k) = rng.uniform(0.0, spec.flocking_box);
        double min_dist = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                min_dist = std::min(min_dist, (s.x.row(i) - s.x.row(j)).norm());
        if (min_dist > spec.flocking_min_separation) {
            Eigen::MatrixXd w(n, p.d);
            for (int i = 0; i < n; ++i)
                for (int k = 0; k < p.d; ++k)
                    w(i, k) = rng.normal(0.0, spec.flocking_momentum_scale);
            s.w = recenter_rows(std::move(w));
            s.t = 0.0;
            return s;
        }
    }
    throw ConditionError("flocking scenario: no admissible draw in 100 attempts");
}

SystemState pattern_initial_state(const ScenarioSpec& spec, const ModelParams& p) {
    Rng rng(spec.seed);
    const int n = p.N;
    const int d = p.d;
    SystemState s;
    s.x.resize(n, d);
    Eigen::MatrixXd w(n, d);
    for (int i = 0; i < n; ++i) {
        for (int k = 0; k < d; ++k) {
            s.x(i, k) = spec.pattern_points[i][k] + rng.normal(0.0, spec.pattern_position_jitter);
            w(i, k) = rng.normal(0.0, spec.pattern_velocity_scale);
        }
    }
    s.w = recenter_rows(std::move(w));
    s.t = 0.0;
    return s;
}

SystemState manifold_initial_state(const ScenarioSpec& spec, const ModelParams& p,
                                   const GeometryBackend& b) {
    if (spec.initial_x && spec.initial_w) {
        SystemState s;
        s.x = *spec.initial_x;
        s.w = *spec.initial_w;
        s.t = 0.0;
        for (int i = 0; i < s.particle_count(); ++i) {
            const ManifoldPoint xi = b.project_point(s.x.row(i).transpose());
            s.x.row(i) = xi.ambient.transpose();
            s.w.row(i) = b.project_tangent(xi, s.w.row(i).transpose()).ambient.transpose();
        }
        return s;
    }

    Rng rng(spec.seed);
    const int n = p.N;
    const int m = b.ambient_dim();
    Eigen::VectorXd pole = Eigen::VectorXd::Zero(m);
    if (b.kind() == GeometryBackend::Kind::Hyperbolic) {
        pole[0] = b.radius();
    } else {
        pole[m - 1] = b.radius();
    }
    const ManifoldPoint origin{pole};

    SystemState s;
    s.x.resize(n, m);
    s.w.resize(n, m);
    for (int attempt = 0; attempt < 100; ++attempt) {
        for (int i = 0; i < n; ++i) {
            // Tangent direction in the coordinates spanning T_pole.
            Eigen::VectorXd u = Eigen::VectorXd::Zero(m);
            for (int k = 0; k < b.dim(); ++k) {
                const int idx = b.kind() == GeometryBackend::Kind::Hyperbolic ? k + 1 : k;
                u[idx] = rng.normal();
            }
            const double norm = u.norm();
            const double radius_draw =
                spec.manifold_cap_radius * std::pow(rng.uniform(), 1.0 / b.dim());
            if (norm > 0.0) u *= radius_draw / norm;
            const ManifoldPoint xi = b.exp_map(origin, {origin.ambient, u});
            s.x.row(i) = xi.ambient.transpose();
            Eigen::VectorXd wa(m);
            for (int k = 0; k < m; ++k) wa[k] = rng.normal(0.0, spec.manifold_momentum_scale);
            s.w.row(i) = b.project_tangent(xi, wa).ambient.transpose();
        }
        double min_dist = std::numeric_limits<double>::infinity();
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j)
                min_dist = std::min(min_dist, b.geodesic_distance({s.x.row(i).transpose()},
                                                                  {s.x.row(j).transpose()}));
        if (min_dist > 0.05) {
            s.t = 0.0;
            return s;
        }
    }
    throw ConditionError("manifold scenario: no admissible draw in 100 attempts");
}

TargetDistances geodesic_targets(const GeometryBackend& b, const SystemState& s) {
    const int n = s.particle_count();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            m(i, j) = m(j, i) =
                b.geodesic_distance({s.x.row(i).transpose()}, {s.x.row(j).transpose()});
    return TargetDistances(m);
}

}  // namespace

ScenarioRuntime materialize(const ScenarioSpec& spec) {
    ScenarioRuntime rt;
    rt.params = spec.params;
    rt.backend = spec.backend;

    switch (spec.kind) {
        case ScenarioSpec::Kind::Pattern: {
            rt.params.N = static_cast<int>(spec.pattern_points.size());
            if (rt.params.N < 2) throw DegenerateError("pattern scenario: need >= 2 points");
            rt.params.d = static_cast<int>(spec.pattern_points.front().size());
            if (rt.params.targets.size() != rt.params.N) {
                rt.params.targets = build_pattern_targets(spec.pattern_points);
            }
            rt.classical = rt.params.c.is_infinite();
            rt.initial_state = pattern_initial_state(spec, rt.params);
            break;
        }
        case ScenarioSpec::Kind::CollisionExample: {
            verify_collision_conditions(spec);
            rt.params.N = 2;
            rt.params.d = 1;
            if (rt.params.targets.size() != 2) {
                rt.params.targets = constant_targets(2, spec.collision_R);
            }
            rt.classical = rt.params.c.is_infinite();
            rt.initial_state.x.resize(2, 1);
            rt.initial_state.w.resize(2, 1);
            rt.initial_state.x << spec.collision_x1, spec.collision_x2;
            rt.initial_state.w << spec.collision_v1, spec.collision_v2;
            rt.initial_state.t = 0.0;
            break;
        }
        case ScenarioSpec::Kind::Flocking: {
            if (rt.params.targets.size() != rt.params.N) {
                rt.params.targets = constant_targets(rt.params.N, spec.flocking_target_distance);
            }
            rt.classical = rt.params.c.is_infinite();
            rt.initial_state = flocking_initial_state(spec, rt.params);
            break;
        }
        case ScenarioSpec::Kind::Manifold: {
            if (!spec.backend) throw ParamError("manifold scenario: backend missing");
            rt.initial_state = manifold_initial_state(spec, rt.params, *spec.backend);
            rt.params.N = rt.initial_state.particle_count();
            if (rt.params.targets.size() != rt.params.N) {
                rt.params.targets = geodesic_targets(*spec.backend, rt.initial_state);
            }
            rt.classical = false;
            break;
        }
        case ScenarioSpec::Kind::LimitSweep: {
            if (!spec.sweep_base) throw ParamError("limit sweep: base scenario missing");
            return materialize(*spec.sweep_base);
        }
    }
    rt.params.validate();
    return rt;
}

SweepResult run_limit_sweep(const ScenarioSpec& base, const std::vector<double>& cs, double T) {
    if (cs.size() < 3) throw ParamError("run_limit_sweep: need at least three c values");
    for (std::size_t k = 0; k + 1 < cs.size(); ++k) {
        if (!(cs[k] < cs[k + 1])) throw ParamError("run_limit_sweep: c list must be increasing");
    }

    ScenarioRuntime rt = materialize(base);
    if (rt.backend && rt.backend->kind() != GeometryBackend::Kind::Euclidean) {
        throw ParamError("run_limit_sweep: sweep is defined for flat scenarios");
    }

    // Uniform-in-c admissibility at the smallest c: the momentum-evaluated
    // kinetic energy plus the initial potential must satisfy the strict
    // collision-avoidance budget.
    const double c_min = cs.front();
    const double e_tilde = momentum_kinetic_energy(rt.initial_state.w, c_min);
    const double e_pot = potential_energy(rt.initial_state, rt.params);
    const double rmin = rt.params.targets.min_offdiag();
    if (!(e_tilde + e_pot <= rt.params.N +
                                 rt.params.kappa2 / (4.0 * rt.params.N) * rmin * rmin)) {
        throw ConditionError("run_limit_sweep: uniform energy condition fails at smallest c");
    }

    StepperConfig cfg = base.stepper;
    cfg.t_end = T;

    ModelParams classical_params = rt.params;
    classical_params.c = SpeedOfLight::infinite();
    const Trajectory reference =
        simulate(rt.initial_state, classical_params, cfg, nullptr, /*classical=*/true);

    std::vector<std::future<double>> workers;
    workers.reserve(cs.size());
    for (double c : cs) {
        workers.push_back(std::async(std::launch::async, [&, c]() {
            ModelParams p = rt.params;
            p.c = SpeedOfLight::finite(c);
            const Trajectory t = simulate(rt.initial_state, p, cfg);
            return deviation(t, reference).sup_D;
        }));
    }

    SweepResult out;
    out.cs = cs;
    for (auto& w : workers) out.sup_Ds.push_back(w.get());

    std::vector<double> magnitudes;
    magnitudes.reserve(out.sup_Ds.size());
    for (double s : out.sup_Ds) magnitudes.push_back(std::sqrt(s));
    out.slope = fit_loglog_slope(out.cs, magnitudes);
    return out;
}

}  // namespace rcsbf
