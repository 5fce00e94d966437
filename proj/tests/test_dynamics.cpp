#include <doctest.h>

#include <cmath>
#include <vector>

#include "rcsbf/dynamics.hpp"
#include "rcsbf/numerics.hpp"

using namespace rcsbf;

namespace {

// Straight-from-formula oracle for the flat momentum equation, with its own
// bisection-only momentum inversion. Shares nothing with the library path
// except the kernel definition.
Eigen::VectorXd oracle_velocity(const Eigen::VectorXd& w, double c, bool classical) {
    if (classical) return w;
    const double wn = w.norm();
    if (wn == 0.0) return w;
    auto g = [&](double s) {
        const double gamma = 1.0 / std::sqrt(1.0 - s * s / (c * c));
        return gamma * (1.0 + gamma / (c * c)) * s - wn;
    };
    double lo = 0.0, hi = c * (1.0 - 1e-16);
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (g(mid) > 0.0) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    const double s = 0.5 * (lo + hi);
    return (s / wn) * w;
}

double oracle_phi(const ModelParams& p, double r) {
    if (p.kernel.kind == KernelSpec::Kind::Constant) return p.kernel.phi0;
    return std::pow(1.0 + r * r, -p.kernel.beta);
}

Rhs oracle_flat_rhs(const SystemState& s, const ModelParams& p, bool classical) {
    const int n = s.particle_count();
    const double c = classical ? 0.0 : p.c.value();
    Rhs out;
    out.dx.resize(n, s.x.cols());
    out.dw = Eigen::MatrixXd::Zero(n, s.x.cols());
    std::vector<Eigen::VectorXd> v(n);
    for (int i = 0; i < n; ++i) v[i] = oracle_velocity(s.w.row(i), c, classical);
    for (int i = 0; i < n; ++i) out.dx.row(i) = v[i].transpose();
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            if (j == i) continue;
            const Eigen::VectorXd xji = (s.x.row(j) - s.x.row(i)).transpose();
            const double r = xji.norm();
            out.dw.row(i) += (p.kappa0 / n) * oracle_phi(p, r) * (v[j] - v[i]).transpose();
            const Eigen::VectorXd u = xji / r;
            const double bracket =
                p.kappa1 * (v[j] - v[i]).dot(u) + p.kappa2 * (r - p.targets(i, j));
            out.dw.row(i) += (bracket / (2.0 * n)) * u.transpose();
        }
    }
    return out;
}

ModelParams make_params(int n, int d, double c, double k0, double k1, double k2) {
    ModelParams p;
    p.N = n;
    p.d = d;
    p.c = std::isinf(c) ? SpeedOfLight::infinite() : SpeedOfLight::finite(c);
    p.kappa0 = k0;
    p.kappa1 = k1;
    p.kappa2 = k2;
    p.kernel = KernelSpec::cucker_smale(0.5);
    Eigen::MatrixXd t = Eigen::MatrixXd::Constant(n, n, 1.5);
    t.diagonal().setZero();
    p.targets = TargetDistances(t);
    return p;
}

SystemState random_state(Rng& rng, int n, int d, double spread, double wscale) {
    SystemState s;
    s.x.resize(n, d);
    s.w.resize(n, d);
    for (int i = 0; i < n; ++i)
        for (int k = 0; k < d; ++k) {
            s.x(i, k) = rng.uniform(-spread, spread);
            s.w(i, k) = rng.normal(0.0, wscale);
        }
    return s;
}

}  // namespace

TEST_CASE("kernels") {
    auto cs = KernelSpec::cucker_smale(0.5);
    CHECK(kernel_eval(cs, 0.0) == 1.0);
    CHECK(kernel_eval(cs, std::sqrt(3.0)) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(kernel_eval(KernelSpec::constant(0.7), 99.0) == 0.7);
    CHECK(kernel_min_on(KernelSpec::cucker_smale(1.0), 1.0) == doctest::Approx(0.5));
    CHECK(kernel_min_on(KernelSpec::constant(0.7), 5.0) == 0.7);
    CHECK(kernel_min_on(KernelSpec::cucker_smale(2.0), 0.0) == 1.0);
}

TEST_CASE("target distances validation") {
    Eigen::MatrixXd bad(2, 2);
    bad << 0, 1, 2, 0;
    CHECK_THROWS_AS((TargetDistances(bad)), ParamError);
    bad << 1, 1, 1, 1;
    CHECK_THROWS_AS((TargetDistances(bad)), ParamError);
    Eigen::MatrixXd good(2, 2);
    good << 0, 2, 2, 0;
    TargetDistances t(good);
    CHECK(t.min_offdiag() == 2.0);
    CHECK(t.max_offdiag() == 2.0);
}

TEST_CASE("two-body equilibrium has zero force") {
    ModelParams p = make_params(2, 2, 5.0, 1.0, 1.0, 1.0);
    Eigen::MatrixXd t(2, 2);
    t << 0, 2, 2, 0;
    p.targets = TargetDistances(t);
    SystemState s;
    s.x.resize(2, 2);
    s.x << 0, 0, 2, 0;  // separation exactly at target
    s.w.resize(2, 2);
    s.w << 0.3, 0.1, 0.3, 0.1;  // equal momenta
    const Rhs r = euclidean_rhs(s, p);
    CHECK(r.dw.lpNorm<Eigen::Infinity>() <= 1e-15);
}

TEST_CASE("momentum sum of the rhs vanishes") {
    Rng rng(31);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 2 + static_cast<int>(rng.uniform(0, 5.99));
        ModelParams p = make_params(n, 3, 4.0, 0.8, 0.6, 1.2);
        const SystemState s = random_state(rng, n, 3, 2.0, 0.4);
        const Rhs r = euclidean_rhs(s, p);
        const double scale = r.dw.cwiseAbs().sum();
        CHECK(r.dw.colwise().sum().norm() <= 1e-13 * std::max(1.0, scale));
    }
}

TEST_CASE("euclidean rhs matches the brute-force oracle") {
    Rng rng(37);
    for (int trial = 0; trial < 25; ++trial) {
        ModelParams p = make_params(3, 2, 3.0, 1.1, 0.7, 0.9);
        const SystemState s = random_state(rng, 3, 2, 1.5, 0.5);
        const Rhs got = euclidean_rhs(s, p);
        const Rhs want = oracle_flat_rhs(s, p, false);
        CHECK((got.dx - want.dx).lpNorm<Eigen::Infinity>() <= 1e-13);
        CHECK((got.dw - want.dw).lpNorm<Eigen::Infinity>() <= 1e-14 *
                  std::max(1.0, want.dw.lpNorm<Eigen::Infinity>()));
    }
}

TEST_CASE("classical rhs matches oracle and the infinite-c model") {
    Rng rng(41);
    for (int trial = 0; trial < 25; ++trial) {
        ModelParams p = make_params(3, 2, INFINITY, 1.0, 0.5, 0.8);
        const SystemState s = random_state(rng, 3, 2, 1.5, 0.5);
        const Rhs got = classical_rhs(s, p);
        const Rhs want = oracle_flat_rhs(s, p, true);
        CHECK((got.dw - want.dw).lpNorm<Eigen::Infinity>() <= 1e-14 *
                  std::max(1.0, want.dw.lpNorm<Eigen::Infinity>()));
        const Rhs viac = euclidean_rhs(s, p);  // infinite c in params
        CHECK((got.dw - viac.dw).lpNorm<Eigen::Infinity>() == 0.0);
        CHECK((got.dx - viac.dx).lpNorm<Eigen::Infinity>() == 0.0);
    }
}

TEST_CASE("antisymmetric head-on pair") {
    ModelParams p = make_params(2, 1, INFINITY, 0.5, 0.5, 0.5);
    SystemState s;
    s.x.resize(2, 1);
    s.x << -1, 1;
    s.w.resize(2, 1);
    s.w << 1, -1;
    const Rhs r = classical_rhs(s, p);
    CHECK((r.dw.row(0) + r.dw.row(1)).norm() <= 1e-16);
}

TEST_CASE("collision guard") {
    ModelParams p = make_params(2, 2, INFINITY, 1.0, 1.0, 1.0);
    SystemState s;
    s.x.resize(2, 2);
    s.x << 0, 0, 1e-9, 0;
    s.w = Eigen::MatrixXd::Zero(2, 2);
    CHECK_THROWS_AS(euclidean_rhs(s, p), CollisionError);
    // Pure alignment has no singular denominator.
    p.kappa1 = p.kappa2 = 0.0;
    CHECK_NOTHROW(euclidean_rhs(s, p));
}

TEST_CASE("classical limit of the relativistic rhs") {
    Rng rng(43);
    const SystemState s = random_state(rng, 4, 2, 1.5, 0.4);
    ModelParams base = make_params(4, 2, INFINITY, 1.0, 0.8, 0.9);
    const Rhs classical = classical_rhs(s, base);
    std::vector<double> cs{10, 20, 40, 80};
    std::vector<double> gaps;
    for (double c : cs) {
        ModelParams p = base;
        p.c = SpeedOfLight::finite(c);
        const Rhs rel = euclidean_rhs(s, p);
        gaps.push_back((rel.dw - classical.dw).lpNorm<Eigen::Infinity>() +
                       (rel.dx - classical.dx).lpNorm<Eigen::Infinity>());
    }
    CHECK(fit_loglog_slope(cs, gaps) == doctest::Approx(-2.0).epsilon(0.1));
}

TEST_CASE("permutation equivariance") {
    Rng rng(47);
    ModelParams p = make_params(4, 2, 5.0, 1.0, 0.7, 1.3);
    const SystemState s = random_state(rng, 4, 2, 1.5, 0.4);
    const Rhs r = euclidean_rhs(s, p);
    // Swap particles 1 and 3 (targets here are exchangeable).
    SystemState sp = s;
    sp.x.row(1).swap(sp.x.row(3));
    sp.w.row(1).swap(sp.w.row(3));
    const Rhs rp = euclidean_rhs(sp, p);
    CHECK((rp.dw.row(1) - r.dw.row(3)).norm() <= 1e-14);
    CHECK((rp.dw.row(3) - r.dw.row(1)).norm() <= 1e-14);
    CHECK((rp.dw.row(0) - r.dw.row(0)).norm() <= 1e-14);
}

TEST_CASE("force decomposition recomposes the rhs") {
    Rng rng(53);
    ModelParams p = make_params(3, 2, 4.0, 1.0, 0.9, 1.1);
    const SystemState s = random_state(rng, 3, 2, 1.5, 0.4);
    const Rhs r = euclidean_rhs(s, p);
    for (int i = 0; i < 3; ++i) {
        const ForceDecomposition fd = force_decomposition(s, p, i);
        CHECK((fd.total() - r.dw.row(i).transpose()).lpNorm<Eigen::Infinity>() <= 1e-13);
    }
    // kappa1 = kappa2 = 0 kills the bonding terms.
    ModelParams align_only = make_params(3, 2, 4.0, 1.0, 0.0, 0.0);
    const ForceDecomposition fd0 = force_decomposition(s, align_only, 0);
    CHECK(fd0.velocity_bonding.norm() == 0.0);
    CHECK(fd0.spring_bonding.norm() == 0.0);
    // Equal velocities kill alignment and velocity bonding.
    SystemState eq = s;
    for (int i = 0; i < 3; ++i) eq.w.row(i) = s.w.row(0);
    const ForceDecomposition fde = force_decomposition(eq, p, 1);
    CHECK(fde.alignment.norm() <= 1e-15);
    CHECK(fde.velocity_bonding.norm() <= 1e-15);
}

TEST_CASE("kappa2 scales only the spring term") {
    Rng rng(59);
    ModelParams p = make_params(3, 2, 4.0, 1.0, 0.9, 1.1);
    const SystemState s = random_state(rng, 3, 2, 1.5, 0.4);
    const ForceDecomposition fd1 = force_decomposition(s, p, 0);
    ModelParams p2 = p;
    p2.kappa2 *= 3.0;
    const ForceDecomposition fd3 = force_decomposition(s, p2, 0);
    CHECK((fd3.spring_bonding - 3.0 * fd1.spring_bonding).norm() <= 1e-14);
    CHECK((fd3.alignment - fd1.alignment).norm() == 0.0);
    CHECK((fd3.velocity_bonding - fd1.velocity_bonding).norm() == 0.0);
}

TEST_CASE("manifold rhs reduces to the euclidean rhs on the flat backend") {
    Rng rng(61);
    auto eu = GeometryBackend::euclidean(2);
    ModelParams p = make_params(4, 2, 5.0, 1.0, 0.8, 1.0);
    const SystemState s = random_state(rng, 4, 2, 1.5, 0.4);
    const Rhs flat = euclidean_rhs(s, p);
    const Rhs mani = manifold_rhs(eu, s, p);
    CHECK((flat.dx - mani.dx).lpNorm<Eigen::Infinity>() <= 1e-13);
    CHECK((flat.dw - mani.dw).lpNorm<Eigen::Infinity>() <= 1e-13);
}

TEST_CASE("manifold rhs on the sphere") {
    auto sp = GeometryBackend::sphere(2, 1.0);

    // Two-body equilibrium: distance at target, transported velocities equal.
    ModelParams p = make_params(2, 2, 5.0, 1.0, 1.0, 1.0);
    SystemState s;
    s.x.resize(2, 3);
    s.w.resize(2, 3);
    const double a = 0.5;
    s.x.row(0) = Eigen::RowVector3d(std::sin(a), 0, std::cos(a));
    s.x.row(1) = Eigen::RowVector3d(-std::sin(a), 0, std::cos(a));
    Eigen::MatrixXd t(2, 2);
    const double dist = sp.geodesic_distance({s.x.row(0).transpose()}, {s.x.row(1).transpose()});
    t << 0, dist, dist, 0;
    p.targets = TargetDistances(t);
    // A momentum along the connecting geodesic transports onto its mirror.
    const ManifoldPoint x0{s.x.row(0).transpose()}, x1{s.x.row(1).transpose()};
    const TangentVector w0 = sp.log_map(x0, x1);
    s.w.row(0) = (0.3 / w0.ambient.norm()) * w0.ambient.transpose();
    s.w.row(1) =
        sp.parallel_transport(x0, x1, {x0.ambient, s.w.row(0).transpose()}).ambient.transpose();
    const Rhs r = manifold_rhs(sp, s, p);
    CHECK(r.dw.lpNorm<Eigen::Infinity>() <= 1e-13);

    // Tangency of outputs on random states.
    Rng rng(67);
    for (int trial = 0; trial < 20; ++trial) {
        SystemState q;
        q.x.resize(3, 3);
        q.w.resize(3, 3);
        for (int i = 0; i < 3; ++i) {
            Eigen::Vector3d dir(rng.normal(), rng.normal(), rng.normal());
            dir.normalize();
            q.x.row(i) = dir.transpose();
            const ManifoldPoint xi{q.x.row(i).transpose()};
            Eigen::Vector3d wa(rng.normal(), rng.normal(), rng.normal());
            q.w.row(i) = sp.project_tangent(xi, 0.2 * wa).ambient.transpose();
        }
        ModelParams pr = make_params(3, 2, 5.0, 1.0, 0.5, 0.7);
        Eigen::MatrixXd tt = Eigen::MatrixXd::Constant(3, 3, 1.0);
        tt.diagonal().setZero();
        pr.targets = TargetDistances(tt);
        bool admissible = true;
        for (int i = 0; i < 3 && admissible; ++i)
            for (int j = i + 1; j < 3 && admissible; ++j) {
                try {
                    const double dd = sp.geodesic_distance({q.x.row(i).transpose()},
                                                           {q.x.row(j).transpose()});
                    if (dd < 0.05 || dd > 2.9) admissible = false;
                } catch (const AntipodalError&) {
                    admissible = false;
                }
            }
        if (!admissible) continue;
        const Rhs rr = manifold_rhs(sp, q, pr);
        for (int i = 0; i < 3; ++i) {
            const ManifoldPoint xi{q.x.row(i).transpose()};
            CHECK(sp.tangency_residual(xi, rr.dw.row(i).transpose()) <= 1e-10);
            CHECK(sp.tangency_residual(xi, rr.dx.row(i).transpose()) <= 1e-10);
        }
    }
}

TEST_CASE("manifold rhs matches an independent assembly with ODE transport") {
    // Independent assembly: same formulas written directly against the
    // backend primitives, but with parallel transport replaced by numerical
    // integration of the parallel field equation.
    auto sp = GeometryBackend::sphere(2, 1.0);
    Rng rng(71);
    ModelParams p = make_params(3, 2, 4.0, 0.9, 0.6, 0.8);
    Eigen::MatrixXd tt = Eigen::MatrixXd::Constant(3, 3, 0.8);
    tt.diagonal().setZero();
    p.targets = TargetDistances(tt);

    auto ode_transport = [&](const ManifoldPoint& from, const ManifoldPoint& to,
                             const Eigen::VectorXd& u0) {
        Eigen::VectorXd pos = from.ambient;
        Eigen::VectorXd vel = sp.log_map(from, to).ambient;
        Eigen::VectorXd f = u0;
        const int steps = 4000;
        const double h = 1.0 / steps;
        auto acc = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& v) {
            return Eigen::VectorXd(-(v.dot(v)) * x);
        };
        auto rate = [&](const Eigen::VectorXd& x, const Eigen::VectorXd& v,
                        const Eigen::VectorXd& g) { return Eigen::VectorXd(-(v.dot(g)) * x); };
        for (int s2 = 0; s2 < steps; ++s2) {
            const Eigen::VectorXd k1p = vel, k1v = acc(pos, vel), k1f = rate(pos, vel, f);
            const Eigen::VectorXd p2 = pos + 0.5 * h * k1p, v2 = vel + 0.5 * h * k1v,
                                  f2 = f + 0.5 * h * k1f;
            const Eigen::VectorXd k2p = v2, k2v = acc(p2, v2), k2f = rate(p2, v2, f2);
            const Eigen::VectorXd p3 = pos + 0.5 * h * k2p, v3 = vel + 0.5 * h * k2v,
                                  f3 = f + 0.5 * h * k2f;
            const Eigen::VectorXd k3p = v3, k3v = acc(p3, v3), k3f = rate(p3, v3, f3);
            const Eigen::VectorXd p4 = pos + h * k3p, v4 = vel + h * k3v, f4 = f + h * k3f;
            const Eigen::VectorXd k4p = v4, k4v = acc(p4, v4), k4f = rate(p4, v4, f4);
            pos += h / 6.0 * (k1p + 2 * k2p + 2 * k3p + k4p);
            vel += h / 6.0 * (k1v + 2 * k2v + 2 * k3v + k4v);
            f += h / 6.0 * (k1f + 2 * k2f + 2 * k3f + k4f);
        }
        return f;
    };

    for (int trial = 0; trial < 5; ++trial) {
        SystemState s;
        s.x.resize(3, 3);
        s.w.resize(3, 3);
        Eigen::Vector3d north(0, 0, 1);
        for (int i = 0; i < 3; ++i) {
            Eigen::Vector3d u(rng.normal(), rng.normal(), 0.0);
            u *= rng.uniform(0.25, 0.6) / u.norm();
            const ManifoldPoint xi = sp.exp_map({north}, {north, u});
            s.x.row(i) = xi.ambient.transpose();
            Eigen::Vector3d wa(rng.normal(), rng.normal(), rng.normal());
            s.w.row(i) = sp.project_tangent(xi, 0.25 * wa).ambient.transpose();
        }
        Rhs got;
        try {
            got = manifold_rhs(sp, s, p);
        } catch (const CollisionError&) {
            continue;
        }

        // Oracle assembly.
        Eigen::MatrixXd v(3, 3);
        for (int i = 0; i < 3; ++i) {
            const ManifoldPoint xi{s.x.row(i).transpose()};
            const double wn = std::sqrt(s.w.row(i).dot(s.w.row(i)));
            if (wn > 0) {
                v.row(i) = (invert_momentum_norm(wn, p.c) / wn) * s.w.row(i);
            } else {
                v.row(i) = s.w.row(i);
            }
        }
        for (int i = 0; i < 3; ++i) {
            const ManifoldPoint xi{s.x.row(i).transpose()};
            Eigen::VectorXd acc = Eigen::VectorXd::Zero(3);
            for (int j = 0; j < 3; ++j) {
                if (j == i) continue;
                const ManifoldPoint xj{s.x.row(j).transpose()};
                const double dij = sp.geodesic_distance(xi, xj);
                const Eigen::VectorXd pv = ode_transport(xj, xi, v.row(j).transpose());
                const Eigen::VectorXd rel = pv - v.row(i).transpose();
                acc += (p.kappa0 / 3.0) * kernel_eval(p.kernel, dij) * rel;
                const Eigen::VectorXd dir = sp.log_map(xi, xj).ambient / dij;
                const double bracket =
                    p.kappa1 * rel.dot(dir) + p.kappa2 * (dij - p.targets(i, j));
                acc += (bracket / 6.0) * dir;
            }
            CHECK((got.dw.row(i).transpose() - acc).lpNorm<Eigen::Infinity>() <= 1e-8);
        }
    }
}
