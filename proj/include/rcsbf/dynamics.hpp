#ifndef RCSBF_DYNAMICS_HPP
#define RCSBF_DYNAMICS_HPP

#include <Eigen/Dense>

#include "rcsbf/geometry.hpp"
#include "rcsbf/relkin.hpp"

namespace rcsbf {

// Two particles closer than this make the unit vector x_ji/r_ji numerically
// meaningless; the bonding terms refuse to evaluate below it.
constexpr double kCollisionEps = 1e-8;

// Communication weight phi: bounded, nonnegative, locally Lipschitz.
struct KernelSpec {
    enum class Kind { CuckerSmale, Constant };

    static KernelSpec cucker_smale(double beta);
    static KernelSpec constant(double phi0);

    Kind kind = Kind::CuckerSmale;
    double beta = 0.0;   // CuckerSmale: phi(r) = (1 + r^2)^(-beta)
    double phi0 = 1.0;   // Constant: phi(r) = phi0

    bool operator==(const KernelSpec& o) const {
        return kind == o.kind && beta == o.beta && phi0 == o.phi0;
    }
};

double kernel_eval(const KernelSpec& k, double r);

// Exact minimum of phi on [0, r_max] (both kinds are monotone).
double kernel_min_on(const KernelSpec& k, double r_max);

// Symmetric matrix of preassigned asymptotic relative distances, zero on
// the diagonal.
struct TargetDistances {
    explicit TargetDistances(Eigen::MatrixXd m = {});

    const Eigen::MatrixXd& matrix() const { return m_; }
    double operator()(int i, int j) const { return m_(i, j); }
    int size() const { return static_cast<int>(m_.rows()); }

    double min_offdiag() const;
    double max_offdiag() const;

    bool operator==(const TargetDistances& o) const { return m_ == o.m_; }

private:
    Eigen::MatrixXd m_;
};

struct ModelParams {
    SpeedOfLight c = SpeedOfLight::infinite();
    double kappa0 = 0.0;
    double kappa1 = 0.0;
    double kappa2 = 0.0;
    TargetDistances targets;
    KernelSpec kernel;
    int N = 0;
    int d = 0;

    void validate() const;
};

// Phase state: one row per particle. Euclidean runs use d columns; manifold
// runs use the backend's ambient dimension, with each momentum row tangent
// at the matching position row.
struct SystemState {
    Eigen::MatrixXd x;
    Eigen::MatrixXd w;
    double t = 0.0;

    int particle_count() const { return static_cast<int>(x.rows()); }
};

// The three force terms acting on one particle: velocity alignment,
// radial velocity bonding, and the spring toward target distances.
struct ForceDecomposition {
    Eigen::VectorXd alignment;
    Eigen::VectorXd velocity_bonding;
    Eigen::VectorXd spring_bonding;

    Eigen::VectorXd total() const { return alignment + velocity_bonding + spring_bonding; }
};

struct Rhs {
    Eigen::MatrixXd dx;
    Eigen::MatrixXd dw;
};

// Momentum-variable Cucker-Smale system with bonding force on R^d.
Rhs euclidean_rhs(const SystemState& s, const ModelParams& p);

// Classical model: identical structure with the momentum map replaced by
// the identity (w == v).
Rhs classical_rhs(const SystemState& s, const ModelParams& p);

// Manifold variant: dx is the tangent velocity, dw the covariant
// derivative value (tangent at each x_i).
Rhs manifold_rhs(const GeometryBackend& b, const SystemState& s, const ModelParams& p);

// Per-particle split of the momentum right-hand side. Pass the backend for
// manifold states; classical selects the identity momentum map.
ForceDecomposition force_decomposition(const SystemState& s, const ModelParams& p, int i,
                                       const GeometryBackend* b = nullptr,
                                       bool classical = false);

// Velocities v_i = vhat(w_i) for a Euclidean state (classical: v = w).
Eigen::MatrixXd euclidean_velocities(const SystemState& s, const ModelParams& p,
                                     bool classical = false);

// Tangent velocities for a manifold state; the momentum map acts on the
// metric norm of each w_i.
Eigen::MatrixXd manifold_velocities(const GeometryBackend& b, const SystemState& s,
                                    const ModelParams& p);

}  // namespace rcsbf

#endif  // RCSBF_DYNAMICS_HPP
