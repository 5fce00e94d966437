#ifndef RCSBF_DIAGNOSTICS_HPP
#define RCSBF_DIAGNOSTICS_HPP

#include <optional>

#include "rcsbf/dynamics.hpp"

namespace rcsbf {

struct EnergyReport {
    double kinetic = 0.0;     // >= N
    double potential = 0.0;   // >= 0
    double total = 0.0;       // kinetic + potential
    double production = 0.0;  // >= 0
};

struct FlockingReport {
    double max_rel_speed = 0.0;  // max_{i,j} |v_i - v_j| (transported on manifolds)
    double min_pair_dist = 0.0;
    double max_pair_dist = 0.0;
    double momentum_sum_norm = 0.0;  // |sum_i w_i| in ambient coordinates
};

struct AdmissibilityReport {
    double r_lower = 0.0;
    double r_upper = 0.0;
    bool collision_avoidance_ok = false;
    bool flocking_hypotheses_ok = false;
    std::optional<bool> manifold_wellposed_ok;  // empty = not applicable
};

// Sum of per-particle relativistic kinetic energies. Pass the backend for
// manifold states (metric norms); classical selects the identity map.
double kinetic_energy(const SystemState& s, const ModelParams& p,
                      const GeometryBackend* b = nullptr, bool classical = false);

// (kappa2 / 8N) sum over ordered pairs of (r_ij - R_ij)^2.
double potential_energy(const SystemState& s, const ModelParams& p,
                        const GeometryBackend* b = nullptr);

// Nonnegative dissipation rate: alignment term plus radial bonding term.
double energy_production(const SystemState& s, const ModelParams& p,
                         const GeometryBackend* b = nullptr, bool classical = false);

EnergyReport energy_report(const SystemState& s, const ModelParams& p,
                           const GeometryBackend* b = nullptr, bool classical = false);

FlockingReport flocking_metrics(const SystemState& s, const GeometryBackend* b = nullptr,
                                const ModelParams* p = nullptr, bool classical = false);

// Lower/upper pairwise-distance bounds from the initial total energy.
std::pair<double, double> distance_bounds(const ModelParams& p, double initial_energy);

// Strict sufficient condition ruling out finite-time collisions.
bool check_collision_avoidance(const ModelParams& p, double initial_energy);

// Hypotheses of the asymptotic-flocking theorem for given initial data.
bool check_flocking_hypotheses(const ModelParams& p, const SystemState& s0, double r_upper);

// Global well-posedness condition on a manifold: target distances below the
// injectivity radius plus a strict energy bound.
bool check_manifold_wellposedness(const GeometryBackend& b, const ModelParams& p,
                                  double initial_energy);

// Full admissibility summary computed from the supplied initial state.
AdmissibilityReport admissibility_report(const SystemState& s0, const ModelParams& p,
                                         const GeometryBackend* b = nullptr,
                                         bool classical = false);

}  // namespace rcsbf

#endif  // RCSBF_DIAGNOSTICS_HPP
