#ifndef RCSBF_SCENARIO_HPP
#define RCSBF_SCENARIO_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "rcsbf/integrate.hpp"
#include "rcsbf/trajectory_analysis.hpp"

namespace rcsbf {

// Declarative description of a run: what to simulate, with which model
// parameters and stepper settings. Seeded generation keeps every scenario
// reproducible; parse/serialize in io.hpp map this 1:1 onto config files.
struct ScenarioSpec {
    enum class Kind { Pattern, CollisionExample, Flocking, LimitSweep, Manifold };

    Kind kind = Kind::Flocking;
    ModelParams params;
    StepperConfig stepper;
    std::uint64_t seed = 0;

    // Pattern: targets realized from pairwise distances of these points;
    // initial positions are the points plus jitter.
    std::vector<Eigen::VectorXd> pattern_points;
    double pattern_position_jitter = 0.05;
    double pattern_velocity_scale = 0.05;

    // CollisionExample (N = 2, d = 1, classical).
    double collision_R = 2.0;
    double collision_x1 = -0.5, collision_x2 = 0.5;
    double collision_v1 = 1.0, collision_v2 = -1.0;

    // Flocking: seeded random positions and exactly recentered momenta.
    double flocking_box = 2.0;
    double flocking_momentum_scale = 0.2;
    double flocking_min_separation = 0.1;
    double flocking_target_distance = 2.0;

    // Manifold runs; explicit initial data win over seeded generation.
    std::optional<GeometryBackend> backend;
    std::optional<Eigen::MatrixXd> initial_x;
    std::optional<Eigen::MatrixXd> initial_w;
    double manifold_cap_radius = 0.7;
    double manifold_momentum_scale = 0.1;

    // LimitSweep: relativistic runs at each c against a classical reference.
    std::vector<double> sweep_cs;
    std::shared_ptr<ScenarioSpec> sweep_base;
};

// Materialized scenario: concrete initial state, fully populated params
// (targets filled in when the spec derives them), and an optional backend.
struct ScenarioRuntime {
    SystemState initial_state;
    ModelParams params;
    std::optional<GeometryBackend> backend;
    bool classical = false;
};

// R_ij = |p_i - p_j| for >= 2 pairwise-distinct points.
TargetDistances build_pattern_targets(const std::vector<Eigen::VectorXd>& points);

// Two-particle classical scenario whose initial data provably lead to a
// finite-time collision; the four admissibility clauses are verified
// numerically at build time (quadrature of the kernel primitive).
ScenarioSpec build_collision_example(double R, double kappa0, double kappa1, double kappa2);

// Checks the four clauses of the collision construction for an arbitrary
// collision spec; throws ConditionError naming the violated clause.
void verify_collision_conditions(const ScenarioSpec& spec);

// Random zero-momentum-sum scenario satisfying the flocking hypotheses.
ScenarioSpec build_flocking_scenario(int N, int d, std::uint64_t seed, const ModelParams& p);

// Canned scenarios used by the CLI and the acceptance suite.
ScenarioSpec make_default_pattern_scenario(std::uint64_t seed);
ScenarioSpec make_default_collision_scenario();
ScenarioSpec make_default_flocking_scenario(std::uint64_t seed);
ScenarioSpec make_default_sphere_scenario(std::uint64_t seed);

// Deterministic initial data + final parameters for a spec.
ScenarioRuntime materialize(const ScenarioSpec& spec);

struct SweepResult {
    std::vector<double> cs;
    std::vector<double> sup_Ds;  // sup over the grid of the squared deviation
    double slope = 0.0;          // log-log rate of the deviation magnitude sqrt(sup_D)
};

// Runs a classical reference plus one relativistic trajectory per c on
// identical grids. Verifies the uniform-energy sweep condition at the
// smallest c before starting.
SweepResult run_limit_sweep(const ScenarioSpec& base, const std::vector<double>& cs, double T);

}  // namespace rcsbf

#endif  // RCSBF_SCENARIO_HPP
