#ifndef RCSBF_INTEGRATE_HPP
#define RCSBF_INTEGRATE_HPP

#include <optional>
#include <vector>

#include "rcsbf/diagnostics.hpp"
#include "rcsbf/dynamics.hpp"

namespace rcsbf {

struct StepperConfig {
    enum class Scheme { RK4, Euler };

    Scheme scheme = Scheme::RK4;
    double dt = 1e-3;
    double t_end = 1.0;
    double collision_epsilon = kCollisionEps;
    int record_stride = 1;

    void validate() const;
};

struct Termination {
    enum class Kind { Completed, CollisionDetected, InjectivityViolated };

    Kind kind = Kind::Completed;
    double t = 0.0;   // event time for non-Completed outcomes
    int pair_i = -1;
    int pair_j = -1;
};

// Time-indexed states plus per-record diagnostics. The parallel vectors
// share one index; times are strictly increasing.
struct Trajectory {
    std::vector<double> times;
    std::vector<SystemState> states;
    std::vector<EnergyReport> energies;
    std::vector<FlockingReport> flockings;
    Termination termination;

    std::size_t record_count() const { return times.size(); }
    const SystemState& final_state() const { return states.back(); }
};

// One fixed-step update of a Euclidean (or classical, via infinite c) state.
SystemState step_euclidean(const SystemState& s, const ModelParams& p, double dt,
                           StepperConfig::Scheme scheme = StepperConfig::Scheme::RK4,
                           bool classical = false);

// One fixed-step update on a manifold: ambient stepping with tangent-space
// corrections at the stages and a projection retraction afterwards.
SystemState step_manifold(const GeometryBackend& b, const SystemState& s, const ModelParams& p,
                          double dt, StepperConfig::Scheme scheme = StepperConfig::Scheme::RK4);

// Integrate until t_end or a termination event, recording state plus
// diagnostics every record_stride steps. Collision events are localized by
// bisection to within dt / 2^10.
Trajectory simulate(const SystemState& s0, const ModelParams& p, const StepperConfig& cfg,
                    const GeometryBackend* b = nullptr, bool classical = false);

}  // namespace rcsbf

#endif  // RCSBF_INTEGRATE_HPP
