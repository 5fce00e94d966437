#ifndef RCSBF_TRAJECTORY_ANALYSIS_HPP
#define RCSBF_TRAJECTORY_ANALYSIS_HPP

#include "rcsbf/integrate.hpp"

namespace rcsbf {

// Deviation between a relativistic and a classical trajectory on a shared
// time grid: D(t) = sum_i |x_i^c - x_i^inf|^2 + |w_i^c - w_i^inf|^2.
struct DeviationSeries {
    std::vector<double> times;
    std::vector<double> D;
    double sup_D = 0.0;
};

// Max over records of |E(t) + integral_0^t P - E(0)| / max(1, E(0)), with
// the production integral accumulated by Simpson's rule on the recorded
// grid (requires a uniform record spacing).
double energy_identity_residual(const Trajectory& traj);

DeviationSeries deviation(const Trajectory& traj_c, const Trajectory& traj_inf);

}  // namespace rcsbf

#endif  // RCSBF_TRAJECTORY_ANALYSIS_HPP
