#include "rcsbf/trajectory_analysis.hpp"

#include <cmath>

#include "rcsbf/numerics.hpp"

namespace rcsbf {

double energy_identity_residual(const Trajectory& traj) {
    std::size_t n = traj.record_count();
    if (n < 2) return 0.0;
    const double h = traj.times[1] - traj.times[0];
    // Event-terminated runs append one record off the uniform grid; the
    // residual is evaluated on the uniform prefix.
    for (std::size_t k = 1; k + 1 < n; ++k) {
        if (std::abs((traj.times[k + 1] - traj.times[k]) - h) > 1e-9 * (1.0 + std::abs(h))) {
            n = k + 1;
            break;
        }
    }
    std::vector<double> production(n);
    for (std::size_t k = 0; k < n; ++k) production[k] = traj.energies[k].production;
    const std::vector<double> integral = cumulative_integral(production, h);

    const double e0 = traj.energies[0].total;
    const double scale = std::max(1.0, std::abs(e0));
    double worst = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        worst = std::max(worst, std::abs(traj.energies[k].total + integral[k] - e0) / scale);
    }
    return worst;
}

DeviationSeries deviation(const Trajectory& traj_c, const Trajectory& traj_inf) {
    if (traj_c.record_count() != traj_inf.record_count()) {
        throw GridMismatchError("deviation: trajectories have different record counts");
    }
    DeviationSeries out;
    out.times = traj_c.times;
    out.D.resize(traj_c.record_count());
    for (std::size_t k = 0; k < traj_c.record_count(); ++k) {
        if (std::abs(traj_c.times[k] - traj_inf.times[k]) > 1e-12 * (1.0 + traj_c.times[k])) {
            throw GridMismatchError("deviation: time grids differ");
        }
        const SystemState& a = traj_c.states[k];
        const SystemState& b = traj_inf.states[k];
        if (a.x.rows() != b.x.rows() || a.x.cols() != b.x.cols()) {
            throw GridMismatchError("deviation: state shapes differ");
        }
        const double dx = (a.x - b.x).squaredNorm();
        const double dw = (a.w - b.w).squaredNorm();
        out.D[k] = dx + dw;
        out.sup_D = std::max(out.sup_D, out.D[k]);
    }
    return out;
}

}  // namespace rcsbf
