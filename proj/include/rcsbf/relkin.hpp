#ifndef RCSBF_RELKIN_HPP
#define RCSBF_RELKIN_HPP

#include <Eigen/Dense>

#include "rcsbf/errors.hpp"

namespace rcsbf {

using Vec = Eigen::VectorXd;

// Velocities live in the open ball of radius c, momenta are unconstrained.
using Velocity = Eigen::VectorXd;
using Momentum = Eigen::VectorXd;

// Speed of light. The infinite value selects the classical model (w == v)
// exactly instead of approximating it with a huge float.
class SpeedOfLight {
public:
    static SpeedOfLight finite(double c);
    static SpeedOfLight infinite();

    bool is_infinite() const { return infinite_; }

    // Finite value; calling this on the infinite instance is a bug.
    double value() const;

    bool operator==(const SpeedOfLight& o) const {
        return infinite_ == o.infinite_ && (infinite_ || value_ == o.value_);
    }

private:
    SpeedOfLight(double v, bool inf) : value_(v), infinite_(inf) {}
    double value_ = 0.0;
    bool infinite_ = false;
};

// Gamma(v) = 1/sqrt(1 - s^2/c^2). Returns 1 exactly for infinite c.
double lorentz_factor(double speed, const SpeedOfLight& c);

// F(v) = Gamma (1 + Gamma/c^2), the scalar factor of the momentum map.
double momentum_factor(double speed, const SpeedOfLight& c);

// w = F(|v|) v.
Momentum to_momentum(const Velocity& v, const SpeedOfLight& c);

// Inverse of the momentum map: solves F(s) s = |w| for the speed s on
// [0, c), then rescales. Newton iteration with a bisection safeguard;
// tolerance 1e-14 relative on s.
Velocity to_velocity(const Momentum& w, const SpeedOfLight& c);

// Scalar version of the inverse map: the speed s with F(s) s = w_norm.
double invert_momentum_norm(double w_norm, const SpeedOfLight& c);

// c^2 (Gamma - 1) + Gamma^2 - log Gamma, always >= 1.
// For infinite c this is the classical limit |v|^2/2 + 1.
double particle_kinetic_energy_from_speed(double speed, const SpeedOfLight& c);
double particle_kinetic_energy(const Velocity& v, const SpeedOfLight& c);

}  // namespace rcsbf

#endif  // RCSBF_RELKIN_HPP
