#include "rcsbf/relkin.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace rcsbf {

namespace {

void check_subluminal(double speed, const SpeedOfLight& c, const char* what) {
    if (c.is_infinite()) return;
    if (!(speed < c.value())) {
        throw DomainError(std::string(what) + ": speed " + std::to_string(speed) +
                          " not below c = " + std::to_string(c.value()));
    }
}

}  // namespace

SpeedOfLight SpeedOfLight::finite(double c) {
    if (!(c > 0.0) || !std::isfinite(c)) {
        throw ParamError("speed of light must be a positive finite real");
    }
    return SpeedOfLight(c, false);
}

SpeedOfLight SpeedOfLight::infinite() {
    return SpeedOfLight(std::numeric_limits<double>::infinity(), true);
}

double SpeedOfLight::value() const {
    if (infinite_) throw ParamError("value() called on infinite speed of light");
    return value_;
}

double lorentz_factor(double speed, const SpeedOfLight& c) {
    if (c.is_infinite()) return 1.0;
    check_subluminal(speed, c, "lorentz_factor");
    const double beta = speed / c.value();
    return 1.0 / std::sqrt((1.0 - beta) * (1.0 + beta));
}

double momentum_factor(double speed, const SpeedOfLight& c) {
    if (c.is_infinite()) return 1.0;
    check_subluminal(speed, c, "momentum_factor");
    const double gamma = lorentz_factor(speed, c);
    const double c2 = c.value() * c.value();
    return gamma * (1.0 + gamma / c2);
}

Momentum to_momentum(const Velocity& v, const SpeedOfLight& c) {
    if (c.is_infinite()) return v;
    const double speed = v.norm();
    check_subluminal(speed, c, "to_momentum");
    return momentum_factor(speed, c) * v;
}

double invert_momentum_norm(double w_norm, const SpeedOfLight& c) {
    if (c.is_infinite()) return w_norm;
    if (w_norm == 0.0) return 0.0;
    if (!std::isfinite(w_norm) || w_norm < 0.0) {
        throw DomainError("invert_momentum_norm: momentum norm must be finite and nonnegative");
    }

    const double cv = c.value();
    const double c2 = cv * cv;

    // g(s) = F(s) s is smooth and strictly increasing on [0, c), with
    // g(0) = 0 and g -> infinity at s -> c-.
    auto g_and_dg = [&](double s, double& g, double& dg) {
        const double beta = s / cv;
        const double gamma = 1.0 / std::sqrt((1.0 - beta) * (1.0 + beta));
        const double f = gamma * (1.0 + gamma / c2);
        const double dgamma = s * gamma * gamma * gamma / c2;
        g = f * s;
        dg = f + s * dgamma * (1.0 + 2.0 * gamma / c2);
    };

    double lo = 0.0;
    double hi = cv * (1.0 - 1e-16);
    // Classical guess w/F(0); accurate for |w| << c.
    double s = std::min(w_norm / (1.0 + 1.0 / c2), 0.5 * (lo + hi));

    const double tol = 1e-14;
    for (int it = 0; it < 200; ++it) {
        double g, dg;
        g_and_dg(s, g, dg);
        const double resid = g - w_norm;
        if (resid > 0.0) {
            hi = s;
        } else {
            lo = s;
        }
        double step = resid / dg;
        double s_next = s - step;
        if (!(s_next > lo) || !(s_next < hi)) {
            s_next = 0.5 * (lo + hi);  // bisection fallback keeps the bracket
        }
        const double ds = std::abs(s_next - s);
        s = s_next;
        if (ds <= tol * (1.0 + std::abs(s))) return s;
    }
    throw ConvergenceError("invert_momentum_norm: Newton/bisection did not converge");
}

Velocity to_velocity(const Momentum& w, const SpeedOfLight& c) {
    if (c.is_infinite()) return w;
    const double w_norm = w.norm();
    if (w_norm == 0.0) return Velocity::Zero(w.size());
    const double s = invert_momentum_norm(w_norm, c);
    return (s / w_norm) * w;
}

double particle_kinetic_energy_from_speed(double speed, const SpeedOfLight& c) {
    if (c.is_infinite()) return 0.5 * speed * speed + 1.0;
    check_subluminal(speed, c, "particle_kinetic_energy");
    const double gamma = lorentz_factor(speed, c);
    // c^2 (Gamma - 1) = |v|^2 Gamma^2 / (Gamma + 1), avoiding cancellation
    // at small speeds.
    const double rest_term = speed * speed * gamma * gamma / (gamma + 1.0);
    return rest_term + gamma * gamma - std::log(gamma);
}

double particle_kinetic_energy(const Velocity& v, const SpeedOfLight& c) {
    return particle_kinetic_energy_from_speed(v.norm(), c);
}

}  // namespace rcsbf
