#ifndef RCSBF_NUMERICS_HPP
#define RCSBF_NUMERICS_HPP

#include <cstdint>
#include <functional>
#include <vector>

namespace rcsbf {

// Adaptive Simpson quadrature of f on [a, b] to absolute tolerance tol.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-10);

// Cumulative integral of uniformly sampled values (spacing h), fourth-order
// accurate at every node: I[k] = integral of the interpolant over [t0, tk].
// Returns a vector the same length as values (I[0] = 0).
std::vector<double> cumulative_integral(const std::vector<double>& values, double h);

// Least-squares slope of log(y) against log(x). All entries must be > 0.
double fit_loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

// Deterministic random helpers built on a fixed 64-bit generator so that
// seeded scenarios are reproducible across platforms and library versions.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    // Uniform on [0, 1).
    double uniform();
    double uniform(double a, double b);
    // Standard normal via Box-Muller.
    double normal();
    double normal(double mean, double sigma);

private:
    std::uint64_t next_u64();
    std::uint64_t state_[4];
    bool has_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace rcsbf

#endif  // RCSBF_NUMERICS_HPP
