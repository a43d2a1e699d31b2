#pragma once

#include <string>
#include <vector>

#include "blowup/errors.hpp"

namespace blowup {

/// Closed orbit of -(g(F''))'' - F + |F|^n F = 0 about the equilibrium
/// `about`, started at its extremum nearest to zero.
struct PeriodicOrbit {
    double n = 0.0;
    double eps = 0.0;
    int about = 1;
    double a = 0.0;       // F(0)
    double b = 0.0;       // F''(0)
    double period = 0.0;
    double min_val = 0.0;
    double max_val = 0.0;
    double energy = 0.0;  // first integral on the orbit
    double closure = 0.0; // max-norm jet mismatch after one period
    int iterations = 0;
    std::vector<double> samples;  // F at period * k / (samples.size() - 1)

    double value_at(double t) const;  // periodic, linear between samples
};

class ShootingError : public ComputeError {
public:
    enum class Kind { no_closure, escaped, diverged };
    ShootingError(Kind k, const std::string& msg) : ComputeError(msg), kind(k) {}
    Kind kind;
};

struct ShootOptions {
    double eps = 0.0;
    double rtol = 1e-12;
    double atol = 1e-14;
    int max_iters = 50;
    double tol = 1e-11;
    double t_max = 200.0;
    int samples = 2001;
};

/// First integral H = -G'F' + G F'' - Phi(F'') - F^2/2 + |F|^{n+2}/(n+2), G = g(F'').
double orbit_energy(double n, double eps, double F, double F1, double F2, double G1);

/// Shoots from (a, 0, b, 0) and adjusts (a, b) so the orbit is symmetric
/// about its first opposite extremum and lies on the level H = 0.
/// b_init <= 0 picks b from the H = 0 relation at the given a.
PeriodicOrbit shoot_periodic_full(double n, int about, double a_init, double b_init,
                                  const ShootOptions& opts = {});

}  // namespace blowup
