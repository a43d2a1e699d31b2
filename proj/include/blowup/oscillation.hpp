#pragma once

#include <array>
#include <utility>
#include <vector>

namespace blowup {

/// Point of the oscillatory component phi(s), s = ln(distance to interface).
struct OscState {
    double s = 0.0;
    double phi = 0.0;
    double phi1 = 0.0;
    double phi2 = 0.0;
};

/// (phi', phi'', phi''') from (n+1)(delta^2 + P_2^2)^{n/2} P_3 = lambda_sign * phi.
std::array<double, 3> osc_rhs(const OscState& state, double n, double mu, int lambda_sign,
                              double delta);

struct OscTrajectory {
    std::vector<OscState> samples;
    OscState final_state;
    long steps = 0;
};

struct OscOptions {
    double tol = 1e-10;
    double delta = 1e-9;
};

/// Adaptive integration over span = (s0, s1), sampled at the given points.
/// Internally uses the flux variable psi = g_delta(P_2), which keeps the
/// right-hand side bounded where P_2 vanishes.
OscTrajectory integrate_osc(const OscState& init, double n, double mu, int lambda_sign,
                            std::pair<double, double> span, const std::vector<double>& sample_at,
                            const OscOptions& opts = {});

struct PeriodicComponent {
    double n = 0.0;
    double mu = 0.0;
    double period = 0.0;
    double amplitude = 0.0;
    double drift = 0.0;  // relative cycle-to-cycle change of the maxima
    std::vector<std::pair<double, double>> samples;  // one period of (s, phi)

    double value_at(double s) const;  // periodic extension, cubic interpolation
};

struct PeriodicSearchOptions {
    double span = 200.0;
    double max_span = 6400.0;
    double transient = 0.5;  // fraction of the span discarded
    int cycles = 5;
    double drift_tol = 1e-8;
    int samples = 1024;
    OscOptions ode{1e-12, 1e-9};
};

/// Stable sign-changing periodic component for lambda_sign = -1.
PeriodicComponent find_periodic_osc(double n, double mu, const OscState& init,
                                    const PeriodicSearchOptions& opts = {});

/// f(y) = (y0 - y)^mu phi_*(ln(y0 - y) + s_shift) for y in (0, y0).
std::vector<double> reconstruct_interface(const PeriodicComponent& pc, double y0, double s_shift,
                                          const std::vector<double>& y_samples);

}  // namespace blowup
