#include "blowup/oscillation.hpp"

#include <algorithm>
#include <cmath>

#include "blowup/bvp.hpp"
#include "blowup/errors.hpp"
#include "blowup/model.hpp"
#include "blowup/numfmt.hpp"
#include "blowup/ode.hpp"

namespace blowup {

namespace {

using S3 = ode::State<3>;

void check_inputs(double n, double mu, int lambda_sign) {
    require(n > 0.0 && std::isfinite(n), "oscillation ODE needs n > 0");
    require(mu > 2.0 && std::isfinite(mu), "oscillation ODE needs mu > 2");
    require(lambda_sign == 1 || lambda_sign == -1, "lambda_sign must be +1 or -1");
}

// Flux variables scaled by the equilibrium magnitude phi_s so that every
// component is O(1): x = phi/phi_s, x1 = phi'/phi_s, z = psi/psi_s.
struct FluxSystem {
    double n, mu, lam, delta;
    double phi_s, psi_s;

    FluxSystem(double n_, double mu_, double lam_, double delta_)
        : n(n_), mu(mu_), lam(lam_), delta(delta_) {
        phi_s = osc_equilibrium(n, mu);
        psi_s = phi_s / ((n + 1.0) * (mu - 2.0));
    }

    double p2(double phi, double phi1, double phi2) const {
        return phi2 + (2.0 * mu - 1.0) * phi1 + mu * (mu - 1.0) * phi;
    }

    S3 to_flux(const OscState& x) const {
        return {x.phi / phi_s, x.phi1 / phi_s, flux(p2(x.phi, x.phi1, x.phi2), n, delta) / psi_s};
    }

    double phi(const S3& u) const { return u[0] * phi_s; }

    OscState from_flux(double s, const S3& u) const {
        const double P2 = flux_inverse(u[2] * psi_s, n, delta);
        const double f = u[0] * phi_s, f1 = u[1] * phi_s;
        return {s, f, f1, P2 - (2.0 * mu - 1.0) * f1 - mu * (mu - 1.0) * f};
    }

    S3 operator()(double, const S3& u) const {
        const double P2 = flux_inverse(u[2] * psi_s, n, delta) / phi_s;
        return {u[1], P2 - (2.0 * mu - 1.0) * u[1] - mu * (mu - 1.0) * u[0],
                (n + 1.0) * (mu - 2.0) * (lam * u[0] - u[2])};
    }
};

ode::Options ode_options(const OscOptions& o) {
    require(o.tol >= 1e-12 && o.tol <= 1e-6, "tol must lie in [1e-12, 1e-6]");
    require(o.delta > 0.0, "delta must be > 0");
    ode::Options opt;
    opt.rtol = o.tol;
    opt.atol = 1e-3 * o.tol;
    opt.h0 = 1e-3;
    opt.h_min = 1e-13;
    return opt;
}

}  // namespace

std::array<double, 3> osc_rhs(const OscState& x, double n, double mu, int lambda_sign, double delta) {
    check_inputs(n, mu, lambda_sign);
    require(delta > 0.0, "delta must be > 0");
    const auto c = pk_coefficients(3, mu);
    const double P2 = x.phi2 + (2.0 * mu - 1.0) * x.phi1 + mu * (mu - 1.0) * x.phi;
    const double lower = c[1] * x.phi2 + c[2] * x.phi1 + c[3] * x.phi;
    const double phi3 =
        lambda_sign * x.phi / ((n + 1.0) * std::pow(delta * delta + P2 * P2, 0.5 * n)) - lower;
    return {x.phi1, x.phi2, phi3};
}

OscTrajectory integrate_osc(const OscState& init, double n, double mu, int lambda_sign,
                            std::pair<double, double> span, const std::vector<double>& sample_at,
                            const OscOptions& opts) {
    check_inputs(n, mu, lambda_sign);
    require(std::isfinite(span.first) && std::isfinite(span.second) && span.second > span.first,
            "span must be finite and increasing");
    const auto opt = ode_options(opts);
    FluxSystem sys{n, mu, static_cast<double>(lambda_sign), opts.delta};
    std::vector<double> pts = sample_at;
    std::sort(pts.begin(), pts.end());
    OscTrajectory tr;
    std::size_t next = 0;
    while (next < pts.size() && pts[next] < span.first) ++next;
    const S3 u0 = sys.to_flux(init);
    const S3 u1 = ode::integrate<3>(sys, span.first, u0, span.second, opt, [&](const ode::Segment<3>& seg) {
        ++tr.steps;
        while (next < pts.size() && pts[next] <= seg.t1) {
            tr.samples.push_back(sys.from_flux(pts[next], seg.at(pts[next])));
            ++next;
        }
        return true;
    });
    tr.final_state = sys.from_flux(span.second, u1);
    return tr;
}

double PeriodicComponent::value_at(double s) const {
    const std::size_t M = samples.size();
    if (M < 4 || period <= 0.0) return 0.0;
    // samples cover [s0, s0 + period] with the endpoint repeated.
    const std::size_t m = M - 1;
    double u = std::fmod(s - samples.front().first, period);
    if (u < 0.0) u += period;
    const double x = u / period * static_cast<double>(m);
    std::size_t i = static_cast<std::size_t>(x);
    if (i >= m) i = m - 1;
    const double t = x - static_cast<double>(i);
    auto v = [&](long k) { return samples[static_cast<std::size_t>(((k % static_cast<long>(m)) + m) % m)].second; };
    const long k = static_cast<long>(i);
    const double p0 = v(k - 1), p1 = v(k), p2 = v(k + 1), p3 = v(k + 2);
    // Catmull-Rom cubic.
    return p1 + 0.5 * t * (p2 - p0 + t * (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3 + t * (3.0 * (p1 - p2) + p3 - p0)));
}

PeriodicComponent find_periodic_osc(double n, double mu, const OscState& init,
                                    const PeriodicSearchOptions& o) {
    check_inputs(n, mu, -1);
    require(o.cycles >= 5, "need at least 5 cycles for periodicity detection");
    require(o.transient >= 0.0 && o.transient < 1.0, "transient fraction must lie in [0, 1)");
    require(init.phi != 0.0 || init.phi1 != 0.0 || init.phi2 != 0.0, "init must be nonzero");
    const auto opt = ode_options(o.ode);
    FluxSystem sys{n, mu, -1.0, o.ode.delta};

    double span = o.span;
    double drift = INFINITY;
    for (; span <= o.max_span; span *= 2.0) {
        struct Max {
            double s;
            double val;
            S3 u;
        };
        std::vector<Max> maxima;
        const double keep_from = init.s + o.transient * span;
        ode::integrate<3>(sys, init.s, sys.to_flux(init), init.s + span, opt, [&](const ode::Segment<3>& seg) {
            const S3 a = seg.at(seg.t0), b = seg.at(seg.t1);
            if (seg.t1 >= keep_from && a[1] > 0.0 && b[1] <= 0.0) {
                const double sm = ode::locate<3>(seg, [](const S3& u) { return u[1]; }, seg.t0, seg.t1);
                const S3 um = seg.at(sm);
                if (sm >= keep_from) maxima.push_back({sm, sys.phi(um), um});
            }
            return true;
        });
        const int K = o.cycles;
        if (static_cast<int>(maxima.size()) < K + 1) continue;
        const std::size_t m = maxima.size();
        double dmax = 0.0, per = 0.0, pmin = INFINITY, pmax = 0.0;
        for (std::size_t j = m - K; j < m; ++j) {
            dmax = std::max(dmax, std::abs(maxima[j].val - maxima[j - 1].val));
            const double T = maxima[j].s - maxima[j - 1].s;
            per += T;
            pmin = std::min(pmin, T);
            pmax = std::max(pmax, T);
        }
        per /= K;
        const double ref = std::abs(maxima.back().val);
        drift = std::max(dmax / ref, (pmax - pmin) / per);
        if (drift > o.drift_tol) continue;

        // Resample one period starting at the second-to-last maximum.
        PeriodicComponent pc;
        pc.n = n;
        pc.mu = mu;
        pc.period = per;
        pc.drift = drift;
        const auto& m0 = maxima[m - 2];
        const int M = std::max(o.samples, 16);
        std::vector<double> at(M + 1);
        for (int k = 0; k <= M; ++k) at[k] = m0.s + per * k / M;
        at[M] = m0.s + per;
        const auto tr = integrate_osc(sys.from_flux(m0.s, m0.u), n, mu, -1, {m0.s, m0.s + per * (1.0 + 1e-9)},
                                      at, o.ode);
        double amp = 0.0;
        for (const auto& x : tr.samples) {
            pc.samples.emplace_back(x.s, x.phi);
            amp = std::max(amp, std::abs(x.phi));
        }
        pc.amplitude = amp;
        return pc;
    }
    throw ComputeError("no periodicity detected within the s-budget (drift " + format_g(drift) + ")");
}

std::vector<double> reconstruct_interface(const PeriodicComponent& pc, double y0, double s_shift,
                                          const std::vector<double>& y_samples) {
    require(pc.samples.size() >= 4 && pc.period > 0.0, "invalid periodic component");
    std::vector<double> f;
    f.reserve(y_samples.size());
    for (double y : y_samples) {
        if (!(y > 0.0 && y < y0)) throw DomainError("sample outside (0, y0)");
        const double d = y0 - y;
        f.push_back(std::pow(d, pc.mu) * pc.value_at(std::log(d) + s_shift));
    }
    return f;
}

}  // namespace blowup
