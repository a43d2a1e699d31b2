#include "blowup/periodic.hpp"

#include <algorithm>
#include <cmath>
#include <optional>

#include "blowup/bvp.hpp"
#include "blowup/ode.hpp"

namespace blowup {

namespace {

using S4 = ode::State<4>;

double phi_eps(double w, double n, double eps) {
    return (std::pow(eps * eps + w * w, 0.5 * (n + 2.0)) - std::pow(eps, n + 2.0)) / (n + 2.0);
}

struct HalfOrbit {
    double t_star;  // time of the first maximum
    S4 at_star;
    double min_seen;
    double max_seen;
};

struct Shooter {
    double n;
    ShootOptions o;

    S4 rhs(double, const S4& x) const {
        const double F = x[0];
        return {x[1], flux_inverse(x[2], n, o.eps), x[3], -F + std::pow(std::abs(F), n) * F};
    }

    S4 initial(double a, double b) const { return {a, 0.0, flux(b, n, o.eps), 0.0}; }

    // Integrates from the minimum to the next maximum (F' going + to -).
    HalfOrbit half(double a, double b) const {
        ode::Options opt;
        opt.rtol = o.rtol;
        opt.atol = o.atol;
        opt.h0 = 1e-4;
        std::optional<HalfOrbit> hit;
        double lo = a, hi = a;
        std::optional<ShootingError> fail;
        auto f = [this](double t, const S4& x) { return rhs(t, x); };
        ode::integrate<4>(f, 0.0, initial(a, b), o.t_max, opt, [&](const ode::Segment<4>& seg) {
            const S4 xa = seg.at(seg.t0), xb = seg.at(seg.t1);
            lo = std::min(lo, xb[0]);
            hi = std::max(hi, xb[0]);
            if (xb[0] <= 0.0) {
                fail = ShootingError(ShootingError::Kind::escaped, "trajectory escaped to the basin of F = 0");
                return false;
            }
            if (std::abs(xb[0]) > 1e3) {
                fail = ShootingError(ShootingError::Kind::diverged, "trajectory diverged");
                return false;
            }
            if (seg.t0 > 0.0 && xa[1] > 0.0 && xb[1] <= 0.0) {
                const double ts = ode::locate<4>(seg, [](const S4& x) { return x[1]; }, seg.t0, seg.t1);
                hit = HalfOrbit{ts, seg.at(ts), lo, hi};
                return false;
            }
            return true;
        });
        if (fail) throw *fail;
        if (!hit) throw ShootingError(ShootingError::Kind::no_closure, "no return to the section within t_max");
        return *hit;
    }

    double energy0(double a, double b) const { return orbit_energy(n, o.eps, a, 0.0, b, 0.0); }

    std::array<double, 2> residual(double a, double b) const {
        const auto h = half(a, b);
        return {h.at_star[3], energy0(a, b)};
    }

    // b > 0 with H(a, b) = 0 for 0 < a < 1.
    double b_on_zero_level(double a) const {
        const double target = 0.5 * a * a - std::pow(a, n + 2.0) / (n + 2.0);
        if (!(target > 0.0)) throw DomainError("no H = 0 orbit through this minimum");
        auto g = [&](double b) { return flux(b, n, o.eps) * b - phi_eps(b, n, o.eps) - target; };
        double hi = 1.0;
        while (g(hi) < 0.0) hi *= 2.0;
        std::uintmax_t it = 200;
        auto tol = [](double x, double y) { return std::abs(y - x) <= 1e-16 * std::max(1.0, x); };
        auto r = boost::math::tools::toms748_solve(g, 0.0, hi, tol, it);
        return 0.5 * (r.first + r.second);
    }
};

}  // namespace

double orbit_energy(double n, double eps, double F, double F1, double F2, double G1) {
    const double G = flux(F2, n, eps);
    return -G1 * F1 + G * F2 - phi_eps(F2, n, eps) - 0.5 * F * F +
           std::pow(std::abs(F), n + 2.0) / (n + 2.0);
}

double PeriodicOrbit::value_at(double t) const {
    if (samples.size() < 2 || period <= 0.0) return 0.0;
    double u = std::fmod(t, period);
    if (u < 0.0) u += period;
    const double x = u / period * static_cast<double>(samples.size() - 1);
    const std::size_t i = std::min(static_cast<std::size_t>(x), samples.size() - 2);
    const double w = x - static_cast<double>(i);
    return (1.0 - w) * samples[i] + w * samples[i + 1];
}

PeriodicOrbit shoot_periodic_full(double n, int about, double a_init, double b_init,
                                  const ShootOptions& opts) {
    require(n >= 0.0 && std::isfinite(n), "n must be >= 0");
    require(about == 1 || about == -1, "about must be +1 or -1");
    require(opts.eps >= 0.0, "eps must be >= 0");
    if (a_init == static_cast<double>(about) && b_init == 0.0)
        throw DomainError("degenerate constant orbit: the equilibrium is not a periodic orbit");
    // Work about +1 and reflect at the end (the equation is odd).
    double a = about * a_init;
    require(a > 0.0 && a < 1.0, "a_init must lie strictly between 0 and the equilibrium");
    Shooter sh{n, opts};
    double b = b_init * about > 0.0 ? b_init * about : sh.b_on_zero_level(a);

    int it = 0;
    for (;; ++it) {
        const auto r = sh.residual(a, b);
        if (std::abs(r[0]) <= opts.tol && std::abs(r[1]) <= opts.tol) break;
        if (it >= opts.max_iters)
            throw ShootingError(ShootingError::Kind::no_closure, "periodic shooting did not close");
        const double da = 1e-7 * std::max(1e-3, a), db = 1e-7 * std::max(1e-3, b);
        const auto ra = sh.residual(a + da, b);
        const auto rb = sh.residual(a, b + db);
        const double j11 = (ra[0] - r[0]) / da, j12 = (rb[0] - r[0]) / db;
        const double j21 = (ra[1] - r[1]) / da, j22 = (rb[1] - r[1]) / db;
        const double det = j11 * j22 - j12 * j21;
        if (det == 0.0 || !std::isfinite(det))
            throw ShootingError(ShootingError::Kind::no_closure, "singular shooting Jacobian");
        double sa = -(j22 * r[0] - j12 * r[1]) / det;
        double sb = -(-j21 * r[0] + j11 * r[1]) / det;
        // Keep the iterate inside the admissible strip.
        double lam = 1.0;
        while ((a + lam * sa <= 0.0 || a + lam * sa >= 1.0 || b + lam * sb <= 0.0) && lam > 1e-6) lam *= 0.5;
        a += lam * sa;
        b += lam * sb;
    }

    const auto h = sh.half(a, b);
    PeriodicOrbit orb;
    orb.n = n;
    orb.eps = opts.eps;
    orb.about = about;
    orb.period = 2.0 * h.t_star;
    orb.iterations = it;
    orb.energy = sh.energy0(a, b);

    // One full period: measure closure and tabulate F.
    ode::Options opt;
    opt.rtol = opts.rtol;
    opt.atol = opts.atol;
    opt.h0 = 1e-4;
    const int M = std::max(opts.samples, 3);
    std::vector<double> samples(M);
    samples[0] = a;
    int next = 1;
    double lo = a, hi = a;
    auto f = [&sh](double t, const S4& x) { return sh.rhs(t, x); };
    const S4 x0 = sh.initial(a, b);
    const S4 xT = ode::integrate<4>(f, 0.0, x0, orb.period, opt, [&](const ode::Segment<4>& seg) {
        while (next < M) {
            const double t = orb.period * next / (M - 1);
            if (t > seg.t1) break;
            samples[next] = seg.at(t)[0];
            lo = std::min(lo, samples[next]);
            hi = std::max(hi, samples[next]);
            ++next;
        }
        return true;
    });
    samples[M - 1] = xT[0];
    double closure = 0.0;
    for (int k = 0; k < 4; ++k) closure = std::max(closure, std::abs(xT[k] - x0[k]));
    orb.closure = closure;
    hi = std::max(hi, h.at_star[0]);

    const double s = about;
    orb.a = s * a;
    orb.b = s * b;
    if (about > 0) {
        orb.min_val = lo;
        orb.max_val = hi;
    } else {
        orb.min_val = -hi;
        orb.max_val = -lo;
    }
    for (auto& v : samples) v *= s;
    orb.samples = std::move(samples);
    return orb;
}

}  // namespace blowup
