#pragma once

#include <array>
#include <boost/math/tools/roots.hpp>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <cstdint>
#include <string>

#include "blowup/errors.hpp"
#include "blowup/numfmt.hpp"

namespace blowup::ode {

namespace odeint = boost::numeric::odeint;

template <std::size_t D>
using State = std::array<double, D>;

struct Options {
    double rtol = 1e-10;
    double atol = 1e-12;
    double h0 = 1e-3;
    double h_min = 1e-13;
    std::int64_t max_steps = 50'000'000;
};

template <std::size_t D>
using DenseStepper = odeint::dense_output_runge_kutta<
    odeint::controlled_runge_kutta<odeint::runge_kutta_dopri5<State<D>>>>;

/// One accepted step [t0, t1] with its continuous extension.
template <std::size_t D>
struct Segment {
    double t0;
    double t1;
    const DenseStepper<D>* stepper;

    State<D> at(double t) const {
        State<D> x;
        stepper->calc_state(t, x);
        return x;
    }
};

/// DOPRI5 with dense output from t0 to t1. The observer sees every
/// accepted step and may stop the run by returning false. Returns the
/// state at the final time reached.
template <std::size_t D, class Rhs, class Observer>
State<D> integrate(Rhs&& rhs, double t0, const State<D>& x0, double t1, const Options& opt,
                   Observer&& observe, double* t_end = nullptr) {
    auto st = odeint::make_dense_output(opt.atol, opt.rtol, odeint::runge_kutta_dopri5<State<D>>());
    auto sys = [&rhs](const State<D>& x, State<D>& dx, double t) { dx = rhs(t, x); };
    st.initialize(x0, t0, opt.h0);
    std::int64_t steps = 0;
    while (st.current_time() < t1) {
        st.do_step(sys);
        const double ta = st.previous_time();
        const double tb = std::min(st.current_time(), t1);
        for (double v : st.current_state())
            if (!std::isfinite(v)) throw ComputeError("integration produced non-finite state at t=" + format_g(tb));
        Segment<D> seg{ta, tb, &st};
        if (!observe(seg)) {
            if (t_end) *t_end = tb;
            return seg.at(tb);
        }
        if (st.current_time() < t1 && st.current_time_step() < opt.h_min)
            throw ComputeError("step size underflow below " + format_g(opt.h_min) +
                               " at t=" + format_g(st.current_time(), 10));
        if (++steps > opt.max_steps) throw ComputeError("step budget exhausted");
    }
    if (t_end) *t_end = t1;
    State<D> x;
    st.calc_state(t1, x);
    return x;
}

/// Root of fn(seg.at(t)) on [ta, tb] given a sign change, by TOMS 748.
template <std::size_t D, class Fn>
double locate(const Segment<D>& seg, Fn&& fn, double ta, double tb) {
    auto g = [&](double t) { return fn(seg.at(t)); };
    double ga = g(ta), gb = g(tb);
    if (ga == 0.0) return ta;
    if (gb == 0.0) return tb;
    std::uintmax_t iters = 200;
    auto tol = [](double a, double b) { return std::abs(b - a) <= 4e-16 * std::max(1.0, std::abs(a)); };
    auto r = boost::math::tools::toms748_solve(g, ta, tb, ga, gb, tol, iters);
    return 0.5 * (r.first + r.second);
}

}  // namespace blowup::ode
