#pragma once

#include <boost/rational.hpp>
#include <vector>

namespace blowup {

/// Tabulated radial kernel of -F''' + (1/4) y F = 0 on [0, L], normalized
/// so that its even extension integrates to one.
struct KernelTable {
    double L = 0.0;
    std::vector<double> y;
    std::vector<double> F, F1, F2;
    double normalization = 0.0;  // integral over the real line after rescaling
    double decay_D = 0.0;        // fit |F| ~ D exp(-d y^{4/3})
    double decay_d = 0.0;

    double h() const { return y[1] - y[0]; }
};

/// N is the number of collocation intervals.
KernelTable compute_kernel(double L = 40.0, int N = 8000);

/// F^{(k)}(y) from the interpolated jet and F^{(m+3)} = (y F^{(m)} + m F^{(m-1)})/4.
/// Accepts y in [-L, L] through the even extension; zero outside.
double kernel_derivative(const KernelTable& table, int k, double y);

/// psi_l = (-1)^l F^{(l)} / sqrt(l!).
double eigenfunction(const KernelTable& table, int l, double y);

/// max |B psi_l + (l/4) psi_l| over nodes in [0, y_max], with
/// B = -D^4 + (1/4) y D + 1/4 and D^4 psi_l from a difference of psi_l'''.
double eigen_residual(const KernelTable& table, int l, double y_max);

using Rational = boost::rational<long long>;

/// psi*_l = q(y) / sqrt(norm_sq), q with exact integer coefficients (ascending powers).
struct AdjointPolynomial {
    int l = 0;
    std::vector<Rational> q;
    long long norm_sq = 1;

    double operator()(double y) const;
    std::vector<double> coefficients() const;  // of psi*_l itself
};

AdjointPolynomial adjoint_eigenfunction(int l);

/// B* = -D^4 - (1/4) y D applied coefficient-wise in exact arithmetic.
std::vector<Rational> apply_adjoint_operator(const std::vector<Rational>& q);

/// <psi_l, psi*_k> over [-L, L] by composite Simpson on the table nodes.
double pairing(const KernelTable& table, int l, int k);

/// u_l(x,t) = e^{-t} t^{-(1+l)/4} psi_l(x / t^{1/4}); with fundamental = true
/// the factor e^{-t} is dropped, giving b(x,t) = t^{-1/4} F(y) at l = 0.
double linear_pattern(const KernelTable& table, int l, double x, double t, bool fundamental = false);

}  // namespace blowup
