#pragma once

#include <vector>

#include "blowup/profile.hpp"

namespace blowup {

struct EnergyReport {
    double bending = 0.0;  // -(1/(n+2)) int |F''|^{n+2}
    double mass = 0.0;     // -(1/2) int F^2
    double source = 0.0;   // (1/(n+2)) int |F|^{n+2}
    double total = 0.0;
};

/// Trapezoid weights over the real line; half meshes count twice.
std::vector<double> energy_weights(const Mesh& mesh);

/// Discrete energy whose gradient is weights * residual at interior rows.
/// With eps > 0 the bending density is the regularized potential of g.
EnergyReport energy(const Profile& profile);

/// <residual, eta> in the weighted inner product of energy_weights.
double residual_pairing(const Profile& profile, const std::vector<double>& eta);

/// Central difference (E(F + t eta) - E(F - t eta)) / 2t.
double energy_directional_derivative(const Profile& profile, const std::vector<double>& eta,
                                     double step = 1e-6);

/// Size of the individual first-variation terms along eta; the natural
/// denominator when comparing derivatives at a critical point.
double first_variation_scale(const Profile& profile, const std::vector<double>& eta);

struct FiberReport {
    double h0 = 0.0;
    double r0 = 0.0;
    double h_at_r0 = 0.0;
    double h_tilde = 0.0;
    bool on_constraint = false;  // |H_0(v) - 1| <= 1e-6
};

/// Fibering reduction of the unregularized functional along v.
FiberReport fiber_reduce(const Profile& v);
/// H(r, v) = E(r v) evaluated directly (eps = 0).
double fiber_value(const Profile& v, double r);
/// c v with H_0(c v) = 1; requires H_0(v) > 0.
Profile fiber_normalize(const Profile& v);

struct EigenOptions {
    int max_iters = 20000;
    int window = 50;
    double rel_decrease = 1e-10;
};

struct EigenResult {
    double lambda = 0.0;
    int iterations = 0;
    std::vector<double> y, psi;
};

/// min of int |psi''|^{n+2} / int |psi|^{n+2} over clamped psi on [-R, R],
/// by Sobolev-preconditioned projected gradient descent from a positive bump.
EigenResult first_nonlinear_eigenvalue_full(double n, double R, int nodes, double bump_scale = 1.0,
                                            const EigenOptions& opts = {});
double first_nonlinear_eigenvalue(double n, double R, int nodes = 401);

/// Lower bound for the number of nonlinear eigenvalues below 1 on [-R, R]:
/// #{k : lambda_1(R/k) < 1}, since lambda_k(R) <= lambda_1(R/k).
int count_eigenvalues_below_one(double n, double R, int nodes = 401);

}  // namespace blowup
