#pragma once

#include <string>
#include <vector>

#include "blowup/banded.hpp"
#include "blowup/profile.hpp"

namespace blowup {

/// g(w) = (eps^2 + w^2)^{n/2} w and its derivative.
double flux(double w, double n, double eps);
double flux_derivative(double w, double n, double eps);
/// Inverse of flux in w (monotone for every n >= 0, eps >= 0).
double flux_inverse(double G, double n, double eps);

/// Residual of -D^2[g(D^2F)] - bt y DF - F + |F|^{p-1}F with boundary rows.
std::vector<double> assemble_residual(const Profile& profile);
/// Analytic Jacobian of assemble_residual (pentadiagonal).
BandMatrix assemble_jacobian(const Profile& profile);

/// Max-norm of the equation rows only.
double residual_norm(const Profile& profile);
/// Boolean mask marking equation rows (false for boundary rows).
std::vector<bool> equation_rows(const Mesh& mesh, BoundaryKind bc);

/// B_n(Y) = -D^2[g(D^2 Y)] - beta y DY + Y on equation rows (zero elsewhere).
std::vector<double> assemble_linearized(const Mesh& mesh, double n, double beta, double eps,
                                        const std::vector<double>& Y);

struct NewtonOptions {
    double tol = 1e-6;
    int max_iters = 200;
    int max_halvings = 30;
    double armijo = 1e-4;
    int divergence_window = 10;
};

enum class SolveStatus { converged, max_iters, singular_jacobian, diverged };
std::string to_string(SolveStatus s);

struct SolveReport {
    SolveStatus status = SolveStatus::max_iters;
    int iterations = 0;
    int failed_at = -1;
    std::string message;
    std::vector<double> history;  // residual max-norm per iterate
};

/// Damped Newton on the regularized residual. Returns the best iterate.
Profile solve_profile(const ProblemParams& params, const Profile& guess,
                      const NewtonOptions& opts = {}, SolveReport* report = nullptr);

struct ContinuationReport {
    std::vector<double> eps_done;
    std::vector<double> distances;  // max-norm between consecutive stages
    bool stage_failed = false;
    double failed_eps = 0.0;
    std::string message;
};

Profile eps_continuation(const ProblemParams& params, const Profile& guess,
                         const std::vector<double>& schedule, const NewtonOptions& opts = {},
                         ContinuationReport* report = nullptr);

struct TailFrequency {
    double frequency;
    double predicted;
    int zeros;
};

TailFrequency tail_frequency_estimate(const Profile& profile);

}  // namespace blowup
