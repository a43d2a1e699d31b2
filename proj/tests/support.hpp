#pragma once

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "blowup/bvp.hpp"
#include "blowup/patterns.hpp"
#include "blowup/profile.hpp"

namespace blowup::test {

namespace fs = std::filesystem;

inline double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

inline double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

inline NewtonOptions tight() {
    NewtonOptions o;
    o.tol = 1e-8;
    return o;
}

/// Converged member of a guess family at n = 0.2, p = 1.2 on the default mesh.
/// Solves are cheap, but composite families need F_0, so it is cached.
inline const Profile& regional_f0() {
    static const Profile f0 = [] {
        const ProblemParams P{0.2, 1.2, 1e-2};
        const Mesh m = Mesh::uniform(50.0, 4001);
        return solve_profile(P, guess_factory(parse_family("basic:0"), m, P), tight());
    }();
    return f0;
}

inline Profile regional_family(const std::string& family) {
    const Profile& f0 = regional_f0();
    GuessContext ctx{&f0, nullptr};
    return solve_profile(f0.params, guess_factory(parse_family(family), f0.mesh, f0.params, ctx), tight());
}

/// Sum of a few Gaussian bumps; smooth enough that finite differences of
/// the energy are not swamped by truncation error.
inline std::vector<double> smooth_perturbation(const Mesh& mesh, std::mt19937& rng, double reach = 15.0) {
    std::uniform_real_distribution<double> amp(-1.0, 1.0), centre(-reach, reach), width(1.0, 3.0);
    std::vector<double> eta(mesh.size(), 0.0);
    for (int b = 0; b < 4; ++b) {
        const double a = amp(rng), c = mesh.half ? std::abs(centre(rng)) : centre(rng), w = width(rng);
        for (std::size_t i = 0; i < mesh.size(); ++i) {
            const double z = (mesh.nodes[i] - c) / w;
            eta[i] += a * std::exp(-z * z);
        }
    }
    // Keep the perturbation clear of the boundary rows.
    for (std::size_t i = 0; i < mesh.size(); ++i)
        if (std::abs(mesh.nodes[i]) > mesh.R() - 5.0) eta[i] = 0.0;
    return eta;
}

struct JacobianCheck {
    double forward_matrix = 0.0;  // ||J_fd - J||_F / ||J||_F, forward differences
    double forward_column = 0.0;  // worst column, max-norm relative, forward differences
    double central_column = 0.0;  // worst column, central differences
};

/// Compares the analytic Jacobian with finite differences of the residual.
/// Columns with |F_j| < 1e-3 are skipped: |F|^{p-1}F is not C^2 at 0.
inline JacobianCheck jacobian_fd_check(const Profile& f, double step = 1e-7) {
    const auto J = assemble_jacobian(f);
    const auto r0 = assemble_residual(f);
    const int N = static_cast<int>(f.mesh.size());
    JacobianCheck c;
    double num = 0.0, den = 0.0;
    for (int j = 0; j < N; ++j) {
        if (std::abs(f.values[j]) < 1e-3) continue;
        const double h = step * std::max(1.0, std::abs(f.values[j]));
        Profile up = f, dn = f;
        up.values[j] += h;
        dn.values[j] -= h;
        const auto rp = assemble_residual(up), rm = assemble_residual(dn);
        double fwd = 0.0, ctr = 0.0, col = 0.0;
        for (int i = 0; i < N; ++i) {
            const double a = std::abs(i - j) <= 2 ? J(i, j) : 0.0;
            const double ef = (rp[i] - r0[i]) / h - a, ec = (rp[i] - rm[i]) / (2.0 * h) - a;
            fwd = std::max(fwd, std::abs(ef));
            ctr = std::max(ctr, std::abs(ec));
            col = std::max(col, std::abs(a));
            num += ef * ef;
            den += a * a;
        }
        c.forward_column = std::max(c.forward_column, fwd / std::max(col, 1e-12));
        c.central_column = std::max(c.central_column, ctr / std::max(col, 1e-12));
    }
    c.forward_matrix = std::sqrt(num / std::max(den, 1e-300));
    return c;
}

/// Fresh scratch directory under the system temp path.
inline fs::path scratch_dir(const std::string& tag) {
    std::string tmpl = (fs::temp_directory_path() / ("blowuplab-" + tag + "-XXXXXX")).string();
    if (!mkdtemp(tmpl.data())) throw std::runtime_error("mkdtemp failed");
    return tmpl;
}

/// Restores the working directory on scope exit.
struct ChangeDir {
    fs::path previous;
    explicit ChangeDir(const fs::path& to) : previous(fs::current_path()) { fs::current_path(to); }
    ~ChangeDir() { fs::current_path(previous); }
};

}  // namespace blowup::test
