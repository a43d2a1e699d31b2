#include "blowup/variational.hpp"

#include <cmath>
#include <limits>

#include "blowup/banded.hpp"
#include "blowup/bvp.hpp"
#include "blowup/errors.hpp"
#include "blowup/numfmt.hpp"

namespace blowup {

namespace {

void require_regional(const ProblemParams& prm) {
    prm.validate();
    if (std::abs(prm.p - (prm.n + 1.0)) > 1e-12)
        throw DomainError("energy functional needs p = n+1 (got p=" + format_g(prm.p) + ")");
}

double potential(double w, double n, double eps) {
    if (eps == 0.0) return std::pow(std::abs(w), n + 2.0) / (n + 2.0);
    return (std::pow(eps * eps + w * w, 0.5 * (n + 2.0)) - std::pow(eps, n + 2.0)) / (n + 2.0);
}

// Nodal second differences with the bvp ghost convention: mirrored
// positions, parity-reflected values on the left, even reflection on the right.
std::vector<double> second_differences(const Profile& prof, const std::vector<double>& F) {
    const auto& x = prof.mesh.nodes;
    const int N = static_cast<int>(x.size());
    double sign = 1.0;
    if (prof.mesh.half) {
        if (prof.bc == BoundaryKind::q_plateau) throw DomainError("energy is undefined for the q-plateau condition");
        if (prof.bc == BoundaryKind::antisymmetry) sign = -1.0;
    }
    std::vector<double> w(N);
    for (int i = 0; i < N; ++i) {
        double xm, xp, fm, fp;
        if (i == 0) {
            xm = 2.0 * x[0] - x[1];
            fm = sign * F[1];
        } else {
            xm = x[i - 1];
            fm = F[i - 1];
        }
        if (i == N - 1) {
            xp = 2.0 * x[N - 1] - x[N - 2];
            fp = F[N - 2];
        } else {
            xp = x[i + 1];
            fp = F[i + 1];
        }
        const double hm = x[i] - xm, hp = xp - x[i];
        w[i] = 2.0 * (fm / (hm * (hm + hp)) - F[i] / (hm * hp) + fp / (hp * (hm + hp)));
    }
    return w;
}

EnergyReport energy_of(const Profile& prof, const std::vector<double>& F, double eps) {
    const double n = prof.params.n;
    const auto w = second_differences(prof, F);
    const auto om = energy_weights(prof.mesh);
    EnergyReport e;
    for (std::size_t i = 0; i < F.size(); ++i) {
        e.bending -= om[i] * potential(w[i], n, eps);
        e.mass -= 0.5 * om[i] * F[i] * F[i];
        e.source += om[i] * std::pow(std::abs(F[i]), n + 2.0) / (n + 2.0);
    }
    e.total = e.bending + e.mass + e.source;
    return e;
}

}  // namespace

std::vector<double> energy_weights(const Mesh& mesh) {
    const auto& x = mesh.nodes;
    const std::size_t N = x.size();
    std::vector<double> om(N, 0.0);
    for (std::size_t i = 0; i + 1 < N; ++i) {
        const double h = x[i + 1] - x[i];
        om[i] += 0.5 * h;
        om[i + 1] += 0.5 * h;
    }
    if (mesh.half)
        for (double& v : om) v *= 2.0;
    return om;
}

EnergyReport energy(const Profile& profile) {
    require_regional(profile.params);
    return energy_of(profile, profile.values, profile.params.eps);
}

double residual_pairing(const Profile& profile, const std::vector<double>& eta) {
    require_regional(profile.params);
    require(eta.size() == profile.values.size(), "perturbation size mismatch");
    const auto r = assemble_residual(profile);
    const auto eq = equation_rows(profile.mesh, profile.bc);
    const auto om = energy_weights(profile.mesh);
    double s = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i)
        if (eq[i]) s += om[i] * r[i] * eta[i];
    return s;
}

double energy_directional_derivative(const Profile& profile, const std::vector<double>& eta, double step) {
    require_regional(profile.params);
    require(eta.size() == profile.values.size(), "perturbation size mismatch");
    std::vector<double> a = profile.values, b = profile.values;
    for (std::size_t i = 0; i < a.size(); ++i) {
        a[i] += step * eta[i];
        b[i] -= step * eta[i];
    }
    const double eps = profile.params.eps;
    return (energy_of(profile, a, eps).total - energy_of(profile, b, eps).total) / (2.0 * step);
}

double first_variation_scale(const Profile& profile, const std::vector<double>& eta) {
    require_regional(profile.params);
    const double n = profile.params.n;
    const auto w = second_differences(profile, profile.values);
    const auto we = second_differences(profile, eta);
    const auto om = energy_weights(profile.mesh);
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        const double F = profile.values[i];
        s += om[i] * (std::abs(flux(w[i], n, profile.params.eps) * we[i]) + std::abs(F * eta[i]) +
                      std::pow(std::abs(F), n + 1.0) * std::abs(eta[i]));
    }
    return s;
}

FiberReport fiber_reduce(const Profile& v) {
    require_regional(v.params);
    const double n = v.params.n;
    require(n > 0.0, "fibering needs n > 0");
    const auto e = energy_of(v, v.values, 0.0);
    const double M = -2.0 * e.mass;
    if (!(M > 0.0)) throw DomainError("fibering needs a nontrivial v");
    FiberReport f;
    // E = bending + mass + source, so H_0 = (n+2) (source + bending).
    f.h0 = (n + 2.0) * (e.source + e.bending);
    f.h_tilde = M;
    f.on_constraint = std::abs(f.h0 - 1.0) <= 1e-6;
    if (f.h0 > 0.0) {
        f.r0 = std::pow(M / f.h0, 1.0 / n);
        f.h_at_r0 = -n / (2.0 * (n + 2.0)) * f.r0 * f.r0 * M;
    } else {
        f.r0 = std::numeric_limits<double>::infinity();
        f.h_at_r0 = -std::numeric_limits<double>::infinity();
    }
    return f;
}

double fiber_value(const Profile& v, double r) {
    require_regional(v.params);
    std::vector<double> F(v.values);
    for (double& x : F) x *= r;
    return energy_of(v, F, 0.0).total;
}

Profile fiber_normalize(const Profile& v) {
    const auto f = fiber_reduce(v);
    if (!(f.h0 > 0.0)) throw DomainError("H_0(v) <= 0: v cannot be scaled onto the fibering set");
    Profile out = v;
    const double c = std::pow(f.h0, -1.0 / (v.params.n + 2.0));
    for (double& x : out.values) x *= c;
    out.converged = false;
    return out;
}

namespace {

// Clamped discretization on [-R, R]: psi_0 = psi_{N-1} = 0 with even
// ghosts, so the boundary second differences are 2 psi_1 / h^2.
struct Clamped {
    int N;
    double h, n;
    std::vector<double> om;

    std::vector<double> full(const std::vector<double>& u) const {
        std::vector<double> psi(N, 0.0);
        for (int j = 1; j < N - 1; ++j) psi[j] = u[j - 1];
        return psi;
    }
    std::vector<double> d2(const std::vector<double>& psi) const {
        std::vector<double> w(N);
        const double h2 = h * h;
        for (int i = 0; i < N; ++i) {
            const double m = i == 0 ? psi[1] : psi[i - 1];
            const double p = i == N - 1 ? psi[N - 2] : psi[i + 1];
            w[i] = (m - 2.0 * psi[i] + p) / h2;
        }
        return w;
    }
    // Transpose of d2 restricted to interior unknowns.
    std::vector<double> d2t(const std::vector<double>& v) const {
        std::vector<double> g(N - 2, 0.0);
        const double h2 = h * h;
        for (int i = 0; i < N; ++i) {
            const double c = v[i] / h2;
            if (i == 0) {
                g[0] += 2.0 * c;
                continue;
            }
            if (i == N - 1) {
                g[N - 3] += 2.0 * c;
                continue;
            }
            g[i - 1] += -2.0 * c;
            if (i - 1 >= 1) g[i - 2] += c;
            if (i + 1 <= N - 2) g[i] += c;
        }
        return g;
    }
    double num(const std::vector<double>& psi) const {
        const auto w = d2(psi);
        double s = 0.0;
        for (int i = 0; i < N; ++i) s += om[i] * std::pow(std::abs(w[i]), n + 2.0);
        return s;
    }
    double den(const std::vector<double>& psi) const {
        double s = 0.0;
        for (int i = 0; i < N; ++i) s += om[i] * std::pow(std::abs(psi[i]), n + 2.0);
        return s;
    }
};

}  // namespace

EigenResult first_nonlinear_eigenvalue_full(double n, double R, int nodes, double bump_scale,
                                            const EigenOptions& opts) {
    require(std::isfinite(n) && n >= 0.0, "n must be >= 0");
    require(std::isfinite(R) && R > 0.0, "R must be > 0");
    require(nodes >= 21, "eigenvalue mesh needs at least 21 nodes");
    require(bump_scale != 0.0 && std::isfinite(bump_scale), "bump scale must be nonzero");
    Clamped C{nodes, 2.0 * R / (nodes - 1), n, {}};
    C.om.assign(nodes, C.h);
    C.om.front() = C.om.back() = 0.5 * C.h;
    const int M = nodes - 2;

    // Preconditioner: the n = 0 bending form d2^T W d2 on interior unknowns.
    BandMatrix P(M, 2, 2);
    for (int j = 0; j < M; ++j) {
        std::vector<double> e(M, 0.0);
        e[j] = 1.0;
        auto w = C.d2(C.full(e));
        for (int i = 0; i < nodes; ++i) w[i] *= C.om[i];
        const auto col = C.d2t(w);
        for (int i = std::max(0, j - 2); i <= std::min(M - 1, j + 2); ++i) P(i, j) = col[i];
    }

    std::vector<double> u(M);
    for (int j = 0; j < M; ++j) {
        const double y = -R + (j + 1) * C.h;
        const double s = 1.0 - (y / R) * (y / R);
        u[j] = bump_scale * s * s;
    }
    auto normalize = [&](std::vector<double>& v) {
        const double d = C.den(C.full(v));
        const double c = std::pow(d, -1.0 / (n + 2.0));
        for (double& x : v) x *= c;
    };
    normalize(u);
    double Q = C.num(C.full(u));
    std::vector<double> hist{Q};
    double t = 1.0;
    EigenResult res;
    for (int it = 1; it <= opts.max_iters; ++it) {
        const auto psi = C.full(u);
        const auto w = C.d2(psi);
        std::vector<double> v(nodes);
        for (int i = 0; i < nodes; ++i) v[i] = C.om[i] * std::pow(std::abs(w[i]), n) * w[i];
        auto g = C.d2t(v);
        for (int j = 0; j < M; ++j) {
            const double pj = psi[j + 1];
            g[j] = (n + 2.0) * (g[j] - Q * C.om[j + 1] * std::pow(std::abs(pj), n) * pj);
        }
        std::vector<double> d = g;
        BandMatrix Pc = P;
        if (Pc.solve(d) != 0) throw ComputeError("eigenvalue preconditioner is singular");
        double slope = 0.0;
        for (int j = 0; j < M; ++j) slope += g[j] * d[j];
        if (!(slope > 0.0)) break;  // stationary to rounding
        t = std::min(2.0 * t, 1e6);
        double Qn = Q;
        std::vector<double> trial(M);
        for (int k = 0; k < 60; ++k) {
            for (int j = 0; j < M; ++j) trial[j] = u[j] - t * d[j];
            const auto tp = C.full(trial);
            Qn = C.num(tp) / C.den(tp);
            if (Qn <= Q - 1e-4 * t * slope) break;
            t *= 0.5;
        }
        if (!(Qn < Q)) break;
        u = trial;
        normalize(u);
        Q = C.num(C.full(u));
        hist.push_back(Q);
        res.iterations = it;
        const int k = static_cast<int>(hist.size()) - 1;
        if (k >= opts.window && hist[k - opts.window] - Q <= opts.rel_decrease * Q) break;
        if (it == opts.max_iters)
            throw ComputeError("eigenvalue descent stagnated; last quotient " + format17(Q));
    }
    res.lambda = Q;
    res.psi = C.full(u);
    res.y.resize(nodes);
    for (int i = 0; i < nodes; ++i) res.y[i] = -R + i * C.h;
    return res;
}

double first_nonlinear_eigenvalue(double n, double R, int nodes) {
    return first_nonlinear_eigenvalue_full(n, R, nodes).lambda;
}

int count_eigenvalues_below_one(double n, double R, int nodes) {
    const double l1 = first_nonlinear_eigenvalue(n, R, nodes);
    int K = 0;
    while (K < 1000 && std::pow(K + 1.0, 4.0 + 2.0 * n) * l1 < 1.0) ++K;
    return K;
}

}  // namespace blowup
