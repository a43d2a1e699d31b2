#include "blowup/bvp.hpp"

#include <algorithm>
#include <cmath>

#include "blowup/errors.hpp"
#include "blowup/numfmt.hpp"

namespace blowup {

double flux(double w, double n, double eps) {
    if (n == 0.0) return w;
    return std::pow(eps * eps + w * w, 0.5 * n) * w;
}

double flux_derivative(double w, double n, double eps) {
    if (n == 0.0) return 1.0;
    const double s = eps * eps + w * w;
    if (s == 0.0) return n < 2.0 ? INFINITY : 0.0;
    return std::pow(s, 0.5 * n - 1.0) * (eps * eps + (n + 1.0) * w * w);
}

double flux_inverse(double G, double n, double eps) {
    if (n == 0.0 || G == 0.0) return G;
    const double a = std::abs(G);
    if (eps == 0.0) return std::copysign(std::pow(a, 1.0 / (n + 1.0)), G);
    // g is increasing and convex on w > 0; Newton from above converges monotonically.
    double w = std::min(std::pow(a, 1.0 / (n + 1.0)), a / std::pow(eps, n));
    for (int k = 0; k < 200; ++k) {
        const double step = (flux(w, n, eps) - a) / flux_derivative(w, n, eps);
        w -= step;
        if (std::abs(step) <= 1e-15 * w) break;
    }
    return std::copysign(w, G);
}

namespace {

// Three-point stencils on the mesh padded with two reflected ghost nodes per side.
struct Stencil {
    int N = 0;
    std::vector<double> y;             // padded positions, index k+2 for node k
    std::vector<double> a2, b2, c2;    // second derivative at padded index
    std::vector<double> a1, b1, c1;    // first derivative at real nodes
    double sign_left = 1.0;            // F_{-k} = sign_left * F_k
    bool left_equation = false;        // row 0 is an ODE row
    double left_value = 0.0;           // Dirichlet value when row 0 is a boundary row
};

void check_compatible(const Mesh& mesh, BoundaryKind bc) {
    mesh.validate();
    if (mesh.half)
        require(bc != BoundaryKind::dirichlet_far, "half-domain mesh needs a boundary condition at y = 0");
    else
        require(bc != BoundaryKind::q_plateau, "q-plateau condition needs a half-domain mesh");
}

Stencil make_stencil(const Mesh& mesh, BoundaryKind bc) {
    check_compatible(mesh, bc);
    Stencil s;
    const int N = static_cast<int>(mesh.size());
    s.N = N;
    s.y.resize(N + 4);
    for (int k = 0; k < N; ++k) s.y[k + 2] = mesh.nodes[k];
    for (int k = 1; k <= 2; ++k) {
        s.y[2 - k] = 2.0 * mesh.nodes[0] - mesh.nodes[k];
        s.y[N + 1 + k] = 2.0 * mesh.nodes[N - 1] - mesh.nodes[N - 1 - k];
    }
    s.a2.assign(N + 4, 0.0);
    s.b2.assign(N + 4, 0.0);
    s.c2.assign(N + 4, 0.0);
    // Uniform meshes use one spacing so the weights cancel exactly on constants.
    const bool uniform = mesh.spacing == Spacing::uniform;
    const double h = (mesh.nodes[N - 1] - mesh.nodes[0]) / (N - 1);
    for (int k = 1; k < N + 3; ++k) {
        const double hm = uniform ? h : s.y[k] - s.y[k - 1], hp = uniform ? h : s.y[k + 1] - s.y[k];
        s.a2[k] = 2.0 / (hm * (hm + hp));
        s.b2[k] = -2.0 / (hm * hp);
        s.c2[k] = 2.0 / (hp * (hm + hp));
    }
    s.a1.assign(N, 0.0);
    s.b1.assign(N, 0.0);
    s.c1.assign(N, 0.0);
    for (int k = 0; k < N; ++k) {
        const double hm = uniform ? h : s.y[k + 2] - s.y[k + 1], hp = uniform ? h : s.y[k + 3] - s.y[k + 2];
        s.a1[k] = -hp / (hm * (hm + hp));
        s.b1[k] = (hp - hm) / (hm * hp);
        s.c1[k] = hm / (hp * (hm + hp));
    }
    if (mesh.half) {
        switch (bc) {
            case BoundaryKind::symmetry: s.left_equation = true; break;
            case BoundaryKind::antisymmetry: s.sign_left = -1.0; break;
            case BoundaryKind::q_plateau: s.left_value = 1.0; break;
            default: break;
        }
    }
    return s;
}

std::vector<double> padded(const Stencil& s, const std::vector<double>& F) {
    const int N = s.N;
    std::vector<double> P(N + 4);
    for (int k = 0; k < N; ++k) P[k + 2] = F[k];
    for (int k = 1; k <= 2; ++k) {
        P[2 - k] = s.sign_left * F[k];
        P[N + 1 + k] = F[N - 1 - k];
    }
    return P;
}

struct Terms {
    std::vector<double> w, G, dG;  // at padded indices 1..N+2
};

Terms curvature_terms(const Stencil& s, const std::vector<double>& P, double n, double eps,
                      bool with_derivative) {
    const int M = s.N + 4;
    Terms t;
    t.w.assign(M, 0.0);
    t.G.assign(M, 0.0);
    if (with_derivative) t.dG.assign(M, 0.0);
    for (int k = 1; k < M - 1; ++k) {
        t.w[k] = s.a2[k] * P[k - 1] + s.b2[k] * P[k] + s.c2[k] * P[k + 1];
        t.G[k] = flux(t.w[k], n, eps);
        if (with_derivative) t.dG[k] = flux_derivative(t.w[k], n, eps);
    }
    return t;
}

void fill_residual(const Stencil& s, const ProblemParams& prm, const std::vector<double>& F,
                   std::vector<double>& r, BandMatrix* J) {
    const int N = s.N;
    const double bt = (prm.p - (prm.n + 1.0)) / (2.0 * (prm.n + 2.0));
    const auto P = padded(s, F);
    const auto t = curvature_terms(s, P, prm.n, prm.eps, J != nullptr);
    r.assign(N, 0.0);
    if (J) J->zero();
    auto add = [&](int row, int m, double v) {
        // m is a padded index; fold ghosts back onto real unknowns.
        int k = m - 2;
        double f = 1.0;
        if (k < 0) {
            k = -k;
            f = s.sign_left;
        } else if (k > N - 1) {
            k = 2 * (N - 1) - k;
        }
        (*J)(row, k) += f * v;
    };
    for (int i = 0; i < N; ++i) {
        const bool boundary = (i == N - 1) || (i == 0 && !s.left_equation);
        if (boundary) {
            r[i] = F[i] - (i == 0 ? s.left_value : 0.0);
            if (J) (*J)(i, i) = 1.0;
            continue;
        }
        const int k = i + 2;
        const double d2G = s.a2[k] * t.G[k - 1] + s.b2[k] * t.G[k] + s.c2[k] * t.G[k + 1];
        const double d1F = s.a1[i] * P[k - 1] + s.b1[i] * P[k] + s.c1[i] * P[k + 1];
        const double y = s.y[k];
        const double Fi = F[i];
        r[i] = -d2G - bt * y * d1F - Fi + std::pow(std::abs(Fi), prm.p - 1.0) * Fi;
        if (!J) continue;
        const double coef[3] = {s.a2[k], s.b2[k], s.c2[k]};
        for (int q = 0; q < 3; ++q) {
            const int kk = k - 1 + q;
            const double c = -coef[q] * t.dG[kk];
            add(i, kk - 1, c * s.a2[kk]);
            add(i, kk, c * s.b2[kk]);
            add(i, kk + 1, c * s.c2[kk]);
        }
        add(i, k - 1, -bt * y * s.a1[i]);
        add(i, k, -bt * y * s.b1[i]);
        add(i, k + 1, -bt * y * s.c1[i]);
        const double src = (prm.p == 1.0) ? 1.0 : prm.p * std::pow(std::abs(Fi), prm.p - 1.0);
        add(i, k, -1.0 + src);
    }
}

double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

}  // namespace

std::vector<bool> equation_rows(const Mesh& mesh, BoundaryKind bc) {
    std::vector<bool> eq(mesh.size(), true);
    eq.back() = false;
    if (!(mesh.half && bc == BoundaryKind::symmetry)) eq.front() = false;
    return eq;
}

std::vector<double> assemble_residual(const Profile& profile) {
    profile.params.validate();
    require(profile.values.size() == profile.mesh.size(), "profile size does not match mesh");
    const auto s = make_stencil(profile.mesh, profile.bc);
    std::vector<double> r;
    fill_residual(s, profile.params, profile.values, r, nullptr);
    return r;
}

BandMatrix assemble_jacobian(const Profile& profile) {
    profile.params.validate();
    require(profile.values.size() == profile.mesh.size(), "profile size does not match mesh");
    const auto s = make_stencil(profile.mesh, profile.bc);
    const int N = static_cast<int>(profile.mesh.size());
    BandMatrix J(N, 2, 2);
    std::vector<double> r;
    fill_residual(s, profile.params, profile.values, r, &J);
    return J;
}

double residual_norm(const Profile& profile) {
    const auto r = assemble_residual(profile);
    const auto eq = equation_rows(profile.mesh, profile.bc);
    double m = 0.0;
    for (std::size_t i = 0; i < r.size(); ++i)
        if (eq[i]) m = std::max(m, std::abs(r[i]));
    return m;
}

std::vector<double> assemble_linearized(const Mesh& mesh, double n, double beta, double eps,
                                        const std::vector<double>& Y) {
    require(Y.size() == mesh.size(), "values do not match mesh");
    mesh.validate();
    const BoundaryKind bc = mesh.half ? BoundaryKind::symmetry : BoundaryKind::dirichlet_far;
    const auto s = make_stencil(mesh, bc);
    const auto P = padded(s, Y);
    const auto t = curvature_terms(s, P, n, eps, false);
    const auto eq = equation_rows(mesh, bc);
    std::vector<double> r(mesh.size(), 0.0);
    for (int i = 0; i < s.N; ++i) {
        if (!eq[i]) continue;
        const int k = i + 2;
        const double d2G = s.a2[k] * t.G[k - 1] + s.b2[k] * t.G[k] + s.c2[k] * t.G[k + 1];
        const double d1 = s.a1[i] * P[k - 1] + s.b1[i] * P[k] + s.c1[i] * P[k + 1];
        r[i] = -d2G - beta * s.y[k] * d1 + Y[i];
    }
    return r;
}

std::string to_string(SolveStatus s) {
    switch (s) {
        case SolveStatus::converged: return "converged";
        case SolveStatus::max_iters: return "max-iterations";
        case SolveStatus::singular_jacobian: return "singular-jacobian";
        case SolveStatus::diverged: return "diverged";
    }
    return "unknown";
}

Profile solve_profile(const ProblemParams& params, const Profile& guess, const NewtonOptions& opts,
                      SolveReport* report) {
    params.validate();
    if (params.n > 0.0 && params.eps <= 0.0)
        throw DomainError("Newton refuses eps = 0 for n > 0 (non-smooth residual)");
    require(guess.values.size() == guess.mesh.size(), "guess size does not match mesh");
    require(opts.tol > 0.0 && opts.max_iters > 0, "bad Newton options");
    const auto s = make_stencil(guess.mesh, guess.bc);
    const int N = static_cast<int>(guess.mesh.size());

    SolveReport rep;
    std::vector<double> F = guess.values;
    std::vector<double> r, rn;
    BandMatrix J(N, 2, 2);
    fill_residual(s, params, F, r, &J);

    std::vector<double> best = F;
    double best_norm = max_abs(r);
    int grow_count = 0;
    double last_step = INFINITY;
    int it = 0;
    for (;; ++it) {
        const double nr = max_abs(r);
        rep.history.push_back(nr);
        if (nr < best_norm) {
            best_norm = nr;
            best = F;
        }
        if (nr <= opts.tol) {
            rep.status = SolveStatus::converged;
            best = F;
            best_norm = nr;
            break;
        }
        if (it >= opts.max_iters) {
            rep.status = SolveStatus::max_iters;
            rep.message = "no convergence within " + std::to_string(opts.max_iters) + " iterations";
            break;
        }
        std::vector<double> d(N);
        for (int i = 0; i < N; ++i) d[i] = -r[i];
        if (int info = J.solve(d); info != 0) {
            rep.status = SolveStatus::singular_jacobian;
            rep.failed_at = it;
            rep.message = "singular Jacobian at iteration " + std::to_string(it) + " (pivot " +
                          std::to_string(info) + ")";
            break;
        }
        const double n0 = norm2(r);
        double lam = 1.0;
        std::vector<double> Fn(N);
        for (int h = 0; h <= opts.max_halvings; ++h) {
            for (int i = 0; i < N; ++i) Fn[i] = F[i] + lam * d[i];
            fill_residual(s, params, Fn, rn, nullptr);
            if (norm2(rn) <= (1.0 - opts.armijo * lam) * n0) break;
            if (h < opts.max_halvings) lam *= 0.5;
        }
        const double step = max_abs(d);
        if (lam < 1.0 && step > last_step)
            ++grow_count;
        else
            grow_count = 0;
        last_step = step;
        F.swap(Fn);
        fill_residual(s, params, F, r, &J);
        if (!std::isfinite(max_abs(r)) || grow_count >= opts.divergence_window) {
            rep.status = SolveStatus::diverged;
            rep.failed_at = it;
            rep.message = "step norm grew over " + std::to_string(opts.divergence_window) +
                          " consecutive damped steps";
            ++it;
            break;
        }
    }
    rep.iterations = it;

    Profile out = guess;
    out.params = params;
    out.values = best;
    out.converged = rep.status == SolveStatus::converged;
    out.newton_iters = it;
    out.residual_norm = residual_norm(out);
    if (report) *report = rep;
    return out;
}

Profile eps_continuation(const ProblemParams& params, const Profile& guess,
                         const std::vector<double>& schedule, const NewtonOptions& opts,
                         ContinuationReport* report) {
    require(!schedule.empty(), "eps schedule is empty");
    require(schedule.front() >= 1e-2, "eps schedule must start at or above 1e-2");
    require(schedule.back() >= 1e-4, "eps schedule must end at or above 1e-4");
    for (std::size_t k = 1; k < schedule.size(); ++k)
        require(schedule[k] < schedule[k - 1], "eps schedule must be strictly decreasing");
    ContinuationReport rep;
    Profile current = guess;
    Profile last_good;
    bool have_good = false;
    for (double e : schedule) {
        ProblemParams prm = params;
        prm.eps = e;
        SolveReport sr;
        Profile next = solve_profile(prm, have_good ? last_good : current, opts, &sr);
        if (!next.converged) {
            rep.stage_failed = true;
            rep.failed_eps = e;
            rep.message = "stage eps=" + format_g(e) + " failed: " + sr.message;
            if (!have_good) last_good = next;
            break;
        }
        if (have_good) {
            double d = 0.0;
            for (std::size_t i = 0; i < next.values.size(); ++i)
                d = std::max(d, std::abs(next.values[i] - last_good.values[i]));
            rep.distances.push_back(d);
        }
        rep.eps_done.push_back(e);
        last_good = next;
        have_good = true;
    }
    if (report) *report = rep;
    return last_good;
}

TailFrequency tail_frequency_estimate(const Profile& profile) {
    const auto& y = profile.mesh.nodes;
    const auto& F = profile.values;
    const std::size_t N = F.size();
    const double sup = profile.sup_norm();
    if (sup == 0.0) throw ComputeError("no tail zeros: profile vanishes");
    // Tail: right of the outermost dominant point, up to where |F| is still resolved.
    std::size_t start = 0, stop = 0;
    for (std::size_t i = 0; i < N; ++i) {
        if (std::abs(F[i]) >= 0.5 * sup) start = i;
        if (std::abs(F[i]) >= 1e-10 * sup) stop = i;
    }
    std::vector<double> zeros;
    for (std::size_t i = start; i + 1 <= stop && i + 1 < N; ++i) {
        if ((F[i] > 0.0 && F[i + 1] <= 0.0) || (F[i] < 0.0 && F[i + 1] >= 0.0)) {
            if (F[i + 1] == 0.0) continue;
            const double t = F[i] / (F[i] - F[i + 1]);
            zeros.push_back(y[i] + t * (y[i + 1] - y[i]));
        }
    }
    // The first tail zero sits in the transition layer; skip its gap.
    if (zeros.size() < 4) throw ComputeError("too few tail zeros (" + std::to_string(zeros.size()) + ")");
    const double mean_gap = (zeros.back() - zeros[1]) / static_cast<double>(zeros.size() - 2);
    TailFrequency tf{};
    tf.frequency = M_PI / mean_gap;
    tf.predicted = std::sqrt(0.5) * std::pow(profile.params.eps, -profile.params.n / 4.0);
    tf.zeros = static_cast<int>(zeros.size());
    return tf;
}

}  // namespace blowup
