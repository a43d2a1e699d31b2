#include "blowup/run/commands.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "blowup/bvp.hpp"
#include "blowup/errors.hpp"
#include "blowup/io.hpp"
#include "blowup/model.hpp"
#include "blowup/numfmt.hpp"
#include "blowup/oscillation.hpp"
#include "blowup/patterns.hpp"
#include "blowup/run/manifest.hpp"
#include "blowup/spectral.hpp"
#include "blowup/variational.hpp"

namespace blowup::run {

namespace {

using nlohmann::json;

std::string default_out() {
    const char* e = std::getenv("BLOWUPLAB_OUT");
    return e && *e ? std::string(e) : std::string("out");
}

/// State shared by one command invocation.
struct Run {
    RunManifest man;
    fs::path out;
    std::string name;
    std::ostream& log;

    fs::path file(const std::string& suffix) const { return out / (name + suffix); }
    void output(const std::string& suffix) { man.add_output(name + suffix); }
};

struct SolveOpts {
    double n = 0.0, p = 0.0, eps = 1e-2;
    std::string bc = "far", family = "basic:0", templ;
    double R = 50.0, tol = 1e-6, separation = 7.0, dp = 0.05;
    double grade_center = 0.0, grade_strength = 0.0;
    int N = 4001, max_iters = 200;
    bool warm_start = false;
    std::vector<double> eps_schedule;
};

struct BranchOpts {
    std::string from, direction, label;
    double p_start = std::nan(""), p_end = 0.0, dp = 0.01, tol = 1e-8;
    bool save_profiles = false;
};

struct OscOpts {
    double n = 0.0, mu = std::nan(""), span = 200.0, tol = 1e-12, delta = 1e-9, drift_tol = 1e-8;
    int lambda = -1, samples = 4000;
    std::vector<double> init{1e-3, 0.0, 0.0};
};

struct KernelOpts {
    double L = 40.0;
    int N = 8000, lmax = 6;
};

struct EigenOpts {
    std::vector<double> ns{0.0, 0.2, 1.0}, Rs{1.0, 2.0};
    int nodes = 401;
};

struct ClassifyOpts {
    std::string profile;
    double tol_zero = 1e-3, tol_eq = 5e-2, slope_tol = 1e-2;
};

int cmd_solve(const SolveOpts& o, Run& run) {
    ProblemParams prm{o.n, o.p, o.eps};
    prm.validate();
    if (prm.n > 0.0 && prm.eps <= 0.0) throw DomainError("eps must be > 0 for n > 0");
    const BoundaryKind want = boundary_from_string(o.bc);
    const bool half = want != BoundaryKind::dirichlet_far;
    const Mesh mesh = o.grade_strength > 0.0 ? Mesh::graded(o.R, o.N, o.grade_center, o.grade_strength, half)
                                             : Mesh::uniform(o.R, o.N, half);
    FamilySpec fam = parse_family(o.family);
    fam.n = o.n;
    fam.separation = o.separation;
    fam.validate();

    ProblemParams gp = prm;
    if (o.warm_start) gp.p = o.n + 1.0;
    if (!o.eps_schedule.empty()) gp.eps = o.eps_schedule.front();
    NewtonOptions no;
    no.tol = o.tol;
    no.max_iters = o.max_iters;

    GuessContext ctx;
    Profile templ;
    const bool needs_template = !(fam.kind == FamilyKind::q_type || (fam.kind == FamilyKind::basic && fam.index == 0));
    if (needs_template) {
        if (!o.templ.empty()) {
            templ = io::read_profile(o.templ);
            run.man.add_input(o.templ);
            run.man.add_input(io::sidecar_path(o.templ));
        } else {
            const Mesh tm = half ? Mesh::uniform(o.R, o.N, true) : mesh;
            templ = solve_profile(gp, guess_factory(parse_family("basic:0"), tm, gp), no);
            if (!templ.converged) throw ComputeError("could not compute the F_0 template at p=" + format_g(gp.p));
        }
        ctx.f0 = &templ;
    }
    Profile guess = guess_factory(fam, mesh, gp, ctx);
    if (guess.bc != want)
        throw DomainError("family " + fam.to_string() + " gives bc " + to_string(guess.bc) + ", requested " + o.bc);

    SolveReport rep;
    Profile sol;
    if (!o.eps_schedule.empty()) {
        ContinuationReport crep;
        sol = eps_continuation(gp, guess, o.eps_schedule, no, &crep);
        run.man.stats["eps_done"] = crep.eps_done;
        run.man.stats["eps_distances"] = crep.distances;
        if (crep.stage_failed) run.man.stats["eps_failure"] = crep.message;
    } else {
        sol = solve_profile(gp, guess, no, &rep);
        run.man.stats["solver_status"] = to_string(rep.status);
        run.man.stats["solver_message"] = rep.message;
    }
    bool reached = true;
    if (o.warm_start && sol.converged && sol.params.p != o.p) {
        const double dir = o.p > sol.params.p ? 1.0 : -1.0;
        const double first = std::abs(o.p - sol.params.p) <= o.dp ? o.p : sol.params.p + dir * o.dp;
        BranchOptions bo;
        bo.newton = no;
        bo.max_step = std::max(o.dp, bo.max_step);
        const Branch br = trace_p_branch(sol, make_schedule(first, o.p, o.dp), bo, "warm-start");
        run.man.stats["warm_start_steps"] = br.records.size();
        run.man.stats["warm_start_stop"] = br.stop_reason;
        reached = br.schedule_completed;
        if (!br.profiles.empty()) sol = br.profiles.back();
    }
    io::write_profile(sol, run.file(".csv"), o.tol);
    run.output(".csv");
    run.output(".json");
    auto& st = run.man.stats;
    st["converged"] = sol.converged;
    st["p_reached"] = sol.params.p;
    st["newton_iters"] = sol.newton_iters;
    st["residual_norm"] = sol.residual_norm;
    st["sup_norm"] = sol.sup_norm();
    if (sol.converged) {
        st["multiindex"] = classify(sol).to_string();
        st["transversal_zeros"] = transversal_zeros(sol);
    }
    run.log << (sol.converged && reached ? "converged" : "not converged") << " p=" << format_g(sol.params.p, 10)
            << " sup_norm=" << format_g(sol.sup_norm(), 10) << " residual=" << format_g(sol.residual_norm, 3)
            << " iters=" << sol.newton_iters << '\n';
    return sol.converged && reached ? kOk : kNoConvergence;
}

int cmd_branch(const BranchOpts& o, Run& run) {
    const Profile start = io::read_profile(o.from);
    run.man.add_input(o.from);
    run.man.add_input(io::sidecar_path(o.from));
    if (!start.converged) throw DomainError("start profile " + o.from + " is not converged");
    if (o.p_end == start.params.p) throw DomainError("empty schedule: p-end equals the start profile's p");
    const double dir = o.p_end > start.params.p ? 1.0 : -1.0;
    if (!o.direction.empty() && (o.direction == "increasing") != (dir > 0.0))
        throw DomainError("--direction " + o.direction + " contradicts p-end relative to the start p");
    const double first = std::isnan(o.p_start) ? start.params.p + dir * o.dp : o.p_start;
    if ((o.p_end - first) * dir < 0.0) throw DomainError("empty schedule: p-start lies beyond p-end");
    BranchOptions bo;
    bo.newton.tol = o.tol;
    Branch br = trace_p_branch(start, make_schedule(first, o.p_end, o.dp), bo, o.label);
    const BranchEnd end = detect_branch_end(br);
    if (o.save_profiles) {
        std::size_t k = 0;
        for (auto& r : br.records) {
            if (!r.converged) continue;
            char buf[32];
            std::snprintf(buf, sizeof buf, "_profiles/%04zu.csv", k);
            io::write_profile(br.profiles[k], run.file(buf), o.tol);
            run.output(buf);
            std::string side = buf;
            side.replace(side.size() - 4, 4, ".json");
            run.output(side);
            r.profile_ref = run.name + buf;
            ++k;
        }
    }
    io::write_branch_curve(br, run.file(".csv"));
    io::write_branch_manifest(br, end, run.file(".json"));
    run.output(".csv");
    run.output(".json");
    auto& st = run.man.stats;
    st["end"] = to_string(end);
    st["stop_reason"] = br.stop_reason;
    st["records"] = br.records.size();
    for (auto it = br.records.rbegin(); it != br.records.rend(); ++it)
        if (it->converged) {
            st["last_converged_p"] = it->p;
            st["last_sup_norm"] = it->sup_norm;
            break;
        }
    run.log << "branch " << to_string(end) << ": " << br.stop_reason << " (" << br.records.size() << " records)\n";
    return kOk;
}

int cmd_oscillate(const OscOpts& o, Run& run) {
    require(o.n > 0.0, "oscillate needs n > 0");
    require(o.lambda == 1 || o.lambda == -1, "--lambda must be -1 or 1");
    require(o.init.size() == 3, "--init takes phi,phi1,phi2");
    const double mu = std::isnan(o.mu) ? (2.0 * o.n + 3.0) / o.n : o.mu;
    const OscState init{0.0, o.init[0], o.init[1], o.init[2]};
    auto& st = run.man.stats;
    st["mu"] = mu;
    if (o.lambda == -1) {
        PeriodicSearchOptions ps;
        ps.span = o.span;
        ps.drift_tol = o.drift_tol;
        ps.ode = {o.tol, o.delta};
        const auto pc = find_periodic_osc(o.n, mu, init, ps);
        std::vector<double> s, phi;
        for (const auto& [a, b] : pc.samples) {
            s.push_back(a);
            phi.push_back(b);
        }
        io::write_csv(run.file("_period.csv"), {"s", "phi"}, {s, phi});
        run.output("_period.csv");
        st["period"] = pc.period;
        st["amplitude"] = pc.amplitude;
        st["drift"] = pc.drift;
        run.log << "periodic component: period=" << format_g(pc.period, 10) << " amplitude=" << format_g(pc.amplitude, 8)
                << " drift=" << format_g(pc.drift, 3) << '\n';
    }
    std::vector<double> at(o.samples + 1);
    for (int k = 0; k <= o.samples; ++k) at[k] = o.span * k / o.samples;
    const auto tr = integrate_osc(init, o.n, mu, o.lambda, {0.0, o.span}, at, {o.tol, o.delta});
    io::write_trajectory(tr.samples, run.file(".csv"));
    run.output(".csv");
    st["final_phi"] = tr.final_state.phi;
    st["steps"] = tr.steps;
    if (o.lambda == 1) {
        st["equilibrium"] = osc_equilibrium(o.n, mu);
        run.log << "final phi=" << format_g(tr.final_state.phi, 10) << " equilibrium=+-"
                << format_g(osc_equilibrium(o.n, mu), 10) << '\n';
    }
    return kOk;
}

int cmd_kernel(const KernelOpts& o, Run& run) {
    require(o.lmax >= 0 && o.lmax <= 8, "--lmax must lie in [0, 8]");
    const KernelTable t = compute_kernel(o.L, o.N);
    io::write_kernel(t, run.file(".csv"));
    run.output(".csv");
    std::vector<std::vector<double>> M(o.lmax + 1, std::vector<double>(o.lmax + 1));
    double off = 0.0;
    for (int l = 0; l <= o.lmax; ++l)
        for (int k = 0; k <= o.lmax; ++k) {
            M[l][k] = pairing(t, l, k);
            off = std::max(off, std::abs(M[l][k] - (l == k ? 1.0 : 0.0)));
        }
    io::write_pairings(M, run.file("_pairings.csv"));
    run.output("_pairings.csv");
    double res = 0.0;
    for (int l = 0; l <= 4; ++l) res = std::max(res, eigen_residual(t, l, 10.0));
    auto& st = run.man.stats;
    st["normalization"] = t.normalization;
    st["F0"] = t.F[0];
    st["decay_d"] = t.decay_d;
    st["decay_D"] = t.decay_D;
    st["eigen_residual_max"] = res;
    st["biorthogonality_error"] = off;
    run.log << "normalization=" << format_g(t.normalization, 16) << " d=" << format_g(t.decay_d, 6)
            << " eigen_residual=" << format_g(res, 3) << " biorthogonality_error=" << format_g(off, 3) << '\n';
    return kOk;
}

int cmd_eigen(const EigenOpts& o, Run& run) {
    std::vector<double> ns, Rs, ls;
    json counts = json::array();
    for (double n : o.ns)
        for (double R : o.Rs) {
            const double l1 = first_nonlinear_eigenvalue(n, R, o.nodes);
            ns.push_back(n);
            Rs.push_back(R);
            ls.push_back(l1);
            int K = 0;
            while (K < 1000 && std::pow(K + 1.0, 4.0 + 2.0 * n) * l1 < 1.0) ++K;
            counts.push_back({{"n", n}, {"R", R}, {"below_one", K}});
            run.log << "n=" << format_g(n) << " R=" << format_g(R) << " lambda1=" << format_g(l1, 10) << '\n';
        }
    io::write_csv(run.file(".csv"), {"n", "R", "lambda1"}, {ns, Rs, ls});
    run.output(".csv");
    run.man.stats["below_one"] = counts;
    return kOk;
}

int cmd_classify(const ClassifyOpts& o, Run& run) {
    const Profile p = io::read_profile(o.profile);
    run.man.add_input(o.profile);
    run.man.add_input(io::sidecar_path(o.profile));
    ClassifyOptions co;
    co.tol_zero = o.tol_zero;
    co.tol_eq = o.tol_eq;
    const auto m = classify(p, co);
    const int tz = transversal_zeros(p, o.slope_tol, co);
    io::write_classification(m, tz, run.file(".json"));
    run.output(".json");
    run.man.stats["multiindex"] = m.to_string();
    run.man.stats["transversal_zeros"] = tz;
    run.log << m.to_string() << '\n';
    return kOk;
}

std::vector<std::string> strip_out(const std::vector<std::string>& argv) {
    std::vector<std::string> r;
    for (std::size_t i = 0; i < argv.size(); ++i) {
        if (argv[i] == "--out") {
            ++i;
            continue;
        }
        if (argv[i].rfind("--out=", 0) == 0) continue;
        r.push_back(argv[i]);
    }
    return r;
}

int cmd_replay(const std::string& path, bool keep, std::ostream& out, std::ostream& err) {
    const RunManifest m = RunManifest::read(path);
    const fs::path cwd = m.cwd;
    for (const auto& in : m.inputs) {
        const fs::path p = fs::path(in.path).is_absolute() ? fs::path(in.path) : cwd / in.path;
        if (!fs::exists(p) || sha256_file(p) != in.sha256) {
            err << "input changed or missing: " << in.path << '\n';
            return kNoConvergence;
        }
    }
    std::string tmpl = (fs::temp_directory_path() / "blowuplab-replay-XXXXXX").string();
    if (!mkdtemp(tmpl.data())) throw std::runtime_error("cannot create a replay directory");
    const fs::path tmp = tmpl;
    auto args = strip_out(m.argv);
    args.push_back("--out");
    args.push_back(tmp.string());
    const fs::path here = fs::current_path();
    fs::current_path(cwd);
    std::ostringstream sink;
    int rc;
    try {
        rc = run_cli(args, sink, err);
    } catch (...) {
        fs::current_path(here);
        throw;
    }
    fs::current_path(here);
    bool ok = rc == m.exit_code;
    if (!ok) out << "exit code " << rc << " (recorded " << m.exit_code << ")\n";
    for (const auto& o : m.outputs) {
        const fs::path p = tmp / o.path;
        const bool same = fs::exists(p) && sha256_file(p) == o.sha256;
        out << (same ? "OK       " : "MISMATCH ") << o.path << '\n';
        ok = ok && same;
    }
    if (keep)
        out << "replay outputs kept in " << tmp.string() << '\n';
    else
        fs::remove_all(tmp);
    out << (ok ? "replay: identical\n" : "replay: differs\n");
    return ok ? kOk : kNoConvergence;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Numerical lab for self-similar blow-up profiles of the fourth-order p-Laplacian equation"};
    app.name("blowuplab");
    app.require_subcommand(1);

    std::string out_dir = default_out();
    std::map<std::string, std::string> names;  // per-subcommand output stem
    auto common = [&](CLI::App* s, const std::string& stem) {
        auto& name = names[s->get_name()] = stem;
        s->add_option("--out", out_dir, "Output directory (default $BLOWUPLAB_OUT or ./out)");
        s->add_option("--name", name, "Stem for output files")->capture_default_str();
    };
    std::function<int(Run&)> action;
    json params;

    SolveOpts so;
    auto* solve = app.add_subcommand("solve", "Solve for a similarity profile");
    solve->add_option("--n", so.n, "Degeneracy exponent n >= 0")->required()->check(CLI::NonNegativeNumber);
    solve->add_option("--p", so.p, "Source exponent p >= 1")->required()->check(CLI::Range(1.0, 1e6));
    solve->add_option("--eps", so.eps, "Regularization eps")->capture_default_str()->check(CLI::NonNegativeNumber);
    solve->add_option("--eps-schedule", so.eps_schedule, "Decreasing eps list for continuation")->delimiter(',');
    solve->add_option("--bc", so.bc, "Boundary condition: far (full domain), sym, antisym, q (half domain)")
        ->capture_default_str()
        ->check(CLI::IsMember({"far", "sym", "antisym", "q"}));
    solve->add_option("--family", so.family, "Initial-guess family, e.g. basic:0, glue_pp:2, osc_plus:4, q, custom:{+2,1,-2}")
        ->capture_default_str();
    solve->add_option("--template", so.templ, "Converged F_0 profile CSV used by composite families")->check(CLI::ExistingFile);
    solve->add_option("--separation", so.separation, "Hump spacing for composite guesses")->capture_default_str()->check(CLI::PositiveNumber);
    solve->add_option("--R", so.R, "Domain half-length")->capture_default_str()->check(CLI::PositiveNumber);
    solve->add_option("--N", so.N, "Number of mesh nodes")->capture_default_str()->check(CLI::Range(64, 10000000));
    solve->add_option("--grade-center", so.grade_center, "Graded mesh: |y| where nodes cluster")->capture_default_str();
    solve->add_option("--grade-strength", so.grade_strength, "Graded mesh: extra density (0 = uniform)")->capture_default_str()->check(CLI::NonNegativeNumber);
    solve->add_option("--tol", so.tol, "Newton tolerance on the residual max-norm")->capture_default_str()->check(CLI::PositiveNumber);
    solve->add_option("--max-iters", so.max_iters, "Newton iteration budget")->capture_default_str()->check(CLI::PositiveNumber);
    solve->add_flag("--warm-start", so.warm_start, "Solve at p = n+1 first, then continue in p");
    solve->add_option("--dp", so.dp, "Continuation step for --warm-start")->capture_default_str()->check(CLI::Range(1e-6, 5e-2));
    common(solve, "profile");
    solve->callback([&] {
        params = {{"n", so.n}, {"p", so.p}, {"eps", so.eps}, {"eps_schedule", so.eps_schedule}, {"bc", so.bc},
                  {"family", so.family}, {"template", so.templ}, {"separation", so.separation}, {"R", so.R},
                  {"N", so.N}, {"grade_center", so.grade_center}, {"grade_strength", so.grade_strength},
                  {"tol", so.tol}, {"max_iters", so.max_iters}, {"warm_start", so.warm_start}, {"dp", so.dp}};
        action = [&](Run& r) { return cmd_solve(so, r); };
    });

    BranchOpts bo;
    auto* branch = app.add_subcommand("branch", "Trace a p-branch from a converged profile");
    branch->add_option("--from-profile", bo.from, "Converged start profile CSV")->required();
    branch->add_option("--p-start", bo.p_start, "First p of the schedule (default: start p + dp)");
    branch->add_option("--p-end", bo.p_end, "Last p of the schedule")->required()->check(CLI::Range(1.0, 1e6));
    branch->add_option("--dp", bo.dp, "Schedule step |dp| <= 0.05")->capture_default_str()->check(CLI::Range(1e-6, 5e-2));
    branch->add_option("--direction", bo.direction, "increasing or decreasing (checked against p-end)")
        ->check(CLI::IsMember({"increasing", "decreasing"}));
    branch->add_option("--label", bo.label, "Family tag stored in the branch manifest");
    branch->add_option("--tol", bo.tol, "Newton tolerance")->capture_default_str()->check(CLI::PositiveNumber);
    branch->add_flag("--save-profiles", bo.save_profiles, "Write every converged profile");
    common(branch, "branch");
    branch->callback([&] {
        params = {{"from_profile", bo.from}, {"p_start", std::isnan(bo.p_start) ? json(nullptr) : json(bo.p_start)},
                  {"p_end", bo.p_end}, {"dp", bo.dp}, {"direction", bo.direction}, {"label", bo.label},
                  {"tol", bo.tol}, {"save_profiles", bo.save_profiles}};
        action = [&](Run& r) { return cmd_branch(bo, r); };
    });

    OscOpts oo;
    auto* osc = app.add_subcommand("oscillate", "Integrate the interface oscillation ODE");
    osc->add_option("--n", oo.n, "Degeneracy exponent n > 0")->required()->check(CLI::PositiveNumber);
    osc->add_option("--mu", oo.mu, "Power-law exponent (default (2n+3)/n)");
    osc->add_option("--lambda", oo.lambda, "Sign of the right-hand side: -1 periodic search, 1 equilibria")
        ->capture_default_str()
        ->check(CLI::IsMember({-1, 1}));
    osc->add_option("--init", oo.init, "Initial phi,phi1,phi2")->delimiter(',')->expected(3);
    osc->add_option("--span", oo.span, "s-span of the dumped trajectory and first search window")->capture_default_str()->check(CLI::PositiveNumber);
    osc->add_option("--tol", oo.tol, "Integrator tolerance in [1e-12, 1e-6]")->capture_default_str()->check(CLI::Range(1e-12, 1e-6));
    osc->add_option("--delta", oo.delta, "Regularization of |P_2|^n")->capture_default_str()->check(CLI::PositiveNumber);
    osc->add_option("--drift-tol", oo.drift_tol, "Cycle-to-cycle drift accepted as periodic")->capture_default_str()->check(CLI::PositiveNumber);
    osc->add_option("--samples", oo.samples, "Trajectory dump points")->capture_default_str()->check(CLI::PositiveNumber);
    common(osc, "oscillation");
    osc->callback([&] {
        params = {{"n", oo.n}, {"mu", std::isnan(oo.mu) ? json(nullptr) : json(oo.mu)}, {"lambda", oo.lambda},
                  {"init", oo.init}, {"span", oo.span}, {"tol", oo.tol}, {"delta", oo.delta},
                  {"drift_tol", oo.drift_tol}, {"samples", oo.samples}};
        action = [&](Run& r) { return cmd_oscillate(oo, r); };
    });

    KernelOpts ko;
    auto* kernel = app.add_subcommand("kernel", "Tabulate the biharmonic kernel and its duality pairings");
    kernel->add_option("--L", ko.L, "Half-length of the kernel domain (>= 15)")->capture_default_str();
    kernel->add_option("--N", ko.N, "Collocation intervals (>= 2000)")->capture_default_str();
    kernel->add_option("--lmax", ko.lmax, "Largest index in the pairing matrix (<= 8)")->capture_default_str();
    common(kernel, "kernel");
    kernel->callback([&] {
        params = {{"L", ko.L}, {"N", ko.N}, {"lmax", ko.lmax}};
        action = [&](Run& r) { return cmd_kernel(ko, r); };
    });

    EigenOpts eo;
    auto* eigen = app.add_subcommand("eigen", "First nonlinear eigenvalue on [-R, R]");
    eigen->add_option("--n", eo.ns, "Comma-separated n values")->delimiter(',')->capture_default_str()->check(CLI::NonNegativeNumber);
    eigen->add_option("--R", eo.Rs, "Comma-separated R values")->delimiter(',')->capture_default_str()->check(CLI::PositiveNumber);
    eigen->add_option("--nodes", eo.nodes, "Mesh nodes on [-R, R]")->capture_default_str()->check(CLI::Range(21, 100000));
    common(eigen, "eigen");
    eigen->callback([&] {
        params = {{"n", eo.ns}, {"R", eo.Rs}, {"nodes", eo.nodes}};
        action = [&](Run& r) { return cmd_eigen(eo, r); };
    });

    ClassifyOpts co;
    auto* cls = app.add_subcommand("classify", "Multiindex of a converged profile");
    cls->add_option("--profile", co.profile, "Profile CSV with sidecar")->required();
    cls->add_option("--tol-zero", co.tol_zero, "Hysteresis band for zero crossings")->capture_default_str()->check(CLI::PositiveNumber);
    cls->add_option("--tol-eq", co.tol_eq, "Hysteresis band for crossings of +-1")->capture_default_str()->check(CLI::PositiveNumber);
    cls->add_option("--slope-tol", co.slope_tol, "Slope threshold for transversal zeros")->capture_default_str()->check(CLI::PositiveNumber);
    common(cls, "classification");
    cls->callback([&] {
        params = {{"profile", co.profile}, {"tol_zero", co.tol_zero}, {"tol_eq", co.tol_eq}, {"slope_tol", co.slope_tol}};
        action = [&](Run& r) { return cmd_classify(co, r); };
    });

    std::string manifest;
    bool keep = false;
    auto* replay = app.add_subcommand("replay", "Rerun a stored manifest and compare output hashes");
    replay->add_option("manifest", manifest, "Manifest JSON")->required()->check(CLI::ExistingFile);
    replay->add_flag("--keep", keep, "Keep the replay output directory");

    std::string command;
    try {
        std::vector<std::string> rev(args.rbegin(), args.rend());
        app.parse(rev);
        command = app.get_subcommands().front()->get_name();
    } catch (const CLI::ParseError& e) {
        // Help requests exit 0; every other parse failure is a usage error.
        return app.exit(e, out, err) == 0 ? kOk : kUsage;
    }

    try {
        if (command == "replay") return cmd_replay(manifest, keep, out, err);
        Run run{{}, out_dir, names.at(command), out};
        run.man.argv = args;
        run.man.command = command;
        run.man.cwd = fs::current_path().string();
        run.man.out_dir = out_dir;
        run.man.parameters = params;
        fs::create_directories(run.out);
        const auto t0 = std::chrono::steady_clock::now();
        const int rc = action(run);
        run.man.wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        run.man.exit_code = rc;
        run.man.write(run.file(".manifest.json"));
        return rc;
    } catch (const ComputeError& e) {
        err << "computation failed: " << e.what() << '\n';
        return kNoConvergence;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kUsage;
    }
}

}  // namespace blowup::run
