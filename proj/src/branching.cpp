#include "blowup/branching.hpp"

#include <algorithm>
#include <cmath>

#include "blowup/errors.hpp"
#include "blowup/numfmt.hpp"

namespace blowup {

std::string to_string(Direction d) { return d == Direction::increasing ? "increasing" : "decreasing"; }

std::string to_string(BranchEnd e) {
    switch (e) {
        case BranchEnd::completed: return "completed";
        case BranchEnd::newton_failure: return "newton-failure";
        case BranchEnd::turning_suspected: return "turning-suspected";
    }
    return "";
}

std::vector<double> make_schedule(double p_start, double p_end, double dp) {
    require(std::isfinite(p_start) && std::isfinite(p_end) && std::isfinite(dp), "schedule bounds must be finite");
    require(dp > 0.0, "dp must be > 0");
    const double span = std::abs(p_end - p_start);
    const double dir = p_end >= p_start ? 1.0 : -1.0;
    const long m = std::lround(std::ceil(span / dp - 1e-9));
    std::vector<double> s;
    for (long k = 0; k <= m; ++k) s.push_back(k == m ? p_end : p_start + dir * dp * k);
    if (s.size() >= 2 && s.front() == s[1]) s.erase(s.begin());
    return s;
}

namespace {

double max_diff(const std::vector<double>& a, const std::vector<double>& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace

Branch trace_p_branch(const Profile& start, const std::vector<double>& schedule, const BranchOptions& opts,
                      const std::string& label) {
    if (!start.converged) throw DomainError("branch start profile is not converged");
    if (schedule.empty()) throw DomainError("empty p schedule");
    const double p0 = start.params.p;
    const double dir = schedule.front() > p0 ? 1.0 : -1.0;
    double prev = p0;
    for (double p : schedule) {
        require(std::isfinite(p) && p >= 1.0, "schedule entries must be finite and >= 1");
        require((p - prev) * dir > 0.0, "p schedule must be strictly monotone away from the start");
        require(std::abs(p - prev) <= opts.max_step * (1.0 + 1e-12),
                "p step " + format_g(std::abs(p - prev)) + " exceeds max_step " + format_g(opts.max_step));
        prev = p;
    }

    Branch b;
    b.label = label;
    b.n = start.params.n;
    b.direction = dir > 0 ? Direction::increasing : Direction::decreasing;
    b.schedule = schedule;
    Profile cur = start;
    double rate = -1.0;  // last accepted ||dF|| / |dp|

    for (double target : schedule) {
        double step = target - cur.params.p;
        int halvings = 0;
        while (cur.params.p != target) {
            const double remaining = target - cur.params.p;
            const double p_try = std::abs(remaining) <= std::abs(step) ? target : cur.params.p + step;
            Profile guess = cur;
            guess.params.p = p_try;
            guess.converged = false;
            SolveReport rep;
            Profile next = solve_profile(guess.params, guess, opts.newton, &rep);
            const double r = max_diff(next.values, cur.values) / std::abs(p_try - cur.params.p);
            const bool jump = next.converged && rate > 0.0 && r > opts.jump_factor * std::max(rate, 1e-2);
            if (next.converged && !jump) {
                BranchRecord rec;
                rec.p = p_try;
                rec.sup_norm = next.sup_norm();
                rec.residual_norm = next.residual_norm;
                rec.converged = true;
                rec.newton_iters = next.newton_iters;
                rec.halvings = halvings;
                rec.change_rate = r;
                b.records.push_back(rec);
                if (opts.keep_profiles) b.profiles.push_back(next);
                cur = std::move(next);
                rate = r;
                continue;
            }
            if (halvings == opts.max_halvings) {
                BranchRecord rec;
                rec.p = p_try;
                rec.sup_norm = next.sup_norm();
                rec.residual_norm = next.residual_norm;
                rec.converged = false;
                rec.newton_iters = next.newton_iters;
                rec.halvings = halvings;
                b.records.push_back(rec);
                b.stop_reason = jump ? "warm-start jump at p=" + format_g(p_try, 10) + " (||dF||/|dp| = " +
                                           format_g(r) + " vs " + format_g(rate) + ")"
                                     : "newton failure at p=" + format_g(p_try, 10) + " after " +
                                           std::to_string(halvings) + " halvings: " + rep.message;
                return b;
            }
            ++halvings;
            step *= 0.5;
        }
    }
    b.schedule_completed = true;
    b.stop_reason = "schedule completed";
    return b;
}

BranchCurve branch_summary(const Branch& branch) {
    BranchCurve c;
    c.stop_reason = branch.stop_reason;
    for (const auto& r : branch.records) c.points.push_back({r.p, r.sup_norm, r.residual_norm, r.converged, r.sup_norm});
    return c;
}

BranchEnd detect_branch_end(const Branch& branch, const TurningHeuristic& h) {
    if (branch.schedule_completed) return BranchEnd::completed;
    std::vector<const BranchRecord*> ok;
    for (const auto& r : branch.records)
        if (r.converged) ok.push_back(&r);
    if (ok.size() < 3) return BranchEnd::newton_failure;
    const auto& a = *ok[ok.size() - 3];
    const auto& m = *ok[ok.size() - 2];
    const auto& z = *ok[ok.size() - 1];
    const bool growing = m.change_rate > a.change_rate && z.change_rate > m.change_rate &&
                         z.change_rate >= h.rate_growth * a.change_rate;
    return growing && z.halvings > 0 ? BranchEnd::turning_suspected : BranchEnd::newton_failure;
}

}  // namespace blowup
