#include "blowup/patterns.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <functional>

#include "blowup/errors.hpp"

namespace blowup {

namespace {

struct Crossing {
    int level;
    double where;
    double slope;
};

// Level crossings with hysteresis: a crossing counts once the profile has
// moved beyond the band on the other side; its position is the last sign
// change of F - level before that.
std::vector<Crossing> crossings(const std::vector<double>& y, const std::vector<double>& F, std::size_t lo,
                                std::size_t hi, const ClassifyOptions& opts) {
    std::vector<Crossing> out;
    const int levels[3] = {-1, 0, 1};
    for (int c : levels) {
        const double band = c == 0 ? opts.tol_zero : opts.tol_eq;
        int state = 0;
        double pos = 0.0, slope = 0.0;
        for (std::size_t i = lo; i <= hi; ++i) {
            const double d = F[i] - c;
            if (i > lo) {
                const double dp = F[i - 1] - c;
                if ((dp < 0.0 && d >= 0.0) || (dp > 0.0 && d <= 0.0)) {
                    const double t = dp / (dp - d);
                    pos = y[i - 1] + t * (y[i] - y[i - 1]);
                    slope = (F[i] - F[i - 1]) / (y[i] - y[i - 1]);
                }
            }
            const int s = d > band ? 1 : (d < -band ? -1 : 0);
            if (s == 0) continue;
            if (state != 0 && s != state) out.push_back({c, pos, slope});
            state = s;
        }
    }
    std::stable_sort(out.begin(), out.end(), [](const Crossing& a, const Crossing& b) { return a.where < b.where; });
    return out;
}

std::vector<Crossing> core_crossings(const Profile& profile, const ClassifyOptions& opts) {
    if (!profile.converged) throw DomainError("classification needs a converged profile");
    const Profile P =
        (profile.mesh.half && profile.bc != BoundaryKind::q_plateau) ? unfold(profile) : profile;
    const double sup = P.sup_norm();
    if (!(sup > opts.tol_zero)) return {};
    const double thr = opts.core_fraction * std::min(sup, 1.0);
    std::size_t lo = 0, hi = 0;
    bool found = false;
    for (std::size_t i = 0; i < P.values.size(); ++i) {
        if (std::abs(P.values[i]) >= thr) {
            if (!found) lo = i;
            hi = i;
            found = true;
        }
    }
    return crossings(P.mesh.nodes, P.values, lo, hi, opts);
}

}  // namespace

std::string MultiIndex::to_string() const {
    std::string s = "{";
    for (std::size_t k = 0; k < tokens.size(); ++k) {
        if (k) s += ",";
        const Token& t = tokens[k];
        if (t.level > 0) s += "+";
        if (t.level < 0) s += "-";
        s += std::to_string(t.count);
    }
    return s + "}";
}

std::vector<Token> parse_tokens(const std::string& text) {
    std::string body;
    for (char ch : text)
        if (!std::isspace(static_cast<unsigned char>(ch)) && ch != '{' && ch != '}') body += ch;
    std::vector<Token> out;
    if (body.empty()) return out;
    std::size_t start = 0;
    while (start <= body.size()) {
        const std::size_t end = std::min(body.find(',', start), body.size());
        std::string item = body.substr(start, end - start);
        if (item.empty()) throw DomainError("empty multiindex token in '" + text + "'");
        int level = 0;
        if (item[0] == '+' || item[0] == '-') {
            level = item[0] == '+' ? 1 : -1;
            item = item.substr(1);
        }
        if (item.empty() || !std::all_of(item.begin(), item.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
            throw DomainError("bad multiindex token '" + body.substr(start, end - start) + "'");
        const int count = std::stoi(item);
        if (count <= 0) throw DomainError("multiindex counts must be positive");
        out.push_back({level, count});
        start = end + 1;
    }
    return out;
}

MultiIndex classify(const Profile& profile, const ClassifyOptions& opts) {
    MultiIndex m;
    for (const auto& c : core_crossings(profile, opts)) {
        if (!m.tokens.empty() && m.tokens.back().level == c.level) {
            ++m.tokens.back().count;
            m.locations.back().push_back(c.where);
        } else {
            m.tokens.push_back({c.level, 1});
            m.locations.push_back({c.where});
        }
    }
    return m;
}

int transversal_zeros(const Profile& profile, double slope_tol, const ClassifyOptions& opts) {
    int k = 0;
    for (const auto& c : core_crossings(profile, opts))
        if (c.level == 0 && std::abs(c.slope) > slope_tol) ++k;
    return k;
}

Profile unfold(const Profile& profile) {
    if (!profile.mesh.half) return profile;
    double sign = 1.0;
    if (profile.bc == BoundaryKind::antisymmetry) sign = -1.0;
    else if (profile.bc != BoundaryKind::symmetry) throw DomainError("only sym/antisym half profiles can be unfolded");
    const auto& x = profile.mesh.nodes;
    const std::size_t N = x.size();
    Profile out = profile;
    out.mesh.half = false;
    out.mesh.nodes.assign(2 * N - 1, 0.0);
    out.values.assign(2 * N - 1, 0.0);
    for (std::size_t i = 0; i < N; ++i) {
        out.mesh.nodes[N - 1 + i] = x[i];
        out.mesh.nodes[N - 1 - i] = -x[i];
        out.values[N - 1 + i] = profile.values[i];
        out.values[N - 1 - i] = sign * profile.values[i];
    }
    out.mesh.nodes[N - 1] = 0.0;
    out.bc = BoundaryKind::dirichlet_far;
    return out;
}

Profile refine(const Profile& profile) {
    const auto& x = profile.mesh.nodes;
    const auto& F = profile.values;
    const std::size_t N = x.size();
    Profile out = profile;
    out.mesh.nodes.assign(2 * N - 1, 0.0);
    out.values.assign(2 * N - 1, 0.0);
    for (std::size_t i = 0; i < N; ++i) {
        out.mesh.nodes[2 * i] = x[i];
        out.values[2 * i] = F[i];
    }
    for (std::size_t i = 0; i + 1 < N; ++i) {
        const double xm = 0.5 * (x[i] + x[i + 1]);
        out.mesh.nodes[2 * i + 1] = xm;
        // Cubic Lagrange through four neighbours, shifted inward at the ends.
        const std::size_t s = std::min(std::max<std::size_t>(i, 1), N - 3) - 1;
        double v = 0.0;
        for (std::size_t a = s; a < s + 4; ++a) {
            double w = 1.0;
            for (std::size_t b = s; b < s + 4; ++b)
                if (b != a) w *= (xm - x[b]) / (x[a] - x[b]);
            v += w * F[a];
        }
        out.values[2 * i + 1] = v;
    }
    out.converged = false;
    out.newton_iters = 0;
    return out;
}

void FamilySpec::validate() const {
    require(separation > 0.0 && std::isfinite(separation), "separation must be > 0");
    switch (kind) {
        case FamilyKind::basic: require(index >= 0 && index <= 12, "basic family index must lie in [0, 12]"); break;
        case FamilyKind::glue_pp: require(index >= 0 && index % 2 == 0, "glue_pp needs an even k >= 0"); break;
        case FamilyKind::glue_mp: require(index >= 1 && index % 2 == 1, "glue_mp needs an odd k >= 1"); break;
        case FamilyKind::osc_plus: require(index >= 2 && index % 2 == 0, "osc_plus needs an even index >= 2"); break;
        case FamilyKind::q_type:
            require(plateau_end > 0.0 && tail_width > 0.0, "q_type needs positive plateau_end and tail_width");
            break;
        case FamilyKind::custom: {
            require(!tokens.empty(), "custom family needs tokens");
            for (std::size_t k = 0; k < tokens.size(); ++k) {
                const bool eq = k % 2 == 0;
                require((tokens[k].level != 0) == eq, "custom tokens must alternate equilibrium and zero counts");
                require(tokens[k].count > 0, "multiindex counts must be positive");
                if (eq) require(tokens[k].count % 2 == 0, "custom composer supports even equilibrium counts only");
            }
            require(tokens.size() % 2 == 1, "custom tokens must end with an equilibrium count");
            for (std::size_t k = 1; k + 1 < tokens.size(); k += 2) {
                const bool flip = tokens[k - 1].level != tokens[k + 1].level;
                require((tokens[k].count % 2 == 1) == flip, "zero count parity does not match the sign change");
            }
            break;
        }
    }
}

std::string FamilySpec::to_string() const {
    switch (kind) {
        case FamilyKind::basic: return "basic:" + std::to_string(index);
        case FamilyKind::glue_pp: return "glue_pp:" + std::to_string(index);
        case FamilyKind::glue_mp: return "glue_mp:" + std::to_string(index);
        case FamilyKind::osc_plus: return "osc_plus:" + std::to_string(index);
        case FamilyKind::q_type: return "q";
        case FamilyKind::custom: return "custom:" + MultiIndex{tokens, {}}.to_string();
    }
    return "";
}

FamilySpec parse_family(const std::string& text) {
    FamilySpec f;
    const auto colon = text.find(':');
    const std::string name = text.substr(0, colon);
    const std::string arg = colon == std::string::npos ? "" : text.substr(colon + 1);
    auto integer = [&]() {
        if (arg.empty() || !std::all_of(arg.begin(), arg.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
            throw DomainError("family '" + text + "' needs a nonnegative integer argument");
        return std::stoi(arg);
    };
    if (name == "basic") {
        f.kind = FamilyKind::basic;
        f.index = integer();
    } else if (name == "glue_pp") {
        f.kind = FamilyKind::glue_pp;
        f.index = integer();
    } else if (name == "glue_mp") {
        f.kind = FamilyKind::glue_mp;
        f.index = integer();
    } else if (name == "osc_plus") {
        f.kind = FamilyKind::osc_plus;
        f.index = integer();
    } else if (name == "q" || name == "q_type") {
        f.kind = FamilyKind::q_type;
        if (!arg.empty()) throw DomainError("q family takes no argument");
    } else if (name == "custom") {
        f.kind = FamilyKind::custom;
        f.tokens = parse_tokens(arg);
    } else {
        throw DomainError("unknown family '" + name + "'");
    }
    f.validate();
    return f;
}

double bump_template(double y, double width) {
    const double z = y / width;
    if (std::abs(z) >= 1.0) return 0.0;
    const double s = 1.0 - z * z;
    return s * s;
}

namespace {

// sin(pi x) sin((k+1) pi x) on x in (0, 1): k interior zeros, C1 at the ends.
double wiggle(double x, int k) {
    if (x <= 0.0 || x >= 1.0) return 0.0;
    return std::sin(M_PI * x) * std::sin((k + 1) * M_PI * x);
}

}  // namespace

Profile guess_factory(const FamilySpec& spec, const Mesh& mesh, const ProblemParams& params,
                      const GuessContext& ctx) {
    spec.validate();
    mesh.validate();
    params.validate();
    Profile F0;
    const bool need_f0 = !(spec.kind == FamilyKind::q_type || (spec.kind == FamilyKind::basic && spec.index == 0));
    if (need_f0) {
        if (!ctx.f0) throw DomainError("family " + spec.to_string() + " needs a converged F_0 template");
        F0 = ctx.f0->mesh.half ? unfold(*ctx.f0) : *ctx.f0;
    }
    auto f0 = [&](double y) { return F0.at(y); };
    const double s = spec.separation;

    std::function<double(double)> shape;
    int parity = 1;  // +1 even, -1 odd, 0 none
    switch (spec.kind) {
        case FamilyKind::basic: {
            const int l = spec.index;
            parity = l % 2 ? -1 : 1;
            if (l == 0) {
                shape = [](double y) { return bump_template(y); };
                break;
            }
            shape = [=](double y) {
                double v = 0.0;
                for (int j = 0; j <= l; ++j) v += ((l - j) % 2 ? -1.0 : 1.0) * f0(y - (j - 0.5 * l) * s);
                return v;
            };
            break;
        }
        case FamilyKind::glue_pp:
        case FamilyKind::glue_mp: {
            const double left = spec.kind == FamilyKind::glue_pp ? 1.0 : -1.0;
            parity = spec.kind == FamilyKind::glue_pp ? 1 : -1;
            const int k = spec.index;
            auto base = [=](double y) { return left * f0(y + 0.5 * s) + f0(y - 0.5 * s); };
            const double g = 0.25 * s;
            // Tie the wiggle to the overlap of the tails, so it vanishes
            // when the copies stop interacting.
            double A = 0.0;
            for (int i = 0; i <= 200; ++i) A = std::max(A, std::abs(base(-g + 2.0 * g * i / 200.0)));
            A *= 2.0;
            shape = [=](double y) {
                const double w = k > 0 ? left * A * wiggle((y + g) / (2.0 * g), k) : 0.0;
                return base(y) + w;
            };
            break;
        }
        case FamilyKind::osc_plus: {
            PeriodicOrbit own;
            const PeriodicOrbit* orb = ctx.orbit;
            if (!orb) {
                own = shoot_periodic_full(spec.n, 1, 0.42, 0.0);
                orb = &own;
            }
            require(orb->about == 1, "osc_plus needs an orbit about +1");
            const double T = orb->period;
            const int k = spec.index / 2;
            const double edge = 0.5 * (k - 1) * T;
            const double c = orb->max_val / f0(0.0);
            const PeriodicOrbit o = *orb;
            shape = [=](double y) {
                const double ay = std::abs(y);
                if (ay >= edge) return c * f0(ay - edge);
                return o.value_at(y + edge + 0.5 * T);
            };
            break;
        }
        case FamilyKind::q_type: {
            if (!mesh.half) throw DomainError("q_type guesses need a half-domain mesh");
            parity = 0;
            const double y0 = spec.plateau_end, W = spec.tail_width;
            shape = [=](double y) {
                if (y <= y0) return 1.0;
                const double z = (y - y0) / W;
                if (z >= 1.0) return 0.0;
                return (1.0 - z * z) * (1.0 - z * z);
            };
            break;
        }
        case FamilyKind::custom: {
            // Hump groups separated by gaps; gaps whose zero count differs
            // from the natural one (0 or 1) carry a wiggle.
            struct Hump {
                double at;
                double sign;
            };
            struct Gap {
                double lo, hi, sign;
                int zeros;
            };
            std::vector<Hump> humps;
            std::vector<Gap> gaps;
            double x = 0.0;
            for (std::size_t t = 0; t < spec.tokens.size(); t += 2) {
                const double sg = spec.tokens[t].level;
                for (int h = 0; h < spec.tokens[t].count / 2; ++h) {
                    if (!humps.empty() && h > 0) x += s;
                    humps.push_back({x, sg});
                }
                if (t + 1 < spec.tokens.size()) {
                    const int z = spec.tokens[t + 1].count;
                    if (z <= 1) {
                        x += s;
                    } else {
                        const double gap = s + 2.0 * z;
                        const double half = 0.5 * gap - 3.0;
                        gaps.push_back({x + 0.5 * gap - half, x + 0.5 * gap + half, sg, z});
                        x += gap;
                    }
                }
            }
            const double shift = 0.5 * (humps.front().at + humps.back().at);
            auto rev = spec.tokens;
            std::reverse(rev.begin(), rev.end());
            auto flipped = rev;
            for (auto& tk : flipped) tk.level = -tk.level;
            parity = rev == spec.tokens ? 1 : (flipped == spec.tokens ? -1 : 0);
            shape = [=](double y) {
                double v = 0.0;
                for (const auto& h : humps) v += h.sign * f0(y + shift - h.at);
                for (const auto& g : gaps) v += 0.3 * g.sign * wiggle((y + shift - g.lo) / (g.hi - g.lo), g.zeros);
                return v;
            };
            break;
        }
    }

    Profile out;
    out.mesh = mesh;
    out.params = params;
    out.norm = Normalization::scaled;
    out.values.resize(mesh.size());
    for (std::size_t i = 0; i < mesh.size(); ++i) out.values[i] = shape(mesh.nodes[i]);
    if (mesh.half) {
        if (spec.kind == FamilyKind::q_type) {
            out.bc = BoundaryKind::q_plateau;
            out.values.front() = 1.0;
        } else if (parity == 1) {
            out.bc = BoundaryKind::symmetry;
        } else if (parity == -1) {
            out.bc = BoundaryKind::antisymmetry;
            out.values.front() = 0.0;
        } else {
            throw DomainError("family " + spec.to_string() + " has no parity; use a full-domain mesh");
        }
    } else {
        out.bc = BoundaryKind::dirichlet_far;
        out.values.front() = 0.0;
    }
    out.values.back() = 0.0;
    return out;
}

}  // namespace blowup
