#pragma once

#include <string>
#include <vector>

#include "blowup/periodic.hpp"
#include "blowup/profile.hpp"

namespace blowup {

/// One multiindex entry: a run of crossings of a single level (-1, 0 or +1).
/// level 0 tokens carry an unsigned count; equilibrium tokens count is signed.
struct Token {
    int level = 0;
    int count = 0;

    int signed_count() const { return level < 0 ? -count : count; }
    bool operator==(const Token&) const = default;
};

struct MultiIndex {
    std::vector<Token> tokens;
    std::vector<std::vector<double>> locations;  // crossing positions per token

    std::string to_string() const;  // "{+2,1,-2}"
    bool operator==(const MultiIndex& o) const { return tokens == o.tokens; }
};

/// Parses "{+2,1,-2}" or "+2,1,-2"; signs mark equilibrium tokens.
std::vector<Token> parse_tokens(const std::string& text);

struct ClassifyOptions {
    double tol_zero = 1e-3;
    double tol_eq = 5e-2;
    double core_fraction = 0.5;  // outermost |F| >= core_fraction * sup bound the core
};

/// Crossings of -1, 0, +1 inside the core, each with a hysteresis band,
/// grouped into tokens. Half-domain profiles are unfolded first.
MultiIndex classify(const Profile& profile, const ClassifyOptions& opts = {});

/// Zero crossings in the core whose slope magnitude exceeds slope_tol.
int transversal_zeros(const Profile& profile, double slope_tol = 1e-2, const ClassifyOptions& opts = {});

/// Full-domain copy of a half-domain profile by its parity (sym / antisym).
Profile unfold(const Profile& profile);

/// Same profile on the mesh with every interval bisected (N -> 2N-1 nodes),
/// values by cubic interpolation; not converged.
Profile refine(const Profile& profile);

enum class FamilyKind { basic, glue_pp, glue_mp, osc_plus, q_type, custom };

struct FamilySpec {
    FamilyKind kind = FamilyKind::basic;
    int index = 0;            // l for basic, k for gluing, 2k for osc_plus
    double separation = 7.0;  // hump spacing
    double n = 0.2;
    double plateau_end = 2.0;  // q_type: F = 1 on [0, plateau_end]
    double tail_width = 4.0;   // q_type: length of the decaying shoulder
    std::vector<Token> tokens;  // custom

    void validate() const;
    std::string to_string() const;
};

/// "basic:0", "glue_pp:2", "glue_mp:1", "osc_plus:4", "q", "custom:{+2,1,-2}".
FamilySpec parse_family(const std::string& text);

struct GuessContext {
    const Profile* f0 = nullptr;         // converged F_0 at the same n
    const PeriodicOrbit* orbit = nullptr;  // orbit about +1 for osc_plus
};

/// Unconverged initial guess satisfying the boundary rows exactly.
Profile guess_factory(const FamilySpec& spec, const Mesh& mesh, const ProblemParams& params,
                      const GuessContext& ctx = {});

/// Smooth even bump (1 - (y/width)^2)^2 with unit maximum.
double bump_template(double y, double width = 4.0);

}  // namespace blowup
