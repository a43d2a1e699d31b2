#pragma once

#include <string>
#include <vector>

#include "blowup/model.hpp"

namespace blowup {

enum class Spacing { uniform, graded };

/// Nodes on [0, R] (half domain) or [-R, R] (full domain).
struct Mesh {
    std::vector<double> nodes;
    Spacing spacing = Spacing::uniform;
    bool half = false;
    double grade_center = 0.0;
    double grade_strength = 0.0;

    static Mesh uniform(double R, int N, bool half = false);
    /// Nodes cluster around |y| = center with local density raised by (1 + strength).
    static Mesh graded(double R, int N, double center, double strength, bool half = false);

    std::size_t size() const { return nodes.size(); }
    double R() const { return nodes.back(); }
    void validate() const;
};

enum class BoundaryKind { symmetry, antisymmetry, q_plateau, dirichlet_far };

std::string to_string(BoundaryKind bc);
BoundaryKind boundary_from_string(const std::string& s);

enum class Normalization { scaled, physical };

struct Profile {
    Mesh mesh;
    std::vector<double> values;
    ProblemParams params;
    BoundaryKind bc = BoundaryKind::dirichlet_far;
    Normalization norm = Normalization::scaled;
    double residual_norm = 0.0;
    bool converged = false;
    int newton_iters = 0;

    double sup_norm() const;
    double at(double y) const;  // linear interpolation, zero outside the mesh
};

enum class ScaleDirection { forward, inverse };

/// forward: physical f -> scaled F; inverse: F -> f, via f(y) = A F(y/a).
Profile rescale_profile(const Profile& profile, ScaleDirection dir, ScaleTarget target);

}  // namespace blowup
