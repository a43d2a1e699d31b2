#include "blowup/profile.hpp"

#include <algorithm>
#include <cmath>

#include "blowup/errors.hpp"

namespace blowup {

Mesh Mesh::uniform(double R, int N, bool half) {
    require(R > 0.0 && std::isfinite(R), "mesh half-width must be positive");
    require(N >= 64, "mesh needs at least 64 nodes");
    Mesh m;
    m.half = half;
    m.nodes.resize(N);
    const double lo = half ? 0.0 : -R;
    const double h = (R - lo) / (N - 1);
    for (int i = 0; i < N; ++i) m.nodes[i] = lo + i * h;
    if (!half)
        for (int i = 0; i < N / 2; ++i) m.nodes[N - 1 - i] = -m.nodes[i];
    m.nodes.front() = lo;
    m.nodes.back() = R;
    return m;
}

Mesh Mesh::graded(double R, int N, double center, double strength, bool half) {
    require(strength >= 0.0, "grading strength must be >= 0");
    require(center >= 0.0 && center < R, "grading center must lie in [0, R)");
    Mesh m = uniform(R, N, half);
    m.spacing = Spacing::graded;
    m.grade_center = center;
    m.grade_strength = strength;
    // Invert the cumulative density 1 + s*exp(-((|y|-c)/w)^2), w = R/10.
    const int M = 20 * N;
    const double lo = half ? 0.0 : -R;
    const double w = R / 10.0;
    std::vector<double> ys(M + 1), cum(M + 1, 0.0);
    auto dens = [&](double y) {
        const double z = (std::abs(y) - center) / w;
        return 1.0 + strength * std::exp(-z * z);
    };
    for (int k = 0; k <= M; ++k) ys[k] = lo + (R - lo) * k / M;
    for (int k = 1; k <= M; ++k)
        cum[k] = cum[k - 1] + 0.5 * (dens(ys[k - 1]) + dens(ys[k])) * (ys[k] - ys[k - 1]);
    const double total = cum.back();
    std::size_t k = 0;
    for (int i = 1; i < N - 1; ++i) {
        const double target = total * i / (N - 1);
        while (cum[k + 1] < target) ++k;
        const double t = (target - cum[k]) / (cum[k + 1] - cum[k]);
        m.nodes[i] = ys[k] + t * (ys[k + 1] - ys[k]);
    }
    if (!half) {
        // Enforce exact reflection symmetry of the node set.
        for (int i = 0; i < N / 2; ++i) {
            const double a = 0.5 * (m.nodes[N - 1 - i] - m.nodes[i]);
            m.nodes[i] = -a;
            m.nodes[N - 1 - i] = a;
        }
        if (N % 2 == 1) m.nodes[N / 2] = 0.0;
    }
    return m;
}

void Mesh::validate() const {
    require(nodes.size() >= 64, "mesh needs at least 64 nodes");
    for (std::size_t i = 1; i < nodes.size(); ++i)
        require(nodes[i] > nodes[i - 1], "mesh nodes must be strictly increasing");
    if (half)
        require(nodes.front() == 0.0, "half-domain mesh must start at 0");
    else
        require(nodes.front() == -nodes.back(), "full-domain mesh must be [-R, R]");
}

std::string to_string(BoundaryKind bc) {
    switch (bc) {
        case BoundaryKind::symmetry: return "sym";
        case BoundaryKind::antisymmetry: return "antisym";
        case BoundaryKind::q_plateau: return "q";
        case BoundaryKind::dirichlet_far: return "far";
    }
    return "far";
}

BoundaryKind boundary_from_string(const std::string& s) {
    if (s == "sym" || s == "symmetry") return BoundaryKind::symmetry;
    if (s == "antisym" || s == "antisymmetry") return BoundaryKind::antisymmetry;
    if (s == "q" || s == "q-plateau") return BoundaryKind::q_plateau;
    if (s == "far" || s == "dirichlet-far") return BoundaryKind::dirichlet_far;
    throw DomainError("unknown boundary kind: " + s);
}

double Profile::sup_norm() const {
    double m = 0.0;
    for (double v : values) m = std::max(m, std::abs(v));
    return m;
}

double Profile::at(double y) const {
    const auto& x = mesh.nodes;
    if (y < x.front() || y > x.back()) return 0.0;
    auto it = std::upper_bound(x.begin(), x.end(), y);
    if (it == x.end()) return values.back();
    const std::size_t i = static_cast<std::size_t>(it - x.begin());
    const double t = (y - x[i - 1]) / (x[i] - x[i - 1]);
    return (1.0 - t) * values[i - 1] + t * values[i];
}

Profile rescale_profile(const Profile& profile, ScaleDirection dir, ScaleTarget target) {
    const Scaling s = scaling_factors(profile.params, target);
    const Normalization from =
        dir == ScaleDirection::forward ? Normalization::physical : Normalization::scaled;
    if (profile.norm != from) throw DomainError("profile is not in the expected normalization");
    Profile out = profile;
    out.norm = dir == ScaleDirection::forward ? Normalization::scaled : Normalization::physical;
    const double A = dir == ScaleDirection::forward ? 1.0 / s.A : s.A;
    const double a = dir == ScaleDirection::forward ? 1.0 / s.a : s.a;
    for (auto& v : out.values) v *= A;
    for (auto& y : out.mesh.nodes) y *= a;
    return out;
}

}  // namespace blowup
