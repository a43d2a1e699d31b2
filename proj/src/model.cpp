#include "blowup/model.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <utility>

#include "blowup/errors.hpp"

namespace blowup {

std::string to_string(Regime r) {
    switch (r) {
        case Regime::linear: return "linear";
        case Regime::regional: return "regional";
        case Regime::single_point: return "single-point";
        case Regime::global: return "global";
    }
    return "unknown";
}

void ProblemParams::validate() const {
    require(std::isfinite(n) && n >= 0.0, "n must be finite and >= 0");
    require(std::isfinite(p) && p >= 1.0, "p must be finite and >= 1");
    require(std::isfinite(eps) && eps >= 0.0, "eps must be finite and >= 0");
}

Regime ProblemParams::regime() const {
    if (p == 1.0) return n == 0.0 ? Regime::linear : Regime::global;
    const double d = p - (n + 1.0);
    if (d == 0.0) return Regime::regional;
    return d > 0.0 ? Regime::single_point : Regime::global;
}

DerivedParams derive_params(const ProblemParams& params, double C0) {
    params.validate();
    const double n = params.n, p = params.p;
    DerivedParams d;
    if (p == 1.0) {
        require(n == 0.0, "p = 1 requires n = 0 (f_star undefined)");
        d.beta = 0.25;
        d.beta_tilde = 0.0;
        return d;
    }
    d.beta = (p - (n + 1.0)) / (2.0 * (n + 2.0) * (p - 1.0));
    d.beta_tilde = (p - (n + 1.0)) / (2.0 * (n + 2.0));
    d.f_star = std::pow(p - 1.0, -1.0 / (p - 1.0));
    if (n > 0.0) {
        d.mu_tw = (2.0 * n + 3.0) / n;
        d.mu_reg = 2.0 * (n + 2.0) / n;
    }
    if (p > n + 1.0 && C0 != 0.0) {
        auto t = tail_exponents(params, C0);
        d.gamma = t.gamma;
        d.nu = t.nu;
        d.b0 = t.b0;
    }
    return d;
}

TailExponents tail_exponents(const ProblemParams& params, double C0) {
    params.validate();
    const double n = params.n, p = params.p;
    require(p > n + 1.0, "tail exponents need p > n+1");
    require(C0 != 0.0 && std::isfinite(C0), "C0 must be nonzero");
    TailExponents t{};
    t.gamma = -2.0 * (n + 2.0) / (p - (n + 1.0));
    t.nu = 2.0 * (n + 2.0) * (p - 1.0) / (3.0 * (p - (n + 1.0)));
    const double beta = (p - (n + 1.0)) / (2.0 * (n + 2.0) * (p - 1.0));
    // The equation is odd in f, so the rate depends on |C0| only.
    const double bracket = beta * std::pow(std::abs(C0), -n) /
                           ((n + 1.0) * std::pow(t.gamma * (t.gamma - 1.0), n));
    if (!(bracket > 0.0)) throw DomainError("sign obstruction: b0 bracket is not positive");
    t.b0 = std::cbrt(bracket) / t.nu;
    return t;
}

std::vector<double> pk_coefficients(int k, double mu) {
    require(k >= 0 && k <= 16, "P_k order out of range");
    static std::mutex mtx;
    static std::map<std::pair<int, double>, std::vector<double>> cache;
    {
        std::lock_guard<std::mutex> lock(mtx);
        auto it = cache.find({k, mu});
        if (it != cache.end()) return it->second;
    }
    std::vector<double> c{1.0};
    for (int m = 0; m < k; ++m) {
        // P_{m+1} = P_m' + (mu - m) P_m; shifting by one derivative order.
        std::vector<double> next(c.size() + 1, 0.0);
        for (std::size_t j = 0; j < next.size(); ++j) {
            if (j < c.size()) next[j] += c[j];
            if (j >= 1) next[j] += (mu - m) * c[j - 1];
        }
        c = std::move(next);
    }
    std::lock_guard<std::mutex> lock(mtx);
    if (cache.size() > 256) cache.clear();
    cache.emplace(std::make_pair(k, mu), c);
    return c;
}

double pk_apply(int k, const PkJet& jet) {
    require(k >= 0, "negative P_k order");
    if (jet.values.size() < static_cast<std::size_t>(k) + 1)
        throw DomainError("jet too short for P_" + std::to_string(k));
    const auto c = pk_coefficients(k, jet.mu);
    double s = 0.0;
    for (int j = 0; j <= k; ++j) s += c[j] * jet.values[k - j];
    return s;
}

double osc_equilibrium(double n, double mu) {
    require(n > 0.0, "equilibria need n > 0");
    require(mu > 2.0, "equilibria need mu > 2");
    return std::pow((n + 1.0) * (mu - 2.0), -1.0 / n) *
           std::pow(mu * (mu - 1.0), -(n + 1.0) / n);
}

double final_time_profile(double C0, const ProblemParams& params, double x) {
    params.validate();
    require(params.p > params.n + 1.0, "final-time profile needs p > n+1");
    if (x == 0.0) throw DomainError("final-time profile diverges at x = 0");
    return C0 * std::pow(std::abs(x), -2.0 * (params.n + 2.0) / (params.p - (params.n + 1.0)));
}

Scaling scaling_factors(const ProblemParams& params, ScaleTarget target) {
    params.validate();
    require(params.p > 1.0, "scaling needs p > 1");
    if (target == ScaleTarget::regional) {
        require(params.regime() == Regime::regional, "regional scaling needs p = n+1");
        require(params.n > 0.0, "regional scaling needs n > 0");
        return {std::pow(1.0 / params.n, 1.0 / params.n), 1.0};
    }
    const auto d = derive_params(params);
    return {*d.f_star, std::pow(params.p - 1.0, d.beta)};
}

}  // namespace blowup
