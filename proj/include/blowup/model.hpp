#pragma once

#include <optional>
#include <string>
#include <vector>

namespace blowup {

enum class Regime { linear, regional, single_point, global };

std::string to_string(Regime r);

/// Exponents of u_t = -(|u_xx|^n u_xx)_xx + |u|^{p-1}u plus the
/// regularization magnitude eps used in place of |F''|^n.
struct ProblemParams {
    double n = 0.0;
    double p = 1.0;
    double eps = 0.0;

    void validate() const;
    Regime regime() const;
};

struct DerivedParams {
    double beta = 0.0;
    double beta_tilde = 0.0;
    std::optional<double> f_star;
    std::optional<double> gamma;
    std::optional<double> nu;
    std::optional<double> b0;
    std::optional<double> mu_tw;
    std::optional<double> mu_reg;
};

/// Closed-form exponents. Tail fields are filled only for p > n+1 and use
/// the supplied C0; interface exponents only for n > 0.
DerivedParams derive_params(const ProblemParams& params, double C0 = 1.0);

struct TailExponents {
    double gamma;
    double nu;
    double b0;
};

TailExponents tail_exponents(const ProblemParams& params, double C0);

/// Coefficients of P_k, highest derivative first: P_k = sum c[j] phi^{(k-j)}.
std::vector<double> pk_coefficients(int k, double mu);

struct PkJet {
    std::vector<double> values;  // phi, phi', phi'', ...
    double mu = 0.0;
};

double pk_apply(int k, const PkJet& jet);

/// Constant equilibria +-phi of (n+1)|P_2|^n P_3 = phi.
double osc_equilibrium(double n, double mu);

double final_time_profile(double C0, const ProblemParams& params, double x);

/// Amplitude and length factors of the map f(y) = A F(y/a).
struct Scaling {
    double A;
    double a;
};

enum class ScaleTarget { regional, generic };
Scaling scaling_factors(const ProblemParams& params, ScaleTarget target);

}  // namespace blowup
