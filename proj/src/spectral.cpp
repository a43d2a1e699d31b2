#include "blowup/spectral.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "blowup/banded.hpp"
#include "blowup/errors.hpp"

namespace blowup {

namespace {

using Mat3 = std::array<std::array<double, 3>, 3>;

Mat3 system_matrix(double y) { return {{{0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}, {0.25 * y, 0.0, 0.0}}}; }

Mat3 mul(const Mat3& A, const Mat3& B) {
    Mat3 C{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
            for (int k = 0; k < 3; ++k) C[i][j] += A[i][k] * B[k][j];
    return C;
}

Mat3 lin(double a, const Mat3& A, double b, const Mat3& B) {
    Mat3 C{};
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) C[i][j] = a * A[i][j] + b * B[i][j];
    return C;
}

const Mat3 kId{{{1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}}};

// Derivatives F^{(0..k)} at y from the jet (F, F', F'').
std::vector<double> jet_derivatives(double y, double f0, double f1, double f2, int k) {
    std::vector<double> d(std::max(k + 1, 3));
    d[0] = f0;
    d[1] = f1;
    d[2] = f2;
    for (int m = 0; m + 3 <= k; ++m) d[m + 3] = 0.25 * (y * d[m] + (m > 0 ? m * d[m - 1] : 0.0));
    d.resize(k + 1);
    return d;
}

// Quintic Hermite interpolation from value, slope and curvature at both ends.
double hermite5(double t, double h, double v0, double d0, double c0, double v1, double d1, double c1) {
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
    const double H0 = 1.0 - 10.0 * t3 + 15.0 * t4 - 6.0 * t5;
    const double H1 = t - 6.0 * t3 + 8.0 * t4 - 3.0 * t5;
    const double H2 = 0.5 * (t2 - 3.0 * t3 + 3.0 * t4 - t5);
    const double K0 = 10.0 * t3 - 15.0 * t4 + 6.0 * t5;
    const double K1 = -4.0 * t3 + 7.0 * t4 - 3.0 * t5;
    const double K2 = 0.5 * (t3 - 2.0 * t4 + t5);
    return v0 * H0 + h * d0 * H1 + h * h * c0 * H2 + v1 * K0 + h * d1 * K1 + h * h * c1 * K2;
}

// Jet (F, F', F'') at 0 <= y <= L.
std::array<double, 3> jet_at(const KernelTable& T, double y) {
    const double h = T.h();
    std::size_t i = static_cast<std::size_t>(y / h);
    if (i >= T.y.size() - 1) i = T.y.size() - 2;
    if (y == T.y[i]) return {T.F[i], T.F1[i], T.F2[i]};
    if (y == T.y[i + 1]) return {T.F[i + 1], T.F1[i + 1], T.F2[i + 1]};
    const double t = (y - T.y[i]) / h;
    const auto a = jet_derivatives(T.y[i], T.F[i], T.F1[i], T.F2[i], 4);
    const auto b = jet_derivatives(T.y[i + 1], T.F[i + 1], T.F1[i + 1], T.F2[i + 1], 4);
    std::array<double, 3> out{};
    for (int j = 0; j < 3; ++j) out[j] = hermite5(t, h, a[j], a[j + 1], a[j + 2], b[j], b[j + 1], b[j + 2]);
    return out;
}

double factorial(int l) {
    double f = 1.0;
    for (int k = 2; k <= l; ++k) f *= k;
    return f;
}

}  // namespace

KernelTable compute_kernel(double L, int N) {
    require(L >= 15.0, "kernel length L must be >= 15");
    require(N >= 2000, "kernel needs N >= 2000 intervals");
    if (N % 2) ++N;  // Simpson pairs
    const double h = L / N;
    const int M = 3 * (N + 1);
    BandMatrix A(M, 4, 3);
    std::vector<double> rhs(M, 0.0);
    // Row 0: F'(0) = 0; row 1: gauge F(0) = 1.
    A(0, 1) = 1.0;
    A(1, 0) = 1.0;
    rhs[1] = 1.0;
    for (int i = 0; i < N; ++i) {
        const double ya = i * h, yb = (i + 1) * h, ym = ya + 0.5 * h;
        const Mat3 Aa = system_matrix(ya), Ab = system_matrix(yb), Am = system_matrix(ym);
        const Mat3 Ma = lin(0.5, kId, h / 8.0, Aa);
        const Mat3 Mb = lin(0.5, kId, -h / 8.0, Ab);
        const Mat3 Ca = lin(-1.0, lin(1.0, kId, h / 6.0, Aa), -4.0 * h / 6.0, mul(Am, Ma));
        const Mat3 Cb = lin(1.0, lin(1.0, kId, -h / 6.0, Ab), -4.0 * h / 6.0, mul(Am, Mb));
        for (int r = 0; r < 3; ++r) {
            const int row = 2 + 3 * i + r;
            for (int c = 0; c < 3; ++c) {
                A(row, 3 * i + c) = Ca[r][c];
                A(row, 3 * (i + 1) + c) = Cb[r][c];
            }
        }
    }
    // Radiation condition at L: keep only the two decaying WKB modes,
    // F'' + kappa F' + kappa^2 F = 0 with kappa = (L/4)^{1/3}.
    const double kappa = std::cbrt(L / 4.0);
    const int last = M - 1;
    A(last, 3 * N) = kappa * kappa;
    A(last, 3 * N + 1) = kappa;
    A(last, 3 * N + 2) = 1.0;
    if (A.solve(rhs) != 0) throw ComputeError("kernel collocation system is singular");

    KernelTable T;
    T.L = L;
    T.y.resize(N + 1);
    T.F.resize(N + 1);
    T.F1.resize(N + 1);
    T.F2.resize(N + 1);
    for (int i = 0; i <= N; ++i) {
        T.y[i] = i * h;
        T.F[i] = rhs[3 * i];
        T.F1[i] = rhs[3 * i + 1];
        T.F2[i] = rhs[3 * i + 2];
    }
    T.y[N] = L;
    // Simpson over each interval with the collocation midpoint value.
    double integral = 0.0;
    for (int i = 0; i < N; ++i) {
        const double fm = 0.5 * (T.F[i] + T.F[i + 1]) + h / 8.0 * (T.F1[i] - T.F1[i + 1]);
        integral += h / 6.0 * (T.F[i] + 4.0 * fm + T.F[i + 1]);
    }
    integral *= 2.0;
    if (!(std::abs(integral) > 1e-12)) throw ComputeError("kernel normalization vanishes");
    for (int i = 0; i <= N; ++i) {
        T.F[i] /= integral;
        T.F1[i] /= integral;
        T.F2[i] /= integral;
    }
    double check = 0.0;
    for (int i = 0; i < N; ++i) {
        const double fm = 0.5 * (T.F[i] + T.F[i + 1]) + h / 8.0 * (T.F1[i] - T.F1[i + 1]);
        check += h / 6.0 * (T.F[i] + 4.0 * fm + T.F[i + 1]);
    }
    T.normalization = 2.0 * check;

    // Envelope fit through the local extrema of |F| where F is well resolved.
    std::vector<double> xs, ls;
    const double floor = 1e-11 * std::abs(T.F[0]);
    for (int i = 1; i < N; ++i) {
        const double a = std::abs(T.F[i - 1]), b = std::abs(T.F[i]), c = std::abs(T.F[i + 1]);
        if (T.y[i] >= 4.0 && b >= a && b > c && b > floor) {
            xs.push_back(std::pow(T.y[i], 4.0 / 3.0));
            ls.push_back(std::log(b));
        }
    }
    if (xs.size() >= 3) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        const double m = static_cast<double>(xs.size());
        for (std::size_t k = 0; k < xs.size(); ++k) {
            sx += xs[k];
            sy += ls[k];
            sxx += xs[k] * xs[k];
            sxy += xs[k] * ls[k];
        }
        const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
        T.decay_d = -slope;
        T.decay_D = std::exp((sy - slope * sx) / m);
    }
    return T;
}

double kernel_derivative(const KernelTable& table, int k, double y) {
    require(k >= 0, "derivative order must be >= 0");
    if (k > 40) throw DomainError("recursion depth beyond 40 loses accuracy");
    const double ay = std::abs(y);
    if (ay > table.L) return 0.0;
    const auto j = jet_at(table, ay);
    const auto d = jet_derivatives(ay, j[0], j[1], j[2], k);
    const double sign = (y < 0.0 && (k % 2 == 1)) ? -1.0 : 1.0;
    return sign * d[k];
}

double eigenfunction(const KernelTable& table, int l, double y) {
    require(l >= 0 && l <= 12, "eigenfunction index must lie in [0, 12]");
    const double s = (l % 2 ? -1.0 : 1.0) / std::sqrt(factorial(l));
    return s * kernel_derivative(table, l, y);
}

double eigen_residual(const KernelTable& table, int l, double y_max) {
    require(l >= 0 && l <= 12, "eigenfunction index must lie in [0, 12]");
    const double h = table.h();
    const double c = (l % 2 ? -1.0 : 1.0) / std::sqrt(factorial(l));
    const std::size_t N = table.y.size();
    std::vector<double> third(N), first(N), value(N);
    for (std::size_t i = 0; i < N; ++i) {
        const auto d = jet_derivatives(table.y[i], table.F[i], table.F1[i], table.F2[i], l + 3);
        third[i] = c * d[l + 3];
        first[i] = c * d[l + 1];
        value[i] = c * d[l];
    }
    double worst = 0.0;
    for (std::size_t i = 2; i + 2 < N && table.y[i] <= y_max; ++i) {
        const double d4 = (third[i - 2] - 8.0 * third[i - 1] + 8.0 * third[i + 1] - third[i + 2]) / (12.0 * h);
        const double B = -d4 + 0.25 * table.y[i] * first[i] + 0.25 * value[i];
        worst = std::max(worst, std::abs(B + 0.25 * l * value[i]));
    }
    return worst;
}

double AdjointPolynomial::operator()(double y) const {
    double s = 0.0;
    for (std::size_t k = q.size(); k-- > 0;) s = s * y + boost::rational_cast<double>(q[k]);
    return s / std::sqrt(static_cast<double>(norm_sq));
}

std::vector<double> AdjointPolynomial::coefficients() const {
    std::vector<double> c(q.size());
    const double s = 1.0 / std::sqrt(static_cast<double>(norm_sq));
    for (std::size_t k = 0; k < q.size(); ++k) c[k] = boost::rational_cast<double>(q[k]) * s;
    return c;
}

AdjointPolynomial adjoint_eigenfunction(int l) {
    require(l >= 0 && l <= 12, "adjoint index must lie in [0, 12]");
    AdjointPolynomial P;
    P.l = l;
    P.q.assign(l + 1, Rational(0));
    long long lf = 1;
    for (int k = 2; k <= l; ++k) lf *= k;
    P.norm_sq = lf;
    // (1/j!) D^{4j} y^l = (1/j!) l!/(l-4j)! y^{l-4j}.
    long long jf = 1;
    for (int j = 0; 4 * j <= l; ++j) {
        if (j > 0) jf *= j;
        long long falling = 1;
        for (int m = l; m > l - 4 * j; --m) falling *= m;
        P.q[l - 4 * j] += Rational(falling, jf);
    }
    return P;
}

std::vector<Rational> apply_adjoint_operator(const std::vector<Rational>& q) {
    std::vector<Rational> out(q.size(), Rational(0));
    for (std::size_t k = 0; k < q.size(); ++k) {
        if (k >= 4) out[k - 4] -= q[k] * Rational(static_cast<long long>(k * (k - 1) * (k - 2) * (k - 3)));
        // -(1/4) y D y^k = -(k/4) y^k.
        out[k] -= q[k] * Rational(static_cast<long long>(k), 4);
    }
    return out;
}

double pairing(const KernelTable& table, int l, int k) {
    require(l >= 0 && l <= 8 && k >= 0 && k <= 8, "pairing indices must lie in [0, 8]");
    if ((l + k) % 2 == 1) return 0.0;
    const auto P = adjoint_eigenfunction(k);
    const double c = (l % 2 ? -1.0 : 1.0) / std::sqrt(factorial(l));
    const std::size_t N = table.y.size() - 1;  // even
    std::vector<double> g(N + 1);
    for (std::size_t i = 0; i <= N; ++i) {
        const auto d = jet_derivatives(table.y[i], table.F[i], table.F1[i], table.F2[i], l);
        g[i] = c * d[l] * P(table.y[i]);
    }
    auto simpson = [&](std::size_t stride) {
        const double h = table.h() * stride;
        double s = g[0] + g[N];
        for (std::size_t i = stride, m = 1; i < N; i += stride, ++m) s += (m % 2 ? 4.0 : 2.0) * g[i];
        return s * h / 3.0;
    };
    const double fine = simpson(1);
    if (N % 4 == 0) {
        const double coarse = simpson(2);
        if (std::abs(fine - coarse) > 1e-4 * std::max(1.0, std::abs(fine)))
            throw ComputeError("pairing quadrature did not converge under refinement");
    }
    return 2.0 * fine;
}

double linear_pattern(const KernelTable& table, int l, double x, double t, bool fundamental) {
    if (!(t > 0.0)) throw DomainError("linear pattern needs t > 0");
    const double y = x / std::pow(t, 0.25);
    const double v = std::pow(t, -(1.0 + l) / 4.0) * eigenfunction(table, l, y);
    return fundamental ? v : std::exp(-t) * v;
}

}  // namespace blowup
