#pragma once

#include <vector>

namespace blowup {

/// Square band matrix with kl sub- and ku super-diagonals, stored in the
/// LAPACK general-band layout with room for the LU fill-in.
class BandMatrix {
public:
    BandMatrix(int n, int kl, int ku);

    int size() const { return n_; }
    int kl() const { return kl_; }
    int ku() const { return ku_; }

    double& operator()(int i, int j);
    double operator()(int i, int j) const;
    bool in_band(int i, int j) const { return j - i <= ku_ && i - j <= kl_; }

    void clear_row(int i);
    void zero();

    /// y = A x.
    std::vector<double> multiply(const std::vector<double>& x) const;

    /// Solves A x = b in place (b becomes x). Returns 0 on success or the
    /// 1-based index of the zero pivot. The matrix is consumed.
    int solve(std::vector<double>& b);

private:
    int n_, kl_, ku_, ld_;
    std::vector<double> ab_;
};

}  // namespace blowup
