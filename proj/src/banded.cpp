#include "blowup/banded.hpp"

#include <lapacke.h>

#include <algorithm>

#include "blowup/errors.hpp"

namespace blowup {

BandMatrix::BandMatrix(int n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), ld_(2 * kl + ku + 1), ab_(static_cast<std::size_t>(ld_) * n, 0.0) {
    require(n > 0 && kl >= 0 && ku >= 0, "bad band matrix shape");
}

// Column-major band storage: A(i,j) lives at row kl+ku+i-j of column j.
double& BandMatrix::operator()(int i, int j) {
    if (!in_band(i, j) || i < 0 || j < 0 || i >= n_ || j >= n_)
        throw DomainError("band matrix index out of band");
    return ab_[static_cast<std::size_t>(j) * ld_ + (kl_ + ku_ + i - j)];
}

double BandMatrix::operator()(int i, int j) const {
    if (!in_band(i, j) || i < 0 || j < 0 || i >= n_ || j >= n_) return 0.0;
    return ab_[static_cast<std::size_t>(j) * ld_ + (kl_ + ku_ + i - j)];
}

void BandMatrix::clear_row(int i) {
    for (int j = std::max(0, i - kl_); j <= std::min(n_ - 1, i + ku_); ++j) (*this)(i, j) = 0.0;
}

void BandMatrix::zero() { std::fill(ab_.begin(), ab_.end(), 0.0); }

std::vector<double> BandMatrix::multiply(const std::vector<double>& x) const {
    std::vector<double> y(n_, 0.0);
    for (int i = 0; i < n_; ++i)
        for (int j = std::max(0, i - kl_); j <= std::min(n_ - 1, i + ku_); ++j)
            y[i] += (*this)(i, j) * x[j];
    return y;
}

int BandMatrix::solve(std::vector<double>& b) {
    require(static_cast<int>(b.size()) == n_, "right-hand side size mismatch");
    std::vector<lapack_int> ipiv(n_);
    const lapack_int info =
        LAPACKE_dgbsv(LAPACK_COL_MAJOR, n_, kl_, ku_, 1, ab_.data(), ld_, ipiv.data(), b.data(), n_);
    if (info < 0) throw ComputeError("dgbsv: illegal argument");
    return static_cast<int>(info);
}

}  // namespace blowup
