#include "tubes/tridiagonal.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace tubes {

TridiagonalFactorization::TridiagonalFactorization(std::span<const double> sub, std::span<const double> diag,
                                                   std::span<const double> sup) {
  factor(sub, diag, sup);
}

TridiagonalFactorization::TridiagonalFactorization(std::size_t n, double sub, double diag, double sup) {
  std::vector<double> a(n, sub), b(n, diag), c(n, sup);
  factor(a, b, c);
}

void TridiagonalFactorization::factor(std::span<const double> sub, std::span<const double> diag,
                                      std::span<const double> sup) {
  const std::size_t n = diag.size();
  if (sub.size() != n || sup.size() != n) throw std::invalid_argument("tridiagonal: band sizes differ");
  for (std::size_t i = 0; i < n; ++i) {
    const double off = (i > 0 ? std::abs(sub[i]) : 0.0) + (i + 1 < n ? std::abs(sup[i]) : 0.0);
    assert(std::abs(diag[i]) > off && "tridiagonal operator must be strictly diagonally dominant");
    (void)off;
  }
  sub_.assign(sub.begin(), sub.end());
  upper_.assign(n, 0.0);
  pivot_inv_.assign(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double pivot = diag[i] - (i > 0 ? sub[i] * upper_[i - 1] : 0.0);
    pivot_inv_[i] = 1.0 / pivot;
    upper_[i] = i + 1 < n ? sup[i] * pivot_inv_[i] : 0.0;
  }
}

void TridiagonalFactorization::solve(std::span<const double> rhs, std::span<double> x) const {
  const std::size_t n = size();
  if (rhs.size() != n || x.size() != n) throw std::invalid_argument("tridiagonal: size mismatch");
  if (n == 0) return;
  x[0] = rhs[0] * pivot_inv_[0];
  for (std::size_t i = 1; i < n; ++i) x[i] = (rhs[i] - sub_[i] * x[i - 1]) * pivot_inv_[i];
  for (std::size_t i = n - 1; i-- > 0;) x[i] -= upper_[i] * x[i + 1];
}

std::vector<double> TridiagonalFactorization::solve(std::span<const double> rhs) const {
  std::vector<double> x(rhs.size());
  solve(rhs, x);
  return x;
}

}  // namespace tubes
