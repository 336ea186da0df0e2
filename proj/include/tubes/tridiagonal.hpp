#pragma once

#include <span>
#include <vector>

namespace tubes {

/// LU factorization of a tridiagonal matrix (Thomas algorithm, no pivoting).
/// Requires strict diagonal dominance, which holds for every operator this
/// library builds; construction asserts it.
class TridiagonalFactorization {
 public:
  /// sub[0] and sup[n-1] are ignored.
  TridiagonalFactorization(std::span<const double> sub, std::span<const double> diag, std::span<const double> sup);

  /// Constant-coefficient operator of size n.
  TridiagonalFactorization(std::size_t n, double sub, double diag, double sup);

  std::size_t size() const { return pivot_inv_.size(); }

  /// Solves A x = rhs; x and rhs may alias.
  void solve(std::span<const double> rhs, std::span<double> x) const;
  std::vector<double> solve(std::span<const double> rhs) const;

 private:
  void factor(std::span<const double> sub, std::span<const double> diag, std::span<const double> sup);

  std::vector<double> sub_;
  std::vector<double> upper_;      // sup[i] / pivot[i]
  std::vector<double> pivot_inv_;  // 1 / pivot[i]
};

}  // namespace tubes
