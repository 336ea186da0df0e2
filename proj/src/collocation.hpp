#pragma once

// Trapezoidal collocation for connecting orbits of the IPM slow-fast core.

#include <vector>

#include <Eigen/Dense>

#include "tubes/tw.hpp"

namespace tubes::detail {

struct ConnectionProblem {
  double v = 0.0;
  double l = 0.0;
  double sigma = 1.0;
  Side side = Side::FromLower;
  double half_length = 100.0;
  std::size_t intervals = 2000;  ///< even
};

struct ConnectionGuess {
  std::vector<CoreVector> x;  ///< one per mesh node
  double a0 = 0.0;
};

struct ConnectionResult {
  std::vector<double> xi;
  std::vector<CoreVector> x;
  double a0 = 0.0;
  double residual = 0.0;
  int iterations = 0;
};

std::vector<double> uniform_mesh(double half_length, std::size_t intervals);

/// Orthonormal basis of the invariant subspace of J for eigenvalues with real
/// part > shift (unstable = true) or < -shift (unstable = false).
Eigen::MatrixXd invariant_subspace(const CoreMatrix& J, bool unstable, double shift);

/// Orthonormal basis of the orthogonal complement of span(B).
Eigen::MatrixXd orthogonal_complement(const Eigen::MatrixXd& B);

/// Core fixed point with a = a0.
CoreVector core_fixed_point(double a0);

/// Damped Newton on the collocation system. Throws SolverError with the best
/// residual on failure.
ConnectionResult solve_connection(const ConnectionProblem& problem, const ConnectionGuess& guess, double tol,
                                  int max_iterations);

}  // namespace tubes::detail
