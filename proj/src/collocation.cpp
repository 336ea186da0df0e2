#include "collocation.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <fmt/format.h>

#include "tubes/errors.hpp"

namespace tubes::detail {

namespace {

constexpr int kDim = 5;

// Newton iteration for the matrix sign function with determinant scaling.
Eigen::MatrixXd matrix_sign(Eigen::MatrixXd X) {
  const auto n = static_cast<double>(X.rows());
  for (int it = 0; it < 100; ++it) {
    Eigen::FullPivLU<Eigen::MatrixXd> lu(X);
    if (!lu.isInvertible()) throw SolverError("matrix sign iteration hit a singular matrix");
    const double c = std::pow(std::abs(lu.determinant()), -1.0 / n);
    Eigen::MatrixXd next = 0.5 * (c * X + lu.inverse() / c);
    const double change = (next - X).norm();
    X = std::move(next);
    if (change <= 1e-14 * X.norm()) return X;
  }
  throw SolverError("matrix sign iteration did not converge");
}

struct BoundaryBlock {
  Eigen::MatrixXd Qt;  // rows x 5
  CoreVector point;
  bool free = false;   // fixed point moves with a0
};

}  // namespace

std::vector<double> uniform_mesh(double half_length, std::size_t intervals) {
  std::vector<double> xi(intervals + 1);
  for (std::size_t i = 0; i <= intervals; ++i)
    xi[i] = -half_length + 2.0 * half_length * static_cast<double>(i) / static_cast<double>(intervals);
  xi[intervals / 2] = 0.0;
  return xi;
}

Eigen::MatrixXd invariant_subspace(const CoreMatrix& J, bool unstable, double shift) {
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(kDim, kDim);
  const Eigen::MatrixXd M = (unstable ? Eigen::MatrixXd(J) : Eigen::MatrixXd(-J)) - shift * I;
  const Eigen::MatrixXd P = 0.5 * (I + matrix_sign(M));
  const auto k = static_cast<int>(std::lround(P.trace()));
  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(P);
  const Eigen::MatrixXd Q = qr.householderQ();
  return Q.leftCols(k);
}

Eigen::MatrixXd orthogonal_complement(const Eigen::MatrixXd& B) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(B);
  const Eigen::MatrixXd Q = qr.householderQ();
  return Q.rightCols(B.rows() - B.cols());
}

CoreVector core_fixed_point(double a0) {
  CoreVector p;
  p << a0, 0.0, 0.0, -a0 / 2.0, 0.0;
  return p;
}

ConnectionResult solve_connection(const ConnectionProblem& pb, const ConnectionGuess& guess, double tol,
                                  int max_iterations) {
  const std::size_t N = pb.intervals;
  if (N < 4 || N % 2 != 0) throw ConfigError("collocation needs an even number of intervals >= 4");
  if (guess.x.size() != N + 1) throw ConfigError("collocation guess has the wrong number of nodes");
  const std::vector<double> xi = uniform_mesh(pb.half_length, N);
  const double h = 2.0 * pb.half_length / static_cast<double>(N);
  const double shift = std::abs(pb.v) / 4.0;
  const bool left_free = pb.side == Side::ToUpper;

  auto boundary = [&](double a0, bool left) {
    BoundaryBlock blk;
    blk.free = (left == left_free);
    blk.point = core_fixed_point(blk.free ? a0 : 0.0);
    const CoreMatrix J = ipm_core_jacobian(pb.v, pb.l, pb.sigma, blk.point);
    const Eigen::MatrixXd basis = invariant_subspace(J, left, shift);
    blk.Qt = orthogonal_complement(basis).transpose();
    const long expected = blk.free ? 3 : 2;
    if (blk.Qt.rows() != expected)
      throw SolverError(fmt::format("unexpected {} dimension {} at the {} fixed point (v={}, l={})",
                                    left ? "unstable" : "stable", basis.cols(), left ? "left" : "right", pb.v, pb.l));
    return blk;
  };

  const Eigen::Index n_unknowns = static_cast<Eigen::Index>(kDim * (N + 1) + 1);
  const Eigen::Index ia0 = n_unknowns - 1;
  auto node = [](std::size_t i) { return static_cast<Eigen::Index>(kDim * i); };

  Eigen::VectorXd z(n_unknowns);
  for (std::size_t i = 0; i <= N; ++i) z.segment<kDim>(node(i)) = guess.x[i];
  z(ia0) = guess.a0;

  auto get = [&](const Eigen::VectorXd& zz, std::size_t i) -> CoreVector { return zz.segment<kDim>(node(i)); };

  // Residual, optionally with the Jacobian.
  auto evaluate = [&](const Eigen::VectorXd& zz, Eigen::SparseMatrix<double>* jac) {
    const double a0 = zz(ia0);
    const BoundaryBlock L = boundary(a0, true);
    const BoundaryBlock R = boundary(a0, false);
    const Eigen::Index mL = L.Qt.rows();
    Eigen::VectorXd F(n_unknowns);
    std::vector<Eigen::Triplet<double>> trips;
    if (jac) trips.reserve(static_cast<std::size_t>(2 * kDim * kDim) * N + 64);

    const CoreVector dp_da0 = core_fixed_point(1.0);
    auto add_boundary = [&](const BoundaryBlock& blk, Eigen::Index row0, std::size_t i) {
      F.segment(row0, blk.Qt.rows()) = blk.Qt * (get(zz, i) - blk.point);
      if (!jac) return;
      for (Eigen::Index r = 0; r < blk.Qt.rows(); ++r) {
        for (int c = 0; c < kDim; ++c) trips.emplace_back(row0 + r, node(i) + c, blk.Qt(r, c));
        // Q depends on a0 too, but that term multiplies x - point, which vanishes at the solution.
        if (blk.free) trips.emplace_back(row0 + r, ia0, -(blk.Qt.row(r) * dp_da0)(0));
      }
    };
    add_boundary(L, 0, 0);

    CoreVector f_prev = ipm_core_rhs(pb.v, pb.l, pb.sigma, get(zz, 0));
    CoreMatrix J_prev;
    if (jac) J_prev = ipm_core_jacobian(pb.v, pb.l, pb.sigma, get(zz, 0));
    for (std::size_t i = 0; i < N; ++i) {
      const CoreVector x1 = get(zz, i + 1);
      const CoreVector f1 = ipm_core_rhs(pb.v, pb.l, pb.sigma, x1);
      const Eigen::Index row0 = mL + static_cast<Eigen::Index>(kDim * i);
      F.segment<kDim>(row0) = x1 - get(zz, i) - 0.5 * h * (f_prev + f1);
      if (jac) {
        const CoreMatrix J1 = ipm_core_jacobian(pb.v, pb.l, pb.sigma, x1);
        const CoreMatrix A = -CoreMatrix::Identity() - 0.5 * h * J_prev;
        const CoreMatrix B = CoreMatrix::Identity() - 0.5 * h * J1;
        for (int r = 0; r < kDim; ++r) {
          for (int c = 0; c < kDim; ++c) {
            if (A(r, c) != 0.0) trips.emplace_back(row0 + r, node(i) + c, A(r, c));
            if (B(r, c) != 0.0) trips.emplace_back(row0 + r, node(i + 1) + c, B(r, c));
          }
        }
        J_prev = J1;
      }
      f_prev = f1;
    }
    const Eigen::Index rowR = mL + static_cast<Eigen::Index>(kDim * N);
    add_boundary(R, rowR, N);

    const Eigen::Index row_phase = rowR + R.Qt.rows();
    if (row_phase != n_unknowns - 1) throw SolverError("boundary condition count does not close the system");
    F(row_phase) = zz(node(N / 2)) - 0.5 * a0;
    if (jac) {
      trips.emplace_back(row_phase, node(N / 2), 1.0);
      trips.emplace_back(row_phase, ia0, -0.5);
      jac->resize(n_unknowns, n_unknowns);
      jac->setFromTriplets(trips.begin(), trips.end());
    }
    return F;
  };

  Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
  bool analyzed = false;
  Eigen::SparseMatrix<double> jac;
  Eigen::VectorXd F = evaluate(z, &jac);
  double norm = F.lpNorm<Eigen::Infinity>();
  double best = norm;

  ConnectionResult out;
  for (int it = 0; it <= max_iterations; ++it) {
    out.iterations = it;
    if (!std::isfinite(norm)) break;
    if (norm <= tol) {
      out.xi = xi;
      out.x.resize(N + 1);
      for (std::size_t i = 0; i <= N; ++i) out.x[i] = get(z, i);
      out.a0 = z(ia0);
      out.residual = norm;
      return out;
    }
    if (it == max_iterations) break;
    if (!analyzed) {
      lu.analyzePattern(jac);
      analyzed = true;
    }
    lu.factorize(jac);
    if (lu.info() != Eigen::Success) break;
    const Eigen::VectorXd dz = lu.solve(-F);
    if (lu.info() != Eigen::Success || !dz.allFinite()) break;

    double step = 1.0;
    bool accepted = false;
    while (step >= 1.0 / 1024.0) {
      Eigen::VectorXd trial = z + step * dz;
      Eigen::VectorXd Ft;
      try {
        Ft = evaluate(trial, nullptr);
      } catch (const SolverError&) {
        step *= 0.5;
        continue;
      }
      const double nt = Ft.lpNorm<Eigen::Infinity>();
      if (std::isfinite(nt) && nt < (1.0 - 1e-4 * step) * norm) {
        z = std::move(trial);
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) {
      // Small residuals stagnate at round-off; accept a full step if it lands within 10x tol.
      Eigen::VectorXd trial = z + dz;
      const double nt = evaluate(trial, nullptr).lpNorm<Eigen::Infinity>();
      if (nt <= 10.0 * tol) {
        z = std::move(trial);
      } else {
        break;
      }
    }
    F = evaluate(z, &jac);
    norm = F.lpNorm<Eigen::Infinity>();
    best = std::min(best, norm);
  }
  if (norm <= 10.0 * tol && std::isfinite(norm)) {
    out.xi = xi;
    out.x.resize(N + 1);
    for (std::size_t i = 0; i <= N; ++i) out.x[i] = get(z, i);
    out.a0 = z(ia0);
    out.residual = norm;
    return out;
  }
  throw SolverError(fmt::format("collocation Newton did not converge (v={}, l={}, best residual {:.3g})", pb.v,
                                pb.l, best),
                    best);
}

}  // namespace tubes::detail
