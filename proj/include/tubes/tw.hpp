#pragma once

// Traveling-wave systems. With xi = y - v t and
//   a = c1 - c2, b = c1 + c2, r = a', s = b',
// the TFE profile equations are 4D (a, b, r, s) and the IPM ones 6D
// (a, b, r, s, u1, q). The slow-fast form of the IPM system uses
//   r1 = r - sigma*w, s1 = s - w, q1 = q/l,  w = u1*a + a^2/2,
// where sigma = +1 on the q >= 0 branch and -1 on the q <= 0 branch.

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tubes/errors.hpp"
#include "tubes/model.hpp"

namespace tubes {

/// Sign branch of the non-smooth terms. For TFE it is the sign of r; for IPM
/// RNegative is the q >= 0, r1 <= 0 branch and RPositive its mirror.
enum class Branch { RNegative, RPositive };

std::string to_string(Branch branch);
Branch parse_branch(const std::string& text);
inline double branch_sign(Branch b) { return b == Branch::RNegative ? 1.0 : -1.0; }
inline Branch other(Branch b) { return b == Branch::RNegative ? Branch::RPositive : Branch::RNegative; }

/// Which far-field state a single wave touches: (-1,-1) on its left or (1,1) on its right.
enum class Side { FromLower, ToUpper };
std::string to_string(Side side);

using TWVector4 = std::array<double, 4>;  ///< (a, b, r, s)
using IPMRaw = std::array<double, 6>;     ///< (a, b, r, s, u1, q)
using TWVector6 = std::array<double, 6>;  ///< (a, b, r1, s1, u1, q1)

struct ConcentrationPair {
  double c1 = 0.0;
  double c2 = 0.0;
  bool operator==(const ConcentrationPair&) const = default;
};

inline ConcentrationPair from_ab(double a, double b) { return {0.5 * (a + b), 0.5 * (b - a)}; }
inline double a_of(ConcentrationPair c) { return c.c1 - c.c2; }
inline double b_of(ConcentrationPair c) { return c.c1 + c.c2; }

struct WaveEndpoints {
  ConcentrationPair left;
  ConcentrationPair right;
  double v = 0.0;
  Branch branch = Branch::RNegative;
};

// ---- right-hand sides ----------------------------------------------------

/// (r, s, -v r - s a/2 + a|r|/2, -v s - r a)
TWVector4 tfe_tw_rhs(double v, const TWVector4& x);
/// Smooth branch version: |r| replaced by -sigma r.
TWVector4 tfe_tw_rhs_branch(double v, Branch branch, const TWVector4& x);
Eigen::Matrix4d tfe_jacobian(double v, Branch branch, const TWVector4& x);

/// (r, s, -v r + u1 s + a|q|/l^2, -v s + u1 r + a q/l^2, q/l^2, 2 u1 + a)
IPMRaw ipm_tw_rhs(double v, double l, const IPMRaw& x);

TWVector6 raw_to_rescaled(const IPMRaw& x, double l, Branch branch);
IPMRaw rescaled_to_raw(const TWVector6& x, double l, Branch branch);

/// Slow-fast system; the fast pair carries the 1/l factor.
TWVector6 ipm_tw_rhs_rescaled(double v, double l, const TWVector6& x, Branch branch = Branch::RNegative);
Eigen::Matrix<double, 6, 6> ipm_jacobian_rescaled(double v, double l, const TWVector6& x, Branch branch);

/// The b-free core (a, r1, s1, u1, q1) of the rescaled system; b' = s1 + w.
using CoreVector = Eigen::Matrix<double, 5, 1>;
using CoreMatrix = Eigen::Matrix<double, 5, 5>;
CoreVector ipm_core_rhs(double v, double l, double sigma, const CoreVector& x);
CoreMatrix ipm_core_jacobian(double v, double l, double sigma, const CoreVector& x);
double ipm_core_b_rate(const CoreVector& x);

/// Fixed point of the rescaled system with a = a0: (a0, b0, 0, 0, -a0/2, 0).
TWVector6 ipm_fixed_point(double a0, double b0);

// ---- fixed points --------------------------------------------------------

struct EigenPair {
  std::complex<double> value;
  std::vector<std::complex<double>> vector;
};

struct EigenSystem {
  Model model = Model::TFE;
  std::vector<double> point;
  std::vector<EigenPair> pairs;  ///< sorted by real part, then imaginary part
  int n_stable = 0;
  int n_unstable = 0;
  int n_center = 0;
  /// max_k |J v_k - lambda_k v_k|
  double residual = 0.0;
};

/// Spectrum of the branch Jacobian at a fixed point: 4D (a,b,r,s) for TFE,
/// 6D rescaled (a,b,r1,s1,u1,q1) for IPM. Eigenvectors have unit length with
/// the first nonzero component real positive. Throws ConfigError when the
/// point is not a fixed point.
EigenSystem fixed_point_eigensystem(Model model, double v, double l, const std::vector<double>& point,
                                    Branch branch = Branch::RNegative);

// ---- TFE closed form -----------------------------------------------------

/// Heteroclinic of the TFE system for speed v != 0 on the given sign branch:
///   a = (a0/2) (1 - tanh(v xi/2)), a0 = 4v (r < 0) or -4v (r > 0),
///   b = b_far + kappa a,  kappa = -2 (r < 0) or 2 (r > 0),  b_far = 2 sign(v),
///   r = a', s = kappa r.
/// Phase: a(0) is the midpoint of its limits. Throws SolverError for v == 0.
TWVector4 tfe_explicit_profile(double v, Branch branch, double xi);
WaveEndpoints tfe_endpoints(double v, Branch branch);

enum class Manifold { I1, I2, I3, I4, V0 };
std::string to_string(Manifold m);

/// I1: r + (v + a/2)^2 (s = 2r, r >= 0)   I2: r - (a - v)^2/2 (s = -r, r >= 0)
/// I3: r + (a + v)^2/2 (s = r, r <= 0)    I4: r - (a/2 - v)^2 (s = -2r, r <= 0)
/// V0: s + a^2/2 (v = 0 only).
/// Throws ConfigError when the point is off the manifold beyond tol.
double conserved_quantity(Manifold m, double v, double a, double r, double s, double tol = 1e-6);

/// v = (g(R) - g(L)) / (b(R) - b(L)) with g = -(c1 - c2)^2/2; nullopt when the
/// states have the same total concentration.
std::optional<double> rankine_hugoniot_speed(ConcentrationPair left, ConcentrationPair right);

}  // namespace tubes
