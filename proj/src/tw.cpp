#include "tubes/tw.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <fmt/format.h>

namespace tubes {

std::string to_string(Branch branch) { return branch == Branch::RNegative ? "r<0" : "r>0"; }

Branch parse_branch(const std::string& text) {
  if (text == "r<0" || text == "rneg" || text == "negative" || text == "-") return Branch::RNegative;
  if (text == "r>0" || text == "rpos" || text == "positive" || text == "+") return Branch::RPositive;
  throw ConfigError(fmt::format("unknown branch '{}' (expected r<0 or r>0)", text));
}

std::string to_string(Side side) { return side == Side::FromLower ? "from_lower" : "to_upper"; }

std::string to_string(Manifold m) {
  switch (m) {
    case Manifold::I1: return "I1";
    case Manifold::I2: return "I2";
    case Manifold::I3: return "I3";
    case Manifold::I4: return "I4";
    case Manifold::V0: return "V0";
  }
  return "?";
}

TWVector4 tfe_tw_rhs(double v, const TWVector4& x) {
  const auto [a, b, r, s] = x;
  (void)b;
  return {r, s, -v * r - s * a / 2.0 + a * std::abs(r) / 2.0, -v * s - r * a};
}

TWVector4 tfe_tw_rhs_branch(double v, Branch branch, const TWVector4& x) {
  const double sg = branch_sign(branch);
  const auto [a, b, r, s] = x;
  (void)b;
  return {r, s, -v * r - s * a / 2.0 - sg * a * r / 2.0, -v * s - r * a};
}

Eigen::Matrix4d tfe_jacobian(double v, Branch branch, const TWVector4& x) {
  const double sg = branch_sign(branch);
  const auto [a, b, r, s] = x;
  (void)b;
  Eigen::Matrix4d J;
  J << 0, 0, 1, 0,
       0, 0, 0, 1,
       -s / 2.0 - sg * r / 2.0, 0, -v - sg * a / 2.0, -a / 2.0,
       -r, 0, -a, -v;
  return J;
}

IPMRaw ipm_tw_rhs(double v, double l, const IPMRaw& x) {
  const auto [a, b, r, s, u1, q] = x;
  (void)b;
  const double l2 = l * l;
  return {r, s, -v * r + u1 * s + a * std::abs(q) / l2, -v * s + u1 * r + a * q / l2, q / l2, 2.0 * u1 + a};
}

TWVector6 raw_to_rescaled(const IPMRaw& x, double l, Branch branch) {
  const double sg = branch_sign(branch);
  const auto [a, b, r, s, u1, q] = x;
  const double w = u1 * a + a * a / 2.0;
  return {a, b, r - sg * w, s - w, u1, q / l};
}

IPMRaw rescaled_to_raw(const TWVector6& x, double l, Branch branch) {
  const double sg = branch_sign(branch);
  const auto [a, b, r1, s1, u1, q1] = x;
  const double w = u1 * a + a * a / 2.0;
  return {a, b, r1 + sg * w, s1 + w, u1, q1 * l};
}

namespace {

CoreVector core_of(const TWVector6& x) {
  CoreVector c;
  c << x[0], x[2], x[3], x[4], x[5];
  return c;
}

}  // namespace

CoreVector ipm_core_rhs(double v, double l, double sg, const CoreVector& x) {
  const double a = x(0), r1 = x(1), s1 = x(2), u = x(3), q1 = x(4);
  const double w = u * a + a * a / 2.0;
  const double r = r1 + sg * w;
  const double s = s1 + w;
  CoreVector d;
  d << r, -v * r + u * (s1 - sg * r1) - sg * a * r, -v * s - a * r, q1 / l, (2.0 * u + a) / l;
  return d;
}

CoreMatrix ipm_core_jacobian(double v, double l, double sg, const CoreVector& x) {
  const double a = x(0), r1 = x(1), s1 = x(2), u = x(3);
  const double w = u * a + a * a / 2.0;
  const double r = r1 + sg * w;
  CoreMatrix J = CoreMatrix::Zero();
  J(0, 0) = sg * (u + a);
  J(0, 1) = 1.0;
  J(0, 3) = sg * a;

  J(1, 0) = -v * sg * (u + a) - sg * r - a * (u + a);
  J(1, 1) = -v - sg * u - sg * a;
  J(1, 2) = u;
  J(1, 3) = -v * sg * a + s1 - sg * r1 - a * a;

  J(2, 0) = -v * (u + a) - r - a * sg * (u + a);
  J(2, 1) = -a;
  J(2, 2) = -v;
  J(2, 3) = -v * a - sg * a * a;

  J(3, 4) = 1.0 / l;
  J(4, 0) = 1.0 / l;
  J(4, 3) = 2.0 / l;
  return J;
}

double ipm_core_b_rate(const CoreVector& x) {
  const double a = x(0), s1 = x(2), u = x(3);
  return s1 + u * a + a * a / 2.0;
}

TWVector6 ipm_tw_rhs_rescaled(double v, double l, const TWVector6& x, Branch branch) {
  const CoreVector c = core_of(x);
  const CoreVector d = ipm_core_rhs(v, l, branch_sign(branch), c);
  return {d(0), ipm_core_b_rate(c), d(1), d(2), d(3), d(4)};
}

Eigen::Matrix<double, 6, 6> ipm_jacobian_rescaled(double v, double l, const TWVector6& x, Branch branch) {
  const CoreMatrix Jc = ipm_core_jacobian(v, l, branch_sign(branch), core_of(x));
  // Core index k maps to full index map[k]; b (full index 1) never feeds back.
  constexpr std::array<int, 5> map{0, 2, 3, 4, 5};
  Eigen::Matrix<double, 6, 6> J = Eigen::Matrix<double, 6, 6>::Zero();
  for (int i = 0; i < 5; ++i)
    for (int k = 0; k < 5; ++k) J(map[i], map[k]) = Jc(i, k);
  const double a = x[0], u = x[4];
  J(1, 0) = u + a;
  J(1, 3) = 1.0;
  J(1, 4) = a;
  return J;
}

TWVector6 ipm_fixed_point(double a0, double b0) { return {a0, b0, 0.0, 0.0, -a0 / 2.0, 0.0}; }

namespace {

template <int N>
EigenSystem eigensystem_of(const Eigen::Matrix<double, N, N>& J) {
  Eigen::EigenSolver<Eigen::Matrix<double, N, N>> es(J);
  if (es.info() != Eigen::Success) throw SolverError("eigenvalue iteration did not converge");
  EigenSystem sys;
  const double scale = std::max(1.0, J.cwiseAbs().maxCoeff());
  const double center_tol = 1e-9 * scale;
  for (int k = 0; k < N; ++k) {
    Eigen::Matrix<std::complex<double>, N, 1> vec = es.eigenvectors().col(k);
    vec.normalize();
    for (int i = 0; i < N; ++i) {
      if (std::abs(vec(i)) > 1e-10) {
        vec *= std::conj(vec(i)) / std::abs(vec(i));
        break;
      }
    }
    const std::complex<double> lambda = es.eigenvalues()(k);
    sys.residual = std::max(sys.residual, (J.template cast<std::complex<double>>() * vec - lambda * vec).norm());
    EigenPair p;
    p.value = lambda;
    p.vector.assign(vec.data(), vec.data() + N);
    sys.pairs.push_back(std::move(p));
    if (lambda.real() < -center_tol) {
      ++sys.n_stable;
    } else if (lambda.real() > center_tol) {
      ++sys.n_unstable;
    } else {
      ++sys.n_center;
    }
  }
  std::sort(sys.pairs.begin(), sys.pairs.end(), [](const EigenPair& x, const EigenPair& y) {
    if (x.value.real() != y.value.real()) return x.value.real() < y.value.real();
    return x.value.imag() < y.value.imag();
  });
  return sys;
}

}  // namespace

EigenSystem fixed_point_eigensystem(Model model, double v, double l, const std::vector<double>& point,
                                    Branch branch) {
  EigenSystem sys;
  if (model == Model::TFE) {
    if (point.size() != 4) throw ConfigError("TFE fixed point must have 4 components (a,b,r,s)");
    TWVector4 x{point[0], point[1], point[2], point[3]};
    const auto f = tfe_tw_rhs_branch(v, branch, x);
    const double res = std::max({std::abs(f[0]), std::abs(f[1]), std::abs(f[2]), std::abs(f[3])});
    if (res > 1e-10) throw ConfigError(fmt::format("point is not a fixed point (rhs residual {:.3g})", res));
    sys = eigensystem_of<4>(tfe_jacobian(v, branch, x));
  } else {
    if (!(l > 0.0)) throw ConfigError("l must be positive for IPM");
    if (point.size() != 6) throw ConfigError("IPM fixed point must have 6 components (a,b,r1,s1,u1,q1)");
    TWVector6 x{point[0], point[1], point[2], point[3], point[4], point[5]};
    const auto f = ipm_tw_rhs_rescaled(v, l, x, branch);
    double res = 0.0;
    for (double fi : f) res = std::max(res, std::abs(fi));
    if (res > 1e-10 / std::min(1.0, l))
      throw ConfigError(fmt::format("point is not a fixed point (rhs residual {:.3g})", res));
    sys = eigensystem_of<6>(ipm_jacobian_rescaled(v, l, x, branch));
  }
  sys.model = model;
  sys.point = point;
  return sys;
}

namespace {

void require_nonzero_speed(double v) {
  if (v == 0.0) throw SolverError("no heteroclinic: no traveling wave at v=0 (the orbit is homoclinic)");
  if (!std::isfinite(v)) throw ConfigError("speed must be finite");
}

struct ClosedForm {
  double a0, kappa, b_far;
};

ClosedForm closed_form(double v, Branch branch) {
  const bool rneg = branch == Branch::RNegative;
  return {rneg ? 4.0 * v : -4.0 * v, rneg ? -2.0 : 2.0, v > 0.0 ? 2.0 : -2.0};
}

}  // namespace

TWVector4 tfe_explicit_profile(double v, Branch branch, double xi) {
  require_nonzero_speed(v);
  const auto cf = closed_form(v, branch);
  const double th = std::tanh(v * xi / 2.0);
  const double sech2 = 1.0 - th * th;
  const double a = cf.a0 / 2.0 * (1.0 - th);
  const double r = -cf.a0 * v / 4.0 * sech2;
  return {a, cf.b_far + cf.kappa * a, r, cf.kappa * r};
}

WaveEndpoints tfe_endpoints(double v, Branch branch) {
  require_nonzero_speed(v);
  const auto cf = closed_form(v, branch);
  const ConcentrationPair far = from_ab(0.0, cf.b_far);
  const ConcentrationPair mid = from_ab(cf.a0, cf.b_far + cf.kappa * cf.a0);
  WaveEndpoints w;
  w.v = v;
  w.branch = branch;
  w.left = v > 0.0 ? mid : far;
  w.right = v > 0.0 ? far : mid;
  return w;
}

double conserved_quantity(Manifold m, double v, double a, double r, double s, double tol) {
  auto require = [&](bool ok, const char* what) {
    if (!ok) throw ConfigError(fmt::format("point (a={}, r={}, s={}) is off manifold {}: {}", a, r, s, to_string(m), what));
  };
  const double scale = 1.0 + std::abs(r) + std::abs(s);
  switch (m) {
    case Manifold::I1:
      require(std::abs(s - 2.0 * r) <= tol * scale && r >= -tol, "needs s = 2r, r >= 0");
      return r + (v + a / 2.0) * (v + a / 2.0);
    case Manifold::I2:
      require(std::abs(s + r) <= tol * scale && r >= -tol, "needs s = -r, r >= 0");
      return r - (a - v) * (a - v) / 2.0;
    case Manifold::I3:
      require(std::abs(s - r) <= tol * scale && r <= tol, "needs s = r, r <= 0");
      return r + (a + v) * (a + v) / 2.0;
    case Manifold::I4:
      require(std::abs(s + 2.0 * r) <= tol * scale && r <= tol, "needs s = -2r, r <= 0");
      return r - (a / 2.0 - v) * (a / 2.0 - v);
    case Manifold::V0:
      require(v == 0.0, "only invariant at v = 0");
      return s + a * a / 2.0;
  }
  return 0.0;
}

std::optional<double> rankine_hugoniot_speed(ConcentrationPair left, ConcentrationPair right) {
  auto g = [](ConcentrationPair c) { return -(c.c1 - c.c2) * (c.c1 - c.c2) / 2.0; };
  const double den = b_of(right) - b_of(left);
  const double scale = std::max({1.0, std::abs(b_of(right)), std::abs(b_of(left))});
  if (std::abs(den) <= 1e-14 * scale) return std::nullopt;
  return (g(right) - g(left)) / den;
}

}  // namespace tubes
