#pragma once

// Manufactured-solution residual of the semi-discrete operator: prescribed
// smooth c1, c2, u and f are fed to rhs() and compared with
//   c1_t = -(u c1)_y + c1_yy - f,  c2_t = (u c2)_y + c2_yy + f.

#include <algorithm>
#include <cmath>

#include "tubes/pde.hpp"

namespace tubes::testing {

namespace mms {

inline double c1(double y) { return std::tanh(y) + 0.3 * std::exp(-y * y); }
inline double c2(double y) { return std::tanh(y) - 0.2 * std::exp(-y * y) * std::cos(y); }
inline double u(double y) { return 0.5 * std::sin(y) * std::exp(-y * y / 8.0); }
inline double f(double y) { return 0.2 * std::exp(-y * y) * std::cos(2.0 * y); }

template <class F>
double d1(F g, double y) {
  const double e = 1e-5;
  return (g(y + e) - g(y - e)) / (2.0 * e);
}

template <class F>
double d2(F g, double y) {
  const double e = 1e-4;
  return (g(y + e) - 2.0 * g(y) + g(y - e)) / (e * e);
}

}  // namespace mms

/// Max-norm residual on [-8, 8] for a grid of n cells on [-10, 10].
inline double manufactured_residual(std::size_t n) {
  using namespace mms;
  Grid1D g{-10.0, 10.0, n};
  Snapshot s;
  s.field = TubesField(g);
  s.flow.u1_edge.resize(n + 1);
  s.f.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    s.field.c1[j] = c1(g.center(j));
    s.field.c2[j] = c2(g.center(j));
    s.f[j] = f(g.center(j));
  }
  for (std::size_t e = 0; e <= n; ++e) s.flow.u1_edge[e] = u(g.y_min + static_cast<double>(e) * g.h());
  const auto r = rhs(s);
  double worst = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double y = g.center(j);
    if (std::abs(y) > 8.0) continue;
    const double e1 = -d1([](double x) { return u(x) * c1(x); }, y) + d2(c1, y) - f(y);
    const double e2 = d1([](double x) { return u(x) * c2(x); }, y) + d2(c2, y) + f(y);
    worst = std::max({worst, std::abs(r.dc1[j] - e1), std::abs(r.dc2[j] - e2)});
  }
  return worst;
}

}  // namespace tubes::testing
