#pragma once

// Data-parallel inner loops of the finite-volume solver.
//
// Every kernel has a scalar reference implementation and, on x86-64, an AVX2
// variant selected at runtime. The variants perform the same IEEE operations in
// the same order (no FMA contraction), so their results are bit-identical.
//
// Padded arrays ("cp") carry one ghost cell on each side: cp[0] and cp[n+1].
// Edge e sits between padded cells e and e+1, so a grid of n cells has n+1 edges.

#include <cstddef>
#include <string_view>

namespace tubes::kernels {

struct KernelTable {
  std::string_view name;

  /// ue[e] = -((c1p[e]-c2p[e]) + (c1p[e+1]-c2p[e+1])) / 4
  void (*tfe_edge_velocity)(const double* c1p, const double* c2p, double* ue, std::size_t n_edges);

  /// w = sign*vel[e]; flux[e] = w * (w >= 0 ? cp[e] : cp[e+1])
  void (*upwind_flux)(const double* vel, double sign, const double* cp, double* flux, std::size_t n_edges);

  /// rate[j] = -(ue[j+1] - ue[j]) * inv_h
  void (*edge_divergence)(const double* ue, double inv_h, double* rate, std::size_t n);

  /// f[j] = rate[j] * (rate[j] >= 0 ? c1[j] : c2[j])
  void (*interflow)(const double* rate, const double* c1, const double* c2, double* f, std::size_t n);

  /// out[j] = (f_sign*f[j] - (flux[j+1]-flux[j])*inv_h) + ((cp[j+2] - 2 cp[j+1]) + cp[j])*inv_h2
  void (*cell_update)(const double* cp, const double* flux, const double* f, double f_sign, double inv_h,
                      double inv_h2, double* out, std::size_t n);

  /// out[j] = x[j] + a*y[j]
  void (*axpy)(const double* x, double a, const double* y, double* out, std::size_t n);

  /// out[j] = 0.5*(x[j] + (p[j] + a*k[j]))
  void (*rk2_combine)(const double* x, const double* p, double a, const double* k, double* out, std::size_t n);

  /// max_j |x[j]| (0 for n == 0)
  double (*max_abs)(const double* x, std::size_t n);
};

const KernelTable& scalar_table();

/// AVX2 table when compiled in and supported by the running CPU, else nullptr.
const KernelTable* avx2_table();

/// Table used by the solver. AVX2 when available unless TUBES_FORCE_SCALAR is set.
const KernelTable& active();

}  // namespace tubes::kernels
