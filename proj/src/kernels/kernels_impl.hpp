#pragma once

// Single-element formulas shared by the scalar kernels and the vector tails.

#include <cstddef>

namespace tubes::kernels::detail {

inline double tfe_edge_velocity_1(const double* c1p, const double* c2p, std::size_t e) {
  return -((c1p[e] - c2p[e]) + (c1p[e + 1] - c2p[e + 1])) * 0.25;
}

inline double upwind_flux_1(const double* vel, double sign, const double* cp, std::size_t e) {
  const double w = sign * vel[e];
  return w >= 0.0 ? w * cp[e] : w * cp[e + 1];
}

inline double edge_divergence_1(const double* ue, double inv_h, std::size_t j) {
  return -((ue[j + 1] - ue[j]) * inv_h);
}

inline double interflow_1(const double* rate, const double* c1, const double* c2, std::size_t j) {
  return rate[j] >= 0.0 ? rate[j] * c1[j] : rate[j] * c2[j];
}

inline double cell_update_1(const double* cp, const double* flux, const double* f, double f_sign, double inv_h,
                            double inv_h2, std::size_t j) {
  const double adv = (flux[j + 1] - flux[j]) * inv_h;
  const double dif = ((cp[j + 2] - 2.0 * cp[j + 1]) + cp[j]) * inv_h2;
  return (f_sign * f[j] - adv) + dif;
}

}  // namespace tubes::kernels::detail
