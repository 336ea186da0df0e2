#include "tubes/kernels.hpp"

#include "kernels_impl.hpp"

namespace tubes::kernels {

namespace {

void tfe_edge_velocity(const double* c1p, const double* c2p, double* ue, std::size_t n_edges) {
  for (std::size_t e = 0; e < n_edges; ++e) ue[e] = detail::tfe_edge_velocity_1(c1p, c2p, e);
}

void upwind_flux(const double* vel, double sign, const double* cp, double* flux, std::size_t n_edges) {
  for (std::size_t e = 0; e < n_edges; ++e) flux[e] = detail::upwind_flux_1(vel, sign, cp, e);
}

void edge_divergence(const double* ue, double inv_h, double* rate, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) rate[j] = detail::edge_divergence_1(ue, inv_h, j);
}

void interflow(const double* rate, const double* c1, const double* c2, double* f, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) f[j] = detail::interflow_1(rate, c1, c2, j);
}

void cell_update(const double* cp, const double* flux, const double* f, double f_sign, double inv_h,
                 double inv_h2, double* out, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) out[j] = detail::cell_update_1(cp, flux, f, f_sign, inv_h, inv_h2, j);
}

void axpy(const double* x, double a, const double* y, double* out, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) out[j] = x[j] + a * y[j];
}

void rk2_combine(const double* x, const double* p, double a, const double* k, double* out, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) out[j] = 0.5 * (x[j] + (p[j] + a * k[j]));
}

double max_abs(const double* x, std::size_t n) {
  double m = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    const double a = x[j] < 0.0 ? -x[j] : x[j];
    m = a > m ? a : m;
  }
  return m;
}

}  // namespace

const KernelTable& scalar_table() {
  static const KernelTable table{"scalar",   tfe_edge_velocity, upwind_flux, edge_divergence, interflow,
                                 cell_update, axpy,              rk2_combine, max_abs};
  return table;
}

}  // namespace tubes::kernels
