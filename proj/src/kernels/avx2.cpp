// AVX2 variants. This translation unit is compiled with -mavx2; nothing here
// may run unless the CPU reports AVX2 support (see dispatch.cpp).

#include <immintrin.h>

#include "kernels_impl.hpp"
#include "tubes/kernels.hpp"

namespace tubes::kernels {

namespace {

constexpr std::size_t kLanes = 4;

void tfe_edge_velocity(const double* c1p, const double* c2p, double* ue, std::size_t n_edges) {
  const __m256d quarter = _mm256_set1_pd(0.25);
  const __m256d neg = _mm256_set1_pd(-0.0);
  std::size_t e = 0;
  for (; e + kLanes <= n_edges; e += kLanes) {
    const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(c1p + e), _mm256_loadu_pd(c2p + e));
    const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(c1p + e + 1), _mm256_loadu_pd(c2p + e + 1));
    const __m256d s = _mm256_xor_pd(_mm256_add_pd(d0, d1), neg);
    _mm256_storeu_pd(ue + e, _mm256_mul_pd(s, quarter));
  }
  for (; e < n_edges; ++e) ue[e] = detail::tfe_edge_velocity_1(c1p, c2p, e);
}

void upwind_flux(const double* vel, double sign, const double* cp, double* flux, std::size_t n_edges) {
  const __m256d sg = _mm256_set1_pd(sign);
  const __m256d zero = _mm256_setzero_pd();
  std::size_t e = 0;
  for (; e + kLanes <= n_edges; e += kLanes) {
    const __m256d w = _mm256_mul_pd(sg, _mm256_loadu_pd(vel + e));
    const __m256d up = _mm256_mul_pd(w, _mm256_loadu_pd(cp + e));
    const __m256d down = _mm256_mul_pd(w, _mm256_loadu_pd(cp + e + 1));
    const __m256d mask = _mm256_cmp_pd(w, zero, _CMP_GE_OQ);
    _mm256_storeu_pd(flux + e, _mm256_blendv_pd(down, up, mask));
  }
  for (; e < n_edges; ++e) flux[e] = detail::upwind_flux_1(vel, sign, cp, e);
}

void edge_divergence(const double* ue, double inv_h, double* rate, std::size_t n) {
  const __m256d ih = _mm256_set1_pd(inv_h);
  const __m256d neg = _mm256_set1_pd(-0.0);
  std::size_t j = 0;
  for (; j + kLanes <= n; j += kLanes) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(ue + j + 1), _mm256_loadu_pd(ue + j));
    _mm256_storeu_pd(rate + j, _mm256_xor_pd(_mm256_mul_pd(d, ih), neg));
  }
  for (; j < n; ++j) rate[j] = detail::edge_divergence_1(ue, inv_h, j);
}

void interflow(const double* rate, const double* c1, const double* c2, double* f, std::size_t n) {
  const __m256d zero = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + kLanes <= n; j += kLanes) {
    const __m256d r = _mm256_loadu_pd(rate + j);
    const __m256d from1 = _mm256_mul_pd(r, _mm256_loadu_pd(c1 + j));
    const __m256d from2 = _mm256_mul_pd(r, _mm256_loadu_pd(c2 + j));
    const __m256d mask = _mm256_cmp_pd(r, zero, _CMP_GE_OQ);
    _mm256_storeu_pd(f + j, _mm256_blendv_pd(from2, from1, mask));
  }
  for (; j < n; ++j) f[j] = detail::interflow_1(rate, c1, c2, j);
}

void cell_update(const double* cp, const double* flux, const double* f, double f_sign, double inv_h,
                 double inv_h2, double* out, std::size_t n) {
  const __m256d ih = _mm256_set1_pd(inv_h);
  const __m256d ih2 = _mm256_set1_pd(inv_h2);
  const __m256d fs = _mm256_set1_pd(f_sign);
  const __m256d two = _mm256_set1_pd(2.0);
  std::size_t j = 0;
  for (; j + kLanes <= n; j += kLanes) {
    const __m256d adv = _mm256_mul_pd(_mm256_sub_pd(_mm256_loadu_pd(flux + j + 1), _mm256_loadu_pd(flux + j)), ih);
    const __m256d lap = _mm256_add_pd(
        _mm256_sub_pd(_mm256_loadu_pd(cp + j + 2), _mm256_mul_pd(two, _mm256_loadu_pd(cp + j + 1))),
        _mm256_loadu_pd(cp + j));
    const __m256d dif = _mm256_mul_pd(lap, ih2);
    const __m256d src = _mm256_sub_pd(_mm256_mul_pd(fs, _mm256_loadu_pd(f + j)), adv);
    _mm256_storeu_pd(out + j, _mm256_add_pd(src, dif));
  }
  for (; j < n; ++j) out[j] = detail::cell_update_1(cp, flux, f, f_sign, inv_h, inv_h2, j);
}

void axpy(const double* x, double a, const double* y, double* out, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  std::size_t j = 0;
  for (; j + kLanes <= n; j += kLanes)
    _mm256_storeu_pd(out + j, _mm256_add_pd(_mm256_loadu_pd(x + j), _mm256_mul_pd(av, _mm256_loadu_pd(y + j))));
  for (; j < n; ++j) out[j] = x[j] + a * y[j];
}

void rk2_combine(const double* x, const double* p, double a, const double* k, double* out, std::size_t n) {
  const __m256d av = _mm256_set1_pd(a);
  const __m256d half = _mm256_set1_pd(0.5);
  std::size_t j = 0;
  for (; j + kLanes <= n; j += kLanes) {
    const __m256d inner = _mm256_add_pd(_mm256_loadu_pd(p + j), _mm256_mul_pd(av, _mm256_loadu_pd(k + j)));
    _mm256_storeu_pd(out + j, _mm256_mul_pd(half, _mm256_add_pd(_mm256_loadu_pd(x + j), inner)));
  }
  for (; j < n; ++j) out[j] = 0.5 * (x[j] + (p[j] + a * k[j]));
}

double max_abs(const double* x, std::size_t n) {
  const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
  __m256d m = _mm256_setzero_pd();
  std::size_t j = 0;
  for (; j + kLanes <= n; j += kLanes) m = _mm256_max_pd(m, _mm256_and_pd(_mm256_loadu_pd(x + j), abs_mask));
  alignas(32) double lanes[kLanes];
  _mm256_store_pd(lanes, m);
  double r = 0.0;
  for (double v : lanes) r = v > r ? v : r;
  for (; j < n; ++j) {
    const double a = x[j] < 0.0 ? -x[j] : x[j];
    r = a > r ? a : r;
  }
  return r;
}

}  // namespace

const KernelTable& avx2_table_impl() {
  static const KernelTable table{"avx2",      tfe_edge_velocity, upwind_flux, edge_divergence, interflow,
                                 cell_update, axpy,              rk2_combine, max_abs};
  return table;
}

}  // namespace tubes::kernels
