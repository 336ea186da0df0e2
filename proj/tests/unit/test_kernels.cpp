#include <doctest.h>

#include <cmath>
#include <cstring>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "tubes/kernels.hpp"
#include "tubes/tridiagonal.hpp"

using namespace tubes;
using tubes::kernels::KernelTable;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> d(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = d(rng);
  return v;
}

bool bitwise_equal(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

// Sizes around the 4-wide vector length, including empty and tail-only.
const std::size_t kSizes[] = {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 63, 64, 65, 1001};

void check_tables_agree(const KernelTable& A, const KernelTable& B) {
  std::mt19937_64 rng(12345);
  for (std::size_t n : kSizes) {
    CAPTURE(n);
    const auto c1p = random_vec(rng, n + 2);
    const auto c2p = random_vec(rng, n + 2);
    const auto vel = random_vec(rng, n + 1);
    const auto f = random_vec(rng, n);
    const auto x = random_vec(rng, n);
    const auto y = random_vec(rng, n);

    std::vector<double> ra(n + 1), rb(n + 1);
    A.tfe_edge_velocity(c1p.data(), c2p.data(), ra.data(), n + 1);
    B.tfe_edge_velocity(c1p.data(), c2p.data(), rb.data(), n + 1);
    CHECK(bitwise_equal(ra, rb));

    for (double sign : {1.0, -1.0}) {
      A.upwind_flux(vel.data(), sign, c1p.data(), ra.data(), n + 1);
      B.upwind_flux(vel.data(), sign, c1p.data(), rb.data(), n + 1);
      CHECK(bitwise_equal(ra, rb));
    }

    std::vector<double> sa(n), sb(n);
    A.edge_divergence(vel.data(), 7.5, sa.data(), n);
    B.edge_divergence(vel.data(), 7.5, sb.data(), n);
    CHECK(bitwise_equal(sa, sb));

    A.interflow(x.data(), c1p.data(), c2p.data(), sa.data(), n);
    B.interflow(x.data(), c1p.data(), c2p.data(), sb.data(), n);
    CHECK(bitwise_equal(sa, sb));

    A.cell_update(c1p.data(), vel.data(), f.data(), -1.0, 7.5, 56.25, sa.data(), n);
    B.cell_update(c1p.data(), vel.data(), f.data(), -1.0, 7.5, 56.25, sb.data(), n);
    CHECK(bitwise_equal(sa, sb));

    A.axpy(x.data(), 0.37, y.data(), sa.data(), n);
    B.axpy(x.data(), 0.37, y.data(), sb.data(), n);
    CHECK(bitwise_equal(sa, sb));

    A.rk2_combine(x.data(), y.data(), 0.37, f.data(), sa.data(), n);
    B.rk2_combine(x.data(), y.data(), 0.37, f.data(), sb.data(), n);
    CHECK(bitwise_equal(sa, sb));

    const double ma = A.max_abs(x.data(), n);
    const double mb = B.max_abs(x.data(), n);
    CHECK(std::memcmp(&ma, &mb, sizeof(double)) == 0);
  }
}

}  // namespace

TEST_CASE("scalar kernels match their definitions") {
  const auto& K = kernels::scalar_table();
  const std::vector<double> c1p{0.0, 1.0, -1.0, 0.5};
  const std::vector<double> c2p{0.0, 0.0, 1.0, 0.5};
  std::vector<double> ue(3);
  K.tfe_edge_velocity(c1p.data(), c2p.data(), ue.data(), 3);
  CHECK(ue[0] == -0.25);
  CHECK(ue[1] == -(1.0 - 2.0) / 4.0);
  CHECK(ue[2] == 0.5);

  const std::vector<double> vel{1.0, -2.0, 0.0};
  const std::vector<double> cp{3.0, 5.0, 7.0, 11.0};
  std::vector<double> flux(3);
  K.upwind_flux(vel.data(), 1.0, cp.data(), flux.data(), 3);
  CHECK(flux[0] == 3.0);    // w > 0 takes the lower cell
  CHECK(flux[1] == -14.0);  // w < 0 takes the upper cell
  CHECK(flux[2] == 0.0);
  K.upwind_flux(vel.data(), -1.0, cp.data(), flux.data(), 3);
  CHECK(flux[0] == -5.0);
  CHECK(flux[1] == 10.0);

  const std::vector<double> rate{2.0, -3.0};
  const std::vector<double> a{0.5, 0.5}, b{-0.25, -0.25};
  std::vector<double> f(2);
  K.interflow(rate.data(), a.data(), b.data(), f.data(), 2);
  CHECK(f[0] == 1.0);
  CHECK(f[1] == 0.75);

  CHECK(K.max_abs(nullptr, 0) == 0.0);
  const std::vector<double> m{1.0, -4.0, 3.0};
  CHECK(K.max_abs(m.data(), 3) == 4.0);
}

TEST_CASE("AVX2 kernels are bit-identical to the scalar reference") {
  const KernelTable* avx = kernels::avx2_table();
  if (!avx) {
    MESSAGE("AVX2 not available on this CPU; comparing scalar with itself");
    check_tables_agree(kernels::scalar_table(), kernels::scalar_table());
    return;
  }
  CHECK(avx->name != kernels::scalar_table().name);
  check_tables_agree(kernels::scalar_table(), *avx);
}

TEST_CASE("max_abs agrees on NaN-free inputs with signed zeros and large values") {
  const auto& S = kernels::scalar_table();
  const auto& K = kernels::active();
  std::vector<double> v{-0.0, 0.0, 1e300, -1e301, 5.0, -5.0, 1e-300};
  CHECK(S.max_abs(v.data(), v.size()) == 1e301);
  CHECK(K.max_abs(v.data(), v.size()) == 1e301);
}

TEST_CASE("tridiagonal solve agrees with a dense solve") {
  std::mt19937_64 rng(7);
  for (std::size_t n : {1u, 2u, 3u, 10u, 257u}) {
    CAPTURE(n);
    auto sub = random_vec(rng, n);
    auto sup = random_vec(rng, n);
    auto diag = random_vec(rng, n, 2.5, 4.0);
    const auto rhs = random_vec(rng, n);
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
      const auto k = static_cast<Eigen::Index>(i);
      A(k, k) = diag[i];
      if (i > 0) A(k, k - 1) = sub[i];
      if (i + 1 < n) A(k, k + 1) = sup[i];
    }
    const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(rhs.data(), static_cast<Eigen::Index>(n));
    const Eigen::VectorXd ref = A.partialPivLu().solve(b);
    const TridiagonalFactorization T(sub, diag, sup);
    const auto x = T.solve(rhs);
    for (std::size_t i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(ref(static_cast<Eigen::Index>(i))).epsilon(1e-12));

    // In-place solve.
    std::vector<double> y = rhs;
    T.solve(y, y);
    CHECK(y == x);
  }
}

TEST_CASE("constant-coefficient tridiagonal solve reproduces a known vector") {
  const std::size_t n = 50;
  const TridiagonalFactorization T(n, 1.0, -2.5, 1.0);
  std::vector<double> x(n), rhs(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = std::sin(0.3 * static_cast<double>(i));
  for (std::size_t i = 0; i < n; ++i)
    rhs[i] = -2.5 * x[i] + (i > 0 ? x[i - 1] : 0.0) + (i + 1 < n ? x[i + 1] : 0.0);
  const auto sol = T.solve(rhs);
  for (std::size_t i = 0; i < n; ++i) CHECK(sol[i] == doctest::Approx(x[i]).epsilon(1e-13));
}
