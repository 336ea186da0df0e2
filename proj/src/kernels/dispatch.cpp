#include <cstdlib>

#include "tubes/kernels.hpp"

namespace tubes::kernels {

#if defined(TUBES_HAVE_AVX2)
const KernelTable& avx2_table_impl();
#endif

const KernelTable* avx2_table() {
#if defined(TUBES_HAVE_AVX2)
  static const bool supported = __builtin_cpu_supports("avx2");
  return supported ? &avx2_table_impl() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& active() {
  static const KernelTable& table = [&]() -> const KernelTable& {
    if (std::getenv("TUBES_FORCE_SCALAR") == nullptr) {
      if (const auto* t = avx2_table()) return *t;
    }
    return scalar_table();
  }();
  return table;
}

}  // namespace tubes::kernels
