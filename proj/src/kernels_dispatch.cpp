#include <atomic>
#include <cstdlib>
#include <string>

#include "symlab/kernels.hpp"

namespace symlab::kernels {

bool avx2_available() {
#if defined(__x86_64__) && (defined(__GNUC__) || defined(__clang__))
  static const bool ok = __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
  return ok && avx2_table().backend == Backend::Avx2;
#else
  return false;
#endif
}

namespace {

const KernelTable* pick_default() {
  if (const char* env = std::getenv("SYMLAB_KERNELS")) {
    if (std::string(env) == "scalar") return &scalar_table();
  }
  return avx2_available() ? &avx2_table() : &scalar_table();
}

std::atomic<const KernelTable*>& slot() {
  static std::atomic<const KernelTable*> current{pick_default()};
  return current;
}

}  // namespace

const KernelTable& active() { return *slot().load(std::memory_order_acquire); }

void set_backend(Backend b) {
  const KernelTable* t = &scalar_table();
  if (b == Backend::Avx2 && avx2_available()) t = &avx2_table();
  slot().store(t, std::memory_order_release);
}

std::string_view backend_name(Backend b) {
  return b == Backend::Avx2 ? "avx2" : "scalar";
}

void contract3(const double* t, const double* x, const double* y, double* z,
               std::size_t n, double* scratch) {
  const KernelTable& k = active();
  // scratch[c*n + a] = sum_b t[c][a][b] y_b
  for (std::size_t r = 0; r < n * n; ++r) scratch[r] = k.dot(t + r * n, y, n);
  for (std::size_t c = 0; c < n; ++c) z[c] = k.dot(scratch + c * n, x, n);
}

}  // namespace symlab::kernels
