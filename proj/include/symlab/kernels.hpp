#pragma once
// Dense inner-loop kernels with a scalar reference path and an AVX2/FMA path.
//
// The active backend is chosen once at first use: AVX2 when the CPU reports
// avx2+fma, scalar otherwise. SYMLAB_KERNELS=scalar forces the reference path.

#include <cstddef>
#include <span>
#include <string_view>

namespace symlab::kernels {

enum class Backend { Scalar, Avx2 };

struct KernelTable {
  Backend backend;
  double (*dot)(const double* a, const double* b, std::size_t n);
  void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
  // C (m x n) = A (m x k) * B (k x n), all row-major, C overwritten.
  void (*gemm)(const double* a, const double* b, double* c, std::size_t m,
               std::size_t k, std::size_t n);
};

const KernelTable& scalar_table();
const KernelTable& avx2_table();  // falls back to scalar on non-x86 builds
bool avx2_available();

const KernelTable& active();
void set_backend(Backend b);  // tests and benchmarking only
std::string_view backend_name(Backend b);

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  active().axpy(alpha, x.data(), y.data(), x.size());
}

inline void gemm(const double* a, const double* b, double* c, std::size_t m,
                 std::size_t k, std::size_t n) {
  active().gemm(a, b, c, m, k, n);
}

// z_c = sum_{a,b} t[c][a][b] x_a y_b for a dense cube t of side n (row-major).
// scratch must hold n*n doubles.
void contract3(const double* t, const double* x, const double* y, double* z,
               std::size_t n, double* scratch);

}  // namespace symlab::kernels
