#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "symlab/kernels.hpp"

using namespace symlab::kernels;

namespace {

std::vector<double> random_vec(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

double max_gap(const std::vector<double>& a, const std::vector<double>& b) {
  double g = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) g = std::max(g, std::abs(a[i] - b[i]));
  return g;
}

struct BackendGuard {
  Backend saved = active().backend;
  ~BackendGuard() { set_backend(saved); }
};

}  // namespace

TEST_CASE("dot and axpy agree with a naive loop on both tables") {
  std::mt19937_64 rng(7);
  for (std::size_t n : {0u, 1u, 3u, 4u, 7u, 8u, 31u, 64u, 257u}) {
    const auto a = random_vec(rng, n);
    const auto b = random_vec(rng, n);
    double ref = 0.0;
    for (std::size_t i = 0; i < n; ++i) ref += a[i] * b[i];
    CHECK(std::abs(scalar_table().dot(a.data(), b.data(), n) - ref) <= 1e-12);
    CHECK(std::abs(avx2_table().dot(a.data(), b.data(), n) - ref) <= 1e-12);

    auto y1 = b, y2 = b, yref = b;
    for (std::size_t i = 0; i < n; ++i) yref[i] += 0.75 * a[i];
    scalar_table().axpy(0.75, a.data(), y1.data(), n);
    avx2_table().axpy(0.75, a.data(), y2.data(), n);
    CHECK(max_gap(y1, yref) <= 1e-15);
    CHECK(max_gap(y2, yref) <= 1e-15);
  }
}

TEST_CASE("gemm backends agree on odd shapes") {
  std::mt19937_64 rng(11);
  const std::size_t shapes[][3] = {{1, 1, 1}, {3, 5, 2}, {4, 4, 4}, {7, 9, 5}, {16, 3, 17}, {33, 8, 6}};
  for (const auto& s : shapes) {
    const std::size_t m = s[0], k = s[1], n = s[2];
    const auto a = random_vec(rng, m * k);
    const auto b = random_vec(rng, k * n);
    std::vector<double> ref(m * n, 0.0), c1(m * n, 9.0), c2(m * n, 9.0);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < n; ++j)
        for (std::size_t p = 0; p < k; ++p) ref[i * n + j] += a[i * k + p] * b[p * n + j];
    scalar_table().gemm(a.data(), b.data(), c1.data(), m, k, n);
    avx2_table().gemm(a.data(), b.data(), c2.data(), m, k, n);
    CHECK(max_gap(c1, ref) <= 1e-12);
    CHECK(max_gap(c2, ref) <= 1e-12);
  }
}

TEST_CASE("contract3 matches the triple sum under either backend") {
  BackendGuard guard;
  std::mt19937_64 rng(3);
  const std::size_t n = 6;
  const auto t = random_vec(rng, n * n * n);
  const auto x = random_vec(rng, n);
  const auto y = random_vec(rng, n);
  std::vector<double> ref(n, 0.0);
  for (std::size_t c = 0; c < n; ++c)
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) ref[c] += t[(c * n + a) * n + b] * x[a] * y[b];
  for (Backend be : {Backend::Scalar, Backend::Avx2}) {
    set_backend(be);
    std::vector<double> z(n), scratch(n * n);
    contract3(t.data(), x.data(), y.data(), z.data(), n, scratch.data());
    CHECK(max_gap(z, ref) <= 1e-12);
  }
}

TEST_CASE("backend names") {
  CHECK(backend_name(Backend::Scalar) == "scalar");
  CHECK(backend_name(Backend::Avx2) == "avx2");
}
