#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "symlab/lie_core.hpp"

using namespace symlab;

namespace {

Vec unit(int dim, int i) {
  Vec e = Vec::Zero(dim);
  e[i] = 1.0;
  return e;
}

Vec random_element(std::mt19937_64& rng, int dim) {
  std::normal_distribution<double> g;
  Vec x(dim);
  for (int i = 0; i < dim; ++i) x[i] = g(rng);
  return x;
}

double cmat_gap(const CMat& a, const CMat& b) { return (a - b).norm(); }

struct Case {
  const char* name;
  int n;
  int dim;
};

const Case kCatalog[] = {{"so", 3, 3}, {"so", 4, 6}, {"so", 6, 15}, {"su", 2, 3}, {"su", 3, 8},
                         {"su", 4, 15}, {"sp", 1, 3}, {"sp", 2, 10}, {"sp", 3, 21}};

}  // namespace

TEST_CASE("su(3) basis order and Gram entries") {
  const AlgebraBasis su3 = build_algebra("su", 3, 0.5);
  REQUIRE(su3.dim() == 8);
  CHECK(su3.gram()(0, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(su3.gram()(0, 1) == doctest::Approx(-0.5).epsilon(1e-14));
  // C_12 = i(E_12 + E_21) sits at index 2, B_23 = E_23 - E_32 at index 7.
  const CMat& c12 = su3.basis()[2];
  CHECK(c12.im(0, 1) == 1.0);
  CHECK(c12.im(1, 0) == 1.0);
  const CMat& b23 = su3.basis()[7];
  CHECK(b23.re(1, 2) == 1.0);
  CHECK(b23.re(2, 1) == -1.0);
}

TEST_CASE("so(3) basis is orthonormal at c = 1/2") {
  const AlgebraBasis so3 = build_algebra("so", 3, 0.5);
  CHECK((so3.gram() - Mat::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-14);
}

TEST_CASE("dimension formulas") {
  for (const Case& c : kCatalog) {
    CAPTURE(c.name);
    CAPTURE(c.n);
    CHECK(build_algebra(c.name, c.n).dim() == c.dim);
  }
  CHECK_THROWS_AS(build_algebra("g", 2), Error);
  CHECK_THROWS_AS(build_algebra("su", 1), Error);
  CHECK_THROWS_AS(build_algebra("so", 1), Error);
  CHECK_THROWS_AS(build_algebra("sp", 0), Error);
}

TEST_CASE("bracket examples in su(3)") {
  const AlgebraBasis su3 = build_algebra("su", 3, 0.5);
  const Vec br = su3.bracket(unit(8, 5), unit(8, 6));  // [B_12, B_13]
  CHECK((br + unit(8, 7)).norm() <= 1e-12);
  const Vec ac = su3.bracket(unit(8, 0), unit(8, 2));  // [A_12, C_12]
  CHECK((ac + 2.0 * unit(8, 5)).norm() <= 1e-12);
  std::mt19937_64 rng(5);
  const Vec x = random_element(rng, 8);
  CHECK(su3.bracket(x, x).norm() <= 1e-12);
}

TEST_CASE("bracket routes agree and stay in the algebra") {
  std::mt19937_64 rng(9);
  for (const Case& c : kCatalog) {
    const AlgebraBasis a = build_algebra(c.name, c.n);
    for (int t = 0; t < 5; ++t) {
      const Vec x = random_element(rng, a.dim());
      const Vec y = random_element(rng, a.dim());
      const Vec via_matrix = a.bracket(x, y);
      CHECK((via_matrix - a.bracket_sc(x, y)).norm() <= 1e-10 * (1.0 + via_matrix.norm()));
      // Independent oracle: matrix commutator of the realized elements.
      const CMat direct = commutator(a.to_matrix(x), a.to_matrix(y));
      CHECK(cmat_gap(a.to_matrix(via_matrix), direct) <= 1e-10 * (1.0 + direct.norm()));
    }
  }
}

TEST_CASE("structural invariants hold for every catalog algebra") {
  for (const Case& c : kCatalog) {
    CAPTURE(c.name);
    CAPTURE(c.n);
    const AlgebraBasis a = build_algebra(c.name, c.n);
    const AlgebraDiagnostics d = diagnose(a);
    CHECK(d.independence_min_eig > 1e-3);
    CHECK(d.antisymmetry <= 1e-12);
    CHECK(d.jacobi <= 1e-10);
    CHECK(d.ad_invariance <= 1e-10);
    CHECK((a.gram() - a.gram().transpose()).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("Killing form ratios") {
  const KillingForm su3 = killing_form(build_algebra("su", 3, 0.5));
  CHECK(su3.trace_ratio == doctest::Approx(6.0).epsilon(1e-12));
  CHECK(su3.fit_residual <= 1e-10);
  const KillingForm so3 = killing_form(build_algebra("so", 3, 0.5));
  CHECK(so3.trace_ratio == doctest::Approx(1.0).epsilon(1e-12));

  // Independent oracle: trace(ad_i ad_j) from matrix-commutator ad matrices.
  const AlgebraBasis a = build_algebra("su", 3, 0.5);
  Mat oracle(8, 8);
  for (int i = 0; i < 8; ++i)
    for (int j = 0; j < 8; ++j) oracle(i, j) = (a.ad_matrix(unit(8, i)) * a.ad_matrix(unit(8, j))).trace();
  CHECK((oracle - su3.gram_b).cwiseAbs().maxCoeff() <= 1e-10);

  for (const Case& c : kCatalog) {
    const KillingForm k = killing_form(build_algebra(c.name, c.n));
    Eigen::SelfAdjointEigenSolver<Mat> es(k.gram_b);
    CHECK(es.eigenvalues().maxCoeff() < 0.0);
    CHECK((k.gram_b - k.gram_b.transpose()).cwiseAbs().maxCoeff() <= 1e-12);
  }
}

TEST_CASE("Killing ratio does not depend on the trace coefficient") {
  const double rho_half = killing_form(build_algebra("su", 4, 0.5)).trace_ratio;
  const double rho_two = killing_form(build_algebra("su", 4, 2.0)).trace_ratio;
  CHECK(rho_half == doctest::Approx(rho_two).epsilon(1e-12));
  CHECK(rho_half == doctest::Approx(8.0).epsilon(1e-12));  // 2n for su(n)
}

TEST_CASE("ad_operator restricted and degenerate cases") {
  const AlgebraBasis su3 = build_algebra("su", 3, 0.5);
  Mat dom(8, 1), cod(8, 1);
  dom.col(0) = unit(8, 2);  // C_12
  cod.col(0) = unit(8, 5);  // B_12
  const Mat m = ad_operator(su3, unit(8, 0), dom, cod);
  CHECK(m(0, 0) == doctest::Approx(-2.0).epsilon(1e-12));

  std::mt19937_64 rng(2);
  const Vec x = random_element(rng, 8);
  Mat span_x(8, 1);
  span_x.col(0) = x;
  CHECK(ad_operator(su3, x, span_x, span_x).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("matrix exponential") {
  const AlgebraBasis so3 = build_algebra("so", 3, 0.5);
  const CMat id = CMat::identity(3);
  CHECK(cmat_gap(exp_matrix(so3, Vec::Zero(3)), id) <= 1e-15);

  const CMat rot = exp_matrix(so3, std::numbers::pi * unit(3, 0));
  CMat expected = CMat::zero(3);
  expected.re(0, 0) = -1.0;
  expected.re(1, 1) = -1.0;
  expected.re(2, 2) = 1.0;
  CHECK(cmat_gap(rot, expected) <= 1e-12);

  std::mt19937_64 rng(4);
  for (const Case& c : kCatalog) {
    const AlgebraBasis a = build_algebra(c.name, c.n);
    const Vec x = random_element(rng, a.dim());
    const CMat g = exp_matrix(a, x);
    const CMat ginv = exp_matrix(a, -x);
    const int n = g.size();
    CHECK(cmat_gap(g * ginv, CMat::identity(n)) <= 1e-10);
    CHECK(cmat_gap(g * g.adjoint(), CMat::identity(n)) <= 1e-10);
  }
}

TEST_CASE("from_parts reproduces the algebra without recomputation") {
  const AlgebraBasis a = build_algebra("sp", 2, 0.5);
  const AlgebraBasis b = AlgebraBasis::from_parts(a.name(), a.n(), a.trace_coefficient(), a.basis(), a.gram(),
                                                  a.structure_constants());
  CHECK(b.structure_constants() == a.structure_constants());
  CHECK(b.gram() == a.gram());
  std::mt19937_64 rng(8);
  const Vec x = random_element(rng, a.dim());
  const Vec y = random_element(rng, a.dim());
  CHECK((a.bracket_sc(x, y) - b.bracket_sc(x, y)).norm() == 0.0);
}

TEST_CASE("orthonormalize drops dependent columns") {
  const AlgebraBasis su3 = build_algebra("su", 3, 0.5);
  Mat v(8, 3);
  v.col(0) = unit(8, 0);
  v.col(1) = unit(8, 1);
  v.col(2) = unit(8, 0) + 2.0 * unit(8, 1);
  const Mat q = orthonormalize(su3, v);
  REQUIRE(q.cols() == 2);
  CHECK((q.transpose() * su3.gram() * q - Mat::Identity(2, 2)).cwiseAbs().maxCoeff() <= 1e-12);
}
