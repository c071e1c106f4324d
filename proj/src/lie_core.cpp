#include "symlab/lie_core.hpp"

#include <algorithm>
#include <cmath>

#include "symlab/kernels.hpp"

namespace symlab {
namespace {

// Column-major product c = a * b through the row-major kernel (c^T = b^T a^T).
Mat mat_mul(const Mat& a, const Mat& b) {
  Mat c(a.rows(), b.cols());
  kernels::gemm(b.data(), a.data(), c.data(), static_cast<std::size_t>(b.cols()),
                static_cast<std::size_t>(b.rows()), static_cast<std::size_t>(a.rows()));
  return c;
}

CMat unit(int n, int j, int k, double re, double im) {
  CMat m = CMat::zero(n);
  m.re(j, k) = re;
  m.im(j, k) = im;
  return m;
}

// B_jk = E_jk - E_kj
CMat real_antisym(int n, int j, int k) {
  CMat m = CMat::zero(n);
  m.re(j, k) = 1.0;
  m.re(k, j) = -1.0;
  return m;
}

// C_jk = i (E_jk + E_kj)
CMat imag_sym(int n, int j, int k) {
  CMat m = CMat::zero(n);
  m.im(j, k) = 1.0;
  m.im(k, j) = 1.0;
  return m;
}

// A_jk = i (E_jj - E_kk)
CMat imag_diag_diff(int n, int j, int k) {
  CMat m = CMat::zero(n);
  m.im(j, j) = 1.0;
  m.im(k, k) = -1.0;
  return m;
}

std::vector<CMat> so_basis(int n) {
  std::vector<CMat> b;
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) b.push_back(real_antisym(n, j, k));
  return b;
}

std::vector<CMat> su_basis(int n) {
  std::vector<CMat> b;
  for (int j = 0; j + 1 < n; ++j) b.push_back(imag_diag_diff(n, j, j + 1));
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) b.push_back(imag_sym(n, j, k));
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) b.push_back(real_antisym(n, j, k));
  return b;
}

// Embed the n x n blocks [[a, b], [-conj(b), conj(a)]] into 2n x 2n.
CMat quaternionic(const CMat& a, const CMat& b) {
  const int n = a.size();
  CMat x = CMat::zero(2 * n);
  x.re.topLeftCorner(n, n) = a.re;
  x.im.topLeftCorner(n, n) = a.im;
  x.re.topRightCorner(n, n) = b.re;
  x.im.topRightCorner(n, n) = b.im;
  x.re.bottomLeftCorner(n, n) = -b.re;
  x.im.bottomLeftCorner(n, n) = b.im;
  x.re.bottomRightCorner(n, n) = a.re;
  x.im.bottomRightCorner(n, n) = -a.im;
  return x;
}

std::vector<CMat> sp_basis(int n) {
  std::vector<CMat> b;
  const CMat zero = CMat::zero(n);
  // u(n) block
  for (int j = 0; j < n; ++j) b.push_back(quaternionic(unit(n, j, j, 0.0, 1.0), zero));
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) b.push_back(quaternionic(real_antisym(n, j, k), zero));
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) b.push_back(quaternionic(imag_sym(n, j, k), zero));
  // complex symmetric off-diagonal block, real then imaginary parts
  for (int j = 0; j < n; ++j) b.push_back(quaternionic(zero, unit(n, j, j, 1.0, 0.0)));
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) {
      CMat s = unit(n, j, k, 1.0, 0.0);
      s.re(k, j) = 1.0;
      b.push_back(quaternionic(zero, s));
    }
  for (int j = 0; j < n; ++j) b.push_back(quaternionic(zero, unit(n, j, j, 0.0, 1.0)));
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) b.push_back(quaternionic(zero, imag_sym(n, j, k)));
  return b;
}

}  // namespace

CMat operator*(const CMat& a, const CMat& b) {
  return {mat_mul(a.re, b.re) - mat_mul(a.im, b.im), mat_mul(a.re, b.im) + mat_mul(a.im, b.re)};
}

CMat commutator(const CMat& a, const CMat& b) { return a * b - b * a; }

double re_trace_product(const CMat& a, const CMat& b) {
  // sum_ij a_ij b_ji
  return (a.re.cwiseProduct(b.re.transpose())).sum() - (a.im.cwiseProduct(b.im.transpose())).sum();
}

AlgebraBasis::AlgebraBasis(std::string name, int n, double trace_coefficient,
                           std::vector<CMat> basis)
    : name_(std::move(name)), n_(n), trace_coefficient_(trace_coefficient),
      basis_(std::move(basis)) {
  if (!(trace_coefficient_ > 0.0)) throw Error("trace coefficient must be positive");
  const int d = dim();
  gram_.resize(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) gram_(i, j) = gram_(j, i) = inner(basis_[i], basis_[j]);
  factor_gram();

  f_.assign(static_cast<std::size_t>(d) * d * d, 0.0);
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      const Expansion e = expand(commutator(basis_[i], basis_[j]));
      if (e.residual > 1e-10) throw Error("basis of " + name_ + " is not closed under brackets");
      for (int k = 0; k < d; ++k) {
        double v = e.coefficients[k];
        if (std::abs(v) < 1e-14) v = 0.0;
        f_[(static_cast<std::size_t>(k) * d + i) * d + j] = v;
        f_[(static_cast<std::size_t>(k) * d + j) * d + i] = -v;
      }
    }
  }
}

AlgebraBasis AlgebraBasis::from_parts(std::string name, int n, double trace_coefficient,
                                      std::vector<CMat> basis, Mat gram,
                                      std::vector<double> structure_constants) {
  AlgebraBasis a;
  a.name_ = std::move(name);
  a.n_ = n;
  a.trace_coefficient_ = trace_coefficient;
  a.basis_ = std::move(basis);
  a.gram_ = std::move(gram);
  a.f_ = std::move(structure_constants);
  const auto d = static_cast<std::size_t>(a.dim());
  if (a.gram_.rows() != a.dim() || a.gram_.cols() != a.dim() || a.f_.size() != d * d * d)
    throw Error("inconsistent stored algebra data for " + a.name_);
  a.factor_gram();
  return a;
}

void AlgebraBasis::factor_gram() {
  gram_llt_.compute(gram_);
  if (gram_llt_.info() != Eigen::Success) throw Error("Gram matrix of " + name_ + " is not positive definite");
}

CMat AlgebraBasis::to_matrix(const Vec& x) const {
  if (x.size() != dim()) throw Error("element length does not match algebra dimension");
  CMat m = CMat::zero(matrix_size());
  for (int i = 0; i < dim(); ++i) {
    if (x[i] == 0.0) continue;
    m.re += x[i] * basis_[i].re;
    m.im += x[i] * basis_[i].im;
  }
  return m;
}

Expansion AlgebraBasis::expand(const CMat& z) const {
  Vec rhs(dim());
  for (int l = 0; l < dim(); ++l) rhs[l] = inner(basis_[l], z);
  Expansion e;
  e.coefficients = gram_llt_.solve(rhs);
  e.residual = (z - to_matrix(e.coefficients)).norm();
  return e;
}

Vec AlgebraBasis::bracket(const Vec& x, const Vec& y, double tol) const {
  const CMat z = commutator(to_matrix(x), to_matrix(y));
  Expansion e = expand(z);
  if (e.residual > tol * std::max(1.0, z.norm()))
    throw Error("bracket left the span of " + name_ + " (residual " + std::to_string(e.residual) + ")");
  return e.coefficients;
}

Vec AlgebraBasis::bracket_sc(const Vec& x, const Vec& y) const {
  const auto d = static_cast<std::size_t>(dim());
  Vec z(dim());
  std::vector<double> scratch(d * d);
  kernels::contract3(f_.data(), x.data(), y.data(), z.data(), d, scratch.data());
  return z;
}

Mat AlgebraBasis::ad_matrix(const Vec& x) const {
  const int d = dim();
  Mat m = Mat::Zero(d, d);
  for (int j = 0; j < d; ++j)
    for (int k = 0; k < d; ++k) {
      double s = 0.0;
      for (int i = 0; i < d; ++i) s += f(k, i, j) * x[i];
      m(k, j) = s;
    }
  return m;
}

AlgebraBasis build_algebra(std::string_view name, int n, double trace_coefficient) {
  if (name == "so") {
    if (n < 2) throw Error("so(n) requires n >= 2");
    return AlgebraBasis("so", n, trace_coefficient, so_basis(n));
  }
  if (name == "su") {
    if (n < 2) throw Error("su(n) requires n >= 2");
    return AlgebraBasis("su", n, trace_coefficient, su_basis(n));
  }
  if (name == "sp") {
    if (n < 1) throw Error("sp(n) requires n >= 1");
    return AlgebraBasis("sp", n, trace_coefficient, sp_basis(n));
  }
  throw Error("unsupported algebra '" + std::string(name) + "'");
}

KillingForm killing_form(const AlgebraBasis& algebra) {
  const int d = algebra.dim();
  std::vector<Mat> ad(d);
  for (int i = 0; i < d; ++i) ad[i] = algebra.ad_matrix(Vec::Unit(d, i));
  KillingForm kf;
  kf.gram_b.resize(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j)
      kf.gram_b(i, j) = kf.gram_b(j, i) = (ad[i].cwiseProduct(ad[j].transpose())).sum();
  const Mat t = -algebra.gram() / algebra.trace_coefficient();
  kf.trace_ratio = (kf.gram_b.cwiseProduct(t)).sum() / t.squaredNorm();
  kf.fit_residual = (kf.gram_b - kf.trace_ratio * t).cwiseAbs().maxCoeff();
  return kf;
}

Mat ad_operator(const AlgebraBasis& algebra, const Vec& x, const Mat& domain,
                const Mat& codomain) {
  const Mat gc = codomain.transpose() * algebra.gram() * codomain;
  Eigen::LLT<Mat> llt(gc);
  if (llt.info() != Eigen::Success || gc.diagonal().minCoeff() <= 0.0)
    throw Error("degenerate codomain basis");
  const Mat ad = algebra.ad_matrix(x);
  const Mat rhs = codomain.transpose() * algebra.gram() * (ad * domain);
  return llt.solve(rhs);
}

CMat exp_matrix(const CMat& x) {
  const int n = x.size();
  const double nrm = x.norm();
  int squarings = 0;
  if (nrm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(nrm / 0.5)));
  const CMat y = std::ldexp(1.0, -squarings) * x;
  CMat result = CMat::identity(n);
  CMat term = CMat::identity(n);
  for (int k = 1; k <= 30; ++k) {
    term = (1.0 / k) * (term * y);
    result += term;
    if (term.norm() < 1e-18) break;
  }
  for (int s = 0; s < squarings; ++s) result = result * result;
  return result;
}

AlgebraDiagnostics diagnose(const AlgebraBasis& algebra) {
  const int d = algebra.dim();
  AlgebraDiagnostics diag{};
  Eigen::SelfAdjointEigenSolver<Mat> es(algebra.gram());
  diag.independence_min_eig = es.eigenvalues().minCoeff();
  for (int k = 0; k < d; ++k)
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        diag.antisymmetry = std::max(diag.antisymmetry, std::abs(algebra.f(k, i, j) + algebra.f(k, j, i)));
  std::vector<Vec> e(d);
  for (int i = 0; i < d; ++i) e[i] = Vec::Unit(d, i);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      const Vec ij = algebra.bracket_sc(e[i], e[j]);
      for (int k = 0; k < d; ++k) {
        const Vec jk = algebra.bracket_sc(e[j], e[k]);
        const Vec ki = algebra.bracket_sc(e[k], e[i]);
        const Vec jac = algebra.bracket_sc(ij, e[k]) + algebra.bracket_sc(jk, e[i]) +
                        algebra.bracket_sc(ki, e[j]);
        diag.jacobi = std::max(diag.jacobi, algebra.norm(jac));
        // <[z,x],y> + <x,[z,y]> with z = e_i, x = e_j, y = e_k
        const Vec zx = algebra.bracket_sc(e[i], e[j]);
        const Vec zy = algebra.bracket_sc(e[i], e[k]);
        diag.ad_invariance = std::max(
            diag.ad_invariance, std::abs(algebra.inner(zx, e[k]) + algebra.inner(e[j], zy)));
      }
    }
  return diag;
}

Mat orthonormalize(const AlgebraBasis& algebra, const Mat& v, double tol) {
  std::vector<Vec> out;
  for (int c = 0; c < v.cols(); ++c) {
    Vec x = v.col(c);
    const double n0 = algebra.norm(x);
    if (n0 <= tol) continue;
    for (int pass = 0; pass < 2; ++pass)
      for (const Vec& q : out) x -= algebra.inner(q, x) * q;
    const double n1 = algebra.norm(x);
    if (n1 <= tol * std::max(1.0, n0)) continue;
    out.push_back(x / n1);
  }
  Mat m(v.rows(), static_cast<Eigen::Index>(out.size()));
  for (std::size_t i = 0; i < out.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = out[i];
  return m;
}

}  // namespace symlab
