#pragma once
// Classical compact matrix Lie algebras as real vector spaces.
//
// Elements are coefficient vectors over an ordered basis of complex matrices.
// Complex matrices are kept as (re, im) planes of real matrices so that every
// vector-space computation stays real.

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace symlab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Square complex matrix split into real and imaginary planes.
struct CMat {
  Mat re;
  Mat im;

  static CMat zero(int n) { return {Mat::Zero(n, n), Mat::Zero(n, n)}; }
  static CMat identity(int n) { return {Mat::Identity(n, n), Mat::Zero(n, n)}; }

  int size() const { return static_cast<int>(re.rows()); }
  CMat adjoint() const { return {re.transpose(), -im.transpose()}; }
  CMat conjugate() const { return {re, -im}; }
  double norm() const { return std::sqrt(re.squaredNorm() + im.squaredNorm()); }

  CMat& operator+=(const CMat& o) {
    re += o.re;
    im += o.im;
    return *this;
  }
  CMat& operator-=(const CMat& o) {
    re -= o.re;
    im -= o.im;
    return *this;
  }
};

inline CMat operator+(CMat a, const CMat& b) { return a += b; }
inline CMat operator-(CMat a, const CMat& b) { return a -= b; }
inline CMat operator*(double s, const CMat& a) { return {s * a.re, s * a.im}; }

/// Matrix product through the active SIMD kernel table.
CMat operator*(const CMat& a, const CMat& b);
CMat commutator(const CMat& a, const CMat& b);
/// Re trace(a b).
double re_trace_product(const CMat& a, const CMat& b);

struct Expansion {
  Vec coefficients;
  double residual = 0.0;  // Frobenius norm of the part outside the span
};

/// A real Lie algebra of n x n complex matrices with inner product
/// <X,Y> = -c' Re trace(XY), Gram matrix and structure constants
/// [e_i, e_j] = sum_k f^k_ij e_k stored as f[(k*dim + i)*dim + j].
class AlgebraBasis {
 public:
  AlgebraBasis(std::string name, int n, double trace_coefficient, std::vector<CMat> basis);
  /// Rebuild from stored data without recomputing Gram or structure constants.
  static AlgebraBasis from_parts(std::string name, int n, double trace_coefficient,
                                 std::vector<CMat> basis, Mat gram,
                                 std::vector<double> structure_constants);

  const std::string& name() const { return name_; }
  int n() const { return n_; }
  int matrix_size() const { return basis_.empty() ? 0 : basis_.front().size(); }
  int dim() const { return static_cast<int>(basis_.size()); }
  double trace_coefficient() const { return trace_coefficient_; }
  const std::vector<CMat>& basis() const { return basis_; }
  const Mat& gram() const { return gram_; }
  const std::vector<double>& structure_constants() const { return f_; }
  double f(int k, int i, int j) const { return f_[(static_cast<std::size_t>(k) * dim() + i) * dim() + j]; }

  double inner(const Vec& x, const Vec& y) const { return x.dot(gram_ * y); }
  double inner(const CMat& x, const CMat& y) const {
    return -trace_coefficient_ * re_trace_product(x, y);
  }
  double norm(const Vec& x) const { return std::sqrt(inner(x, x)); }

  CMat to_matrix(const Vec& x) const;
  Expansion expand(const CMat& z) const;

  /// Commutator of the matrices, re-expanded in the basis. Throws when the
  /// result leaves the span by more than tol.
  Vec bracket(const Vec& x, const Vec& y, double tol = 1e-10) const;
  /// Same bracket through the structure constants.
  Vec bracket_sc(const Vec& x, const Vec& y) const;
  /// Matrix of ad_x in basis coordinates (column j = [x, e_j]).
  Mat ad_matrix(const Vec& x) const;

 private:
  AlgebraBasis() = default;
  void factor_gram();

  std::string name_;
  int n_ = 0;
  double trace_coefficient_ = 0.5;
  std::vector<CMat> basis_;
  Mat gram_;
  Eigen::LLT<Mat> gram_llt_;
  std::vector<double> f_;
};

/// name in {"so", "su", "sp"}; sp(n) is realized in u(2n).
AlgebraBasis build_algebra(std::string_view name, int n, double trace_coefficient = 0.5);

struct KillingForm {
  Mat gram_b;            // trace(ad_i ad_j)
  double trace_ratio;    // B(X,Y) = rho * Re trace(XY)
  double fit_residual;   // max |B - rho T| over basis pairs
};
KillingForm killing_form(const AlgebraBasis& algebra);

/// v -> <.,.>-orthogonal projection of [x, v] onto span(codomain), in the
/// given bases (columns are coefficient vectors).
Mat ad_operator(const AlgebraBasis& algebra, const Vec& x, const Mat& domain,
                const Mat& codomain);

CMat exp_matrix(const CMat& x);
inline CMat exp_matrix(const AlgebraBasis& algebra, const Vec& x) {
  return exp_matrix(algebra.to_matrix(x));
}

struct AlgebraDiagnostics {
  double independence_min_eig;  // smallest Gram eigenvalue
  double antisymmetry;
  double jacobi;
  double ad_invariance;
};
AlgebraDiagnostics diagnose(const AlgebraBasis& algebra);

/// Orthonormalize the columns of v in the algebra inner product
/// (modified Gram-Schmidt); columns dependent to within tol are dropped.
Mat orthonormalize(const AlgebraBasis& algebra, const Mat& v, double tol = 1e-9);

}  // namespace symlab
