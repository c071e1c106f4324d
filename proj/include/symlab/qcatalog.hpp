#pragma once
// Scalar profile family q(t) and the coefficient recipes a0, a_lambda.

#include <optional>
#include <string>
#include <vector>

#include "symlab/jet.hpp"
#include "symlab/lie_core.hpp"
#include "symlab/symspace.hpp"

namespace symlab {

enum class QKind { Lin, Tanh, Sinh, Ln, Exp, Coth, Const };

struct QTerm {
  double coef = 1.0;
  QKind kind = QKind::Lin;
  double c = 1.0;
};

enum class LimitKind { FinitePositive, Infinite, Zero };

struct LimitClass {
  LimitKind kind;
  double value;           // L when finite
  double numeric_ratio;   // q(t)/t at the smallest sample
  bool numeric_agrees;
};

/// q(t) = sum_i coef_i * kind_i(c_i t).
class ScalarProfile {
 public:
  ScalarProfile() = default;
  explicit ScalarProfile(std::vector<QTerm> terms);
  /// "tanh:1.0", "id:1.0", "coth", "const:2", "sinh:2.0+lin:0.5", "2*tanh+3*sinh".
  static ScalarProfile parse(const std::string& literal);

  const std::vector<QTerm>& terms() const { return terms_; }
  std::string literal() const;

  double value(double t) const;
  double derivative(double t) const;
  Jet eval(Jet t) const { return {value(t.v), derivative(t.v) * t.d}; }
  double eval(double t) const { return value(t); }

  LimitClass limit_class() const;
  /// 1 - q(t)^2 - q'(t).
  double riccati_residual(double t) const;

 private:
  std::vector<QTerm> terms_;
};

struct A0Recipe {
  enum class Kind { Const, Contact } kind = Kind::Const;
  double kappa = 1.0;
  static A0Recipe parse(const std::string& literal);
  std::string literal() const;
};

struct ALambdaRecipe {
  enum class Kind { Explicit, AlmostKahler, Contact } kind = Kind::Explicit;
  std::vector<double> values{1.0};
  static ALambdaRecipe parse(const std::string& literal);
  std::string literal() const;
};

template <class T>
struct CoefficientSet {
  T a0;
  std::vector<T> lambda;  // lambda_R(w) per positive root
  std::vector<T> q;
  std::vector<T> a;
  std::vector<T> b;
};

struct StructureProfile {
  ScalarProfile q = ScalarProfile::parse("id");
  A0Recipe a0;
  ALambdaRecipe alambda;
  double radius = 1.0;
  /// Constant q per positive root (derivative zero); empty slots use q.
  std::vector<std::optional<double>> q_overrides;

  static std::vector<std::optional<double>> parse_overrides(const std::string& literal);
  static std::string overrides_literal(const std::vector<std::optional<double>>& v);

  /// Per-root coefficients at w (a-coordinates). Throws on a chamber wall
  /// unless allow_wall is set, and on non-positive coefficients.
  template <class T>
  CoefficientSet<T> realize(const RestrictedRootData& roots, const std::vector<T>& w,
                            bool allow_wall = false) const;
};

/// Coefficients of the metric induced by the Sasaki metric on T_r at w = rX.
struct InducedMetric {
  std::vector<double> m_coef;  // per root, on m_lambda
  std::vector<double> k_coef;  // per root, on k_lambda
  double a_coef = 1.0;
};
InducedMetric induced_standard_metric(const RestrictedRootData& roots, double radius);

extern template CoefficientSet<double> StructureProfile::realize<double>(
    const RestrictedRootData&, const std::vector<double>&, bool) const;
extern template CoefficientSet<Jet> StructureProfile::realize<Jet>(
    const RestrictedRootData&, const std::vector<Jet>&, bool) const;

}  // namespace symlab
