#include "symlab/qcatalog.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace symlab {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

double parse_number(const std::string& s, const std::string& context) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    throw Error("bad number '" + s + "' in '" + context + "'");
  }
  if (used != s.size() || !std::isfinite(v)) throw Error("bad number '" + s + "' in '" + context + "'");
  return v;
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

const char* kind_name(QKind k) {
  switch (k) {
    case QKind::Lin: return "lin";
    case QKind::Tanh: return "tanh";
    case QKind::Sinh: return "sinh";
    case QKind::Ln: return "ln";
    case QKind::Exp: return "exp";
    case QKind::Coth: return "coth";
    case QKind::Const: return "const";
  }
  return "?";
}

QKind kind_from(const std::string& s, const std::string& context) {
  if (s == "lin" || s == "id") return QKind::Lin;
  if (s == "tanh") return QKind::Tanh;
  if (s == "sinh") return QKind::Sinh;
  if (s == "ln") return QKind::Ln;
  if (s == "exp") return QKind::Exp;
  if (s == "coth") return QKind::Coth;
  if (s == "const") return QKind::Const;
  throw Error("unknown q kind '" + s + "' in '" + context + "'");
}

double term_value(const QTerm& t, double x) {
  const double y = t.c * x;
  switch (t.kind) {
    case QKind::Lin: return y;
    case QKind::Tanh: return std::tanh(y);
    case QKind::Sinh: return std::sinh(y);
    case QKind::Ln: return std::log1p(y);
    case QKind::Exp: return std::expm1(y);
    case QKind::Coth: return 1.0 / std::tanh(y);
    case QKind::Const: return t.c;
  }
  return 0.0;
}

double term_derivative(const QTerm& t, double x) {
  const double y = t.c * x;
  switch (t.kind) {
    case QKind::Lin: return t.c;
    case QKind::Tanh: {
      const double s = 1.0 / std::cosh(y);
      return t.c * s * s;
    }
    case QKind::Sinh: return t.c * std::cosh(y);
    case QKind::Ln: return t.c / (1.0 + y);
    case QKind::Exp: return t.c * std::exp(y);
    case QKind::Coth: {
      const double s = 1.0 / std::sinh(y);
      return -t.c * s * s;
    }
    case QKind::Const: return 0.0;
  }
  return 0.0;
}

}  // namespace

ScalarProfile::ScalarProfile(std::vector<QTerm> terms) : terms_(std::move(terms)) {
  if (terms_.empty()) throw Error("empty q profile");
  for (const QTerm& t : terms_)
    if (!(t.coef > 0.0) || !(t.c > 0.0)) throw Error("q profile parameters must be positive");
}

ScalarProfile ScalarProfile::parse(const std::string& literal) {
  std::vector<QTerm> terms;
  if (const std::string t = trim(literal); !t.empty() && t.back() == '+')
    throw Error("empty term in q literal '" + literal + "'");
  std::stringstream ss(literal);
  std::string part;
  while (std::getline(ss, part, '+')) {
    part = trim(part);
    if (part.empty()) throw Error("empty term in q literal '" + literal + "'");
    QTerm t;
    if (const auto star = part.find('*'); star != std::string::npos) {
      t.coef = parse_number(trim(part.substr(0, star)), literal);
      part = trim(part.substr(star + 1));
    }
    std::string name = part;
    if (const auto colon = part.find(':'); colon != std::string::npos) {
      name = trim(part.substr(0, colon));
      t.c = parse_number(trim(part.substr(colon + 1)), literal);
    } else if (name == "const") {
      throw Error("const q kind needs a value, e.g. const:2");
    }
    t.kind = kind_from(name, literal);
    terms.push_back(t);
  }
  return ScalarProfile(std::move(terms));
}

std::string ScalarProfile::literal() const {
  std::string out;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i) out += "+";
    if (terms_[i].coef != 1.0) out += fmt(terms_[i].coef) + "*";
    out += std::string(kind_name(terms_[i].kind)) + ":" + fmt(terms_[i].c);
  }
  return out;
}

double ScalarProfile::value(double t) const {
  if (!(t > 0.0)) throw Error("q evaluated at non-positive t");
  double s = 0.0;
  for (const QTerm& term : terms_) s += term.coef * term_value(term, t);
  return s;
}

double ScalarProfile::derivative(double t) const {
  if (!(t > 0.0)) throw Error("q derivative evaluated at non-positive t");
  double s = 0.0;
  for (const QTerm& term : terms_) s += term.coef * term_derivative(term, t);
  return s;
}

double ScalarProfile::riccati_residual(double t) const {
  const double q = value(t);
  return 1.0 - q * q - derivative(t);
}

LimitClass ScalarProfile::limit_class() const {
  LimitClass lc{LimitKind::FinitePositive, 0.0, 0.0, false};
  bool infinite = false;
  for (const QTerm& t : terms_) {
    if (t.kind == QKind::Coth || t.kind == QKind::Const)
      infinite = true;
    else
      lc.value += t.coef * t.c;
  }
  if (infinite) {
    lc.kind = LimitKind::Infinite;
    lc.value = std::numeric_limits<double>::infinity();
  } else if (lc.value == 0.0) {
    lc.kind = LimitKind::Zero;
  }
  // q(t)/t at t = 1e-3 .. 1e-6
  double prev = 0.0;
  bool growing = true;
  for (int k = 3; k <= 6; ++k) {
    const double t = std::pow(10.0, -k);
    const double ratio = value(t) / t;
    if (k > 3 && ratio <= prev) growing = false;
    prev = ratio;
  }
  lc.numeric_ratio = prev;
  if (lc.kind == LimitKind::FinitePositive)
    lc.numeric_agrees = std::abs(prev - lc.value) <= 1e-4 * lc.value;
  else if (lc.kind == LimitKind::Infinite)
    lc.numeric_agrees = growing && prev > 1e4;
  else
    lc.numeric_agrees = std::abs(prev) <= 1e-4;
  return lc;
}

A0Recipe A0Recipe::parse(const std::string& literal) {
  A0Recipe r;
  const std::string s = trim(literal);
  if (s == "contact") {
    r.kind = Kind::Contact;
    return r;
  }
  if (s.rfind("const:", 0) == 0) {
    r.kind = Kind::Const;
    r.kappa = parse_number(s.substr(6), literal);
    if (!(r.kappa > 0.0)) throw Error("a0 constant must be positive");
    return r;
  }
  throw Error("unknown a0 recipe '" + literal + "' (expected const:<k> or contact)");
}

std::string A0Recipe::literal() const {
  return kind == Kind::Contact ? "contact" : "const:" + fmt(kappa);
}

ALambdaRecipe ALambdaRecipe::parse(const std::string& literal) {
  ALambdaRecipe r;
  const std::string s = trim(literal);
  if (s == "ak") {
    r.kind = Kind::AlmostKahler;
    r.values.clear();
    return r;
  }
  if (s == "contact") {
    r.kind = Kind::Contact;
    r.values.clear();
    return r;
  }
  std::string list;
  if (s.rfind("explicit:", 0) == 0)
    list = s.substr(9);
  else if (s.rfind("const:", 0) == 0)
    list = s.substr(6);
  else
    throw Error("unknown a_lambda recipe '" + literal + "' (expected ak, contact or explicit:<v,...>)");
  r.kind = Kind::Explicit;
  r.values.clear();
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const double v = parse_number(trim(item), literal);
    if (!(v > 0.0)) throw Error("a_lambda values must be positive");
    r.values.push_back(v);
  }
  if (r.values.empty()) throw Error("explicit a_lambda recipe needs values");
  return r;
}

std::string ALambdaRecipe::literal() const {
  if (kind == Kind::AlmostKahler) return "ak";
  if (kind == Kind::Contact) return "contact";
  std::string out = "explicit:";
  for (std::size_t i = 0; i < values.size(); ++i) out += (i ? "," : "") + fmt(values[i]);
  return out;
}

std::vector<std::optional<double>> StructureProfile::parse_overrides(const std::string& literal) {
  std::vector<std::optional<double>> out;
  if (trim(literal).empty()) return out;
  std::stringstream ss(literal);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (item == "-" || item.empty()) {
      out.emplace_back();
      continue;
    }
    const double v = parse_number(item, literal);
    if (!(v > 0.0)) throw Error("per-root q values must be positive");
    out.emplace_back(v);
  }
  return out;
}

std::string StructureProfile::overrides_literal(const std::vector<std::optional<double>>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + (v[i] ? fmt(*v[i]) : "-");
  return out;
}

template <class T>
CoefficientSet<T> StructureProfile::realize(const RestrictedRootData& roots, const std::vector<T>& w,
                                            bool allow_wall) const {
  const auto& pr = roots.positive_roots;
  const int nr = static_cast<int>(pr.size());
  if (static_cast<int>(w.size()) != roots.rank()) throw Error("point dimension does not match the rank");
  if (!q_overrides.empty() && static_cast<int>(q_overrides.size()) != nr)
    throw Error("per-root q list has " + std::to_string(q_overrides.size()) + " entries, space has " +
                std::to_string(nr) + " positive roots");
  if (alambda.kind == ALambdaRecipe::Kind::Explicit && alambda.values.size() != 1 &&
      static_cast<int>(alambda.values.size()) != nr)
    throw Error("explicit a_lambda list does not match the number of positive roots");
  if (!(radius > 0.0)) throw Error("radius must be positive");

  CoefficientSet<T> cs;
  cs.a0 = a0.kind == A0Recipe::Kind::Contact ? T(1.0 / (2.0 * radius)) : T(a0.kappa);
  for (int i = 0; i < nr; ++i) {
    T lam(0.0);
    for (int j = 0; j < roots.rank(); ++j) lam += T(pr[i].lambda_r[j]) * w[j];
    if (!(value_of(lam) > 0.0) && !allow_wall) throw Error("point lies on or outside a chamber wall");
    const T qv = (!q_overrides.empty() && q_overrides[i]) ? T(*q_overrides[i]) : q.eval(lam);
    T a(0.0);
    switch (alambda.kind) {
      case ALambdaRecipe::Kind::Explicit:
        a = T(alambda.values.size() == 1 ? alambda.values[0] : alambda.values[i]);
        break;
      case ALambdaRecipe::Kind::AlmostKahler:
        a = cs.a0 * cs.a0 * lam / qv;
        break;
      case ALambdaRecipe::Kind::Contact:
        a = cs.a0 * lam / (T(2.0 * radius) * qv);
        break;
    }
    if (!(value_of(a) > 0.0) || !(value_of(qv) > 0.0)) throw Error("realized coefficients must be positive");
    cs.lambda.push_back(lam);
    cs.q.push_back(qv);
    cs.a.push_back(a);
    cs.b.push_back(a * qv * qv);
  }
  return cs;
}

template CoefficientSet<double> StructureProfile::realize<double>(const RestrictedRootData&,
                                                                  const std::vector<double>&, bool) const;
template CoefficientSet<Jet> StructureProfile::realize<Jet>(const RestrictedRootData&,
                                                            const std::vector<Jet>&, bool) const;

InducedMetric induced_standard_metric(const RestrictedRootData& roots, double radius) {
  if (roots.rank() != 1) throw Error("induced standard metric is defined for rank one only");
  InducedMetric im;
  for (const auto& r : roots.positive_roots) {
    const double lam = r.lambda_r[0] * radius;
    im.m_coef.push_back(1.0);
    im.k_coef.push_back(lam * lam);
  }
  return im;
}

}  // namespace symlab
