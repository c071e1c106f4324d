#include "symlab/frames.hpp"

#include <algorithm>
#include <cmath>

#include "symlab/kernels.hpp"

namespace symlab {
namespace {

constexpr double kFdStep = 1e-5;

std::vector<Jet> seed_jets(const Vec& w, const Vec& dir) {
  std::vector<Jet> out(w.size());
  for (int i = 0; i < w.size(); ++i) out[i] = Jet(w[i], dir.size() ? dir[i] : 0.0);
  return out;
}

std::vector<Jet> const_jets(const Vec& w) { return seed_jets(w, Vec()); }

Tangent derivative_of(const JTangent& t) {
  Tangent out;
  out.m.resize(t.m.size());
  out.u.resize(t.u.size());
  for (std::size_t i = 0; i < t.m.size(); ++i) out.m[i] = t.m[i].d;
  for (std::size_t i = 0; i < t.u.size(); ++i) out.u[i] = t.u[i].d;
  return out;
}

Tangent axpy(double a, const Tangent& x, Tangent y) {
  for (std::size_t i = 0; i < y.m.size(); ++i) y.m[i] += a * x.m[i];
  for (std::size_t i = 0; i < y.u.size(); ++i) y.u[i] += a * x.u[i];
  return y;
}

Tangent scaled(double a, Tangent x) {
  for (double& v : x.m) v *= a;
  for (double& v : x.u) v *= a;
  return x;
}

Tangent zero_tangent(const FrameContext& ctx) {
  return {std::vector<double>(ctx.mbar_dim(), 0.0), std::vector<double>(ctx.rank(), 0.0)};
}

JTangent to_jets(const Tangent& t) {
  JTangent out;
  out.m.assign(t.m.begin(), t.m.end());
  out.u.assign(t.u.begin(), t.u.end());
  return out;
}

double tangent_norm(const Tangent& t) {
  double s = 0.0;
  for (double v : t.m) s += v * v;
  for (double v : t.u) s += v * v;
  return std::sqrt(s);
}

Vec flatten(const Tangent& t) {
  Vec v(t.m.size() + t.u.size());
  for (std::size_t i = 0; i < t.m.size(); ++i) v[static_cast<Eigen::Index>(i)] = t.m[i];
  for (std::size_t i = 0; i < t.u.size(); ++i) v[static_cast<Eigen::Index>(t.m.size() + i)] = t.u[i];
  return v;
}

using ScalarField = std::function<Jet(const std::vector<Jet>&)>;

double derive_scalar(const ScalarField& f, const Vec& w, const Vec& dir, DerivMode mode) {
  if (dir.norm() == 0.0) return 0.0;
  if (mode == DerivMode::Analytic) return f(seed_jets(w, dir)).d;
  auto central = [&](double h) {
    return (f(const_jets(w + h * dir)).v - f(const_jets(w - h * dir)).v) / (2.0 * h);
  };
  return (4.0 * central(kFdStep / 2) - central(kFdStep)) / 3.0;
}

Vec u_of(const Tangent& t) { return Eigen::Map<const Vec>(t.u.data(), static_cast<Eigen::Index>(t.u.size())); }

CoefficientSet<double> realize_at(const FrameAtPoint& frame, const StructureProfile& sp) {
  return sp.realize<double>(frame.ctx->roots(), std::vector<double>(frame.w.data(), frame.w.data() + frame.w.size()));
}

std::vector<double> to_std(const Vec& w) { return {w.data(), w.data() + w.size()}; }

void require_sphere(const FrameAtPoint& frame, const StructureProfile& sp) {
  if (frame.kind != FrameKind::Sphere) throw Error("operation needs a sphere frame");
  if (std::abs(frame.radius - sp.radius) > 1e-12 * frame.radius)
    throw Error("profile radius does not match the sphere frame");
}

}  // namespace

FrameContext::FrameContext(const SymmetricPair& pair, const RestrictedRootData& roots)
    : pair_(&pair), roots_(&roots), rank_(roots.rank()), root_dim_(roots.root_dim()),
      mbar_dim_(roots.mbar_dim()), mbar_(roots.mbar_basis()) {
  const AlgebraBasis& g = pair.algebra;
  const int d = mbar_dim_;
  for (int i = 0; i < static_cast<int>(roots.positive_roots.size()); ++i) {
    first_slot_.push_back(static_cast<int>(slot_root_.size()));
    for (int s = 0; s < roots.positive_roots[i].multiplicity; ++s) slot_root_.push_back(i);
  }
  c_.assign(static_cast<std::size_t>(d) * d * d, 0.0);
  const Mat proj = mbar_.transpose() * g.gram();
  for (int a = 0; a < d; ++a)
    for (int b = a + 1; b < d; ++b) {
      const Vec z = g.bracket_sc(mbar_.col(a), mbar_.col(b));
      const Vec cz = proj * z;
      h_norm_ = std::max(h_norm_, g.norm(z - mbar_ * cz));
      for (int c = 0; c < d; ++c) {
        c_[(static_cast<std::size_t>(c) * d + a) * d + b] = cz[c];
        c_[(static_cast<std::size_t>(c) * d + b) * d + a] = -cz[c];
      }
    }
}

Vec FrameContext::bracket(const Vec& a, const Vec& b) const {
  const auto d = static_cast<std::size_t>(mbar_dim_);
  Vec z(mbar_dim_);
  std::vector<double> scratch(d * d);
  kernels::contract3(c_.data(), a.data(), b.data(), z.data(), d, scratch.data());
  return z;
}

Tangent value_of(const JTangent& t) {
  Tangent out;
  out.m.resize(t.m.size());
  out.u.resize(t.u.size());
  for (std::size_t i = 0; i < t.m.size(); ++i) out.m[i] = t.m[i].v;
  for (std::size_t i = 0; i < t.u.size(); ++i) out.u[i] = t.u[i].v;
  return out;
}

Field constant_field(const Tangent& t) {
  const JTangent j = to_jets(t);
  return [j](const std::vector<Jet>&) { return j; };
}

Tangent eval_field(const Field& f, const Vec& w) { return value_of(f(const_jets(w))); }

Tangent derive_field(const Field& f, const Vec& w, const Vec& dir, DerivMode mode) {
  if (mode == DerivMode::Analytic) return derivative_of(f(seed_jets(w, dir)));
  auto central = [&](double h) {
    const Tangent p = eval_field(f, w + h * dir);
    const Tangent m = eval_field(f, w - h * dir);
    return scaled(1.0 / (2.0 * h), axpy(-1.0, m, p));
  };
  return scaled(1.0 / 3.0, axpy(-1.0, central(kFdStep), scaled(4.0, central(kFdStep / 2))));
}

Tangent field_bracket(const FrameContext& ctx, const Field& a, const Field& b, const Vec& w, DerivMode mode) {
  const Tangent av = eval_field(a, w);
  const Tangent bv = eval_field(b, w);
  const Vec alpha = u_of(av);
  const Vec beta = u_of(bv);
  const Tangent db = alpha.norm() > 0 ? derive_field(b, w, alpha, mode) : zero_tangent(ctx);
  const Tangent da = beta.norm() > 0 ? derive_field(a, w, beta, mode) : zero_tangent(ctx);
  const Vec am = Eigen::Map<const Vec>(av.m.data(), ctx.mbar_dim());
  const Vec bm = Eigen::Map<const Vec>(bv.m.data(), ctx.mbar_dim());
  const Vec br = ctx.bracket(am, bm);
  Tangent out = zero_tangent(ctx);
  for (int i = 0; i < ctx.mbar_dim(); ++i) out.m[i] = br[i] + db.m[i] - da.m[i];
  for (int i = 0; i < ctx.rank(); ++i) out.u[i] = db.u[i] - da.u[i];
  return out;
}

Mat FrameAtPoint::matrix() const {
  Mat f(ctx->ambient_dim(), size());
  for (int i = 0; i < size(); ++i) f.col(i) = flatten(eval_field(fields[i], w));
  return f;
}

Vec FrameAtPoint::coordinates(const Tangent& t, double* residual) const {
  const Mat f = matrix();
  const Vec v = flatten(t);
  const Vec c = f.colPivHouseholderQr().solve(v);
  if (residual) *residual = (f * c - v).norm();
  return c;
}

FrameAtPoint full_frame(const FrameContext& ctx, const Vec& w) {
  FrameAtPoint fr;
  fr.ctx = &ctx;
  fr.kind = FrameKind::FullW;
  fr.w = w;
  const int r = ctx.rank();
  for (int j = 0; j < r; ++j) {
    Tangent t = zero_tangent(ctx);
    t.m[j] = 1.0;
    fr.fields.push_back(constant_field(t));
    fr.labels.push_back("X" + std::to_string(j + 1));
  }
  for (int j = 0; j < r; ++j) {
    Tangent t = zero_tangent(ctx);
    t.u[j] = 1.0;
    fr.fields.push_back(constant_field(t));
    fr.labels.push_back("d" + std::to_string(j + 1));
  }
  const auto labels = ctx.roots().mbar_labels();
  for (int i = r; i < ctx.mbar_dim(); ++i) {
    Tangent t = zero_tangent(ctx);
    t.m[i] = 1.0;
    fr.fields.push_back(constant_field(t));
    fr.labels.push_back(labels[i]);
  }
  return fr;
}

FrameAtPoint sphere_frame(const FrameContext& ctx, const Vec& w, double radius, int j0) {
  FrameAtPoint fr;
  fr.ctx = &ctx;
  fr.kind = FrameKind::Sphere;
  fr.w = w;
  fr.radius = radius;
  const int r = ctx.rank();
  const int dm = ctx.mbar_dim();
  if (std::abs(w.norm() - radius) > 1e-9 * radius) throw Error("point is not on the sphere of the given radius");
  fr.fields.push_back([radius, dm, r](const std::vector<Jet>& x) {
    JTangent t{std::vector<Jet>(dm), std::vector<Jet>(r)};
    for (int j = 0; j < r; ++j) t.m[j] = x[j] / Jet(radius);
    return t;
  });
  fr.labels.push_back("xiS");
  if (r >= 2) {
    fr.j0 = j0 >= 0 ? j0 : SphereChart::default_j0(w);
    const int jj = fr.j0;
    for (int j = 0; j < r; ++j) {
      if (j == jj) continue;
      fr.fields.push_back([j, jj, dm, r](const std::vector<Jet>& x) {
        JTangent t{std::vector<Jet>(dm), std::vector<Jet>(r)};
        t.m[jj] += x[j];
        t.m[j] -= x[jj];
        return t;
      });
      fr.labels.push_back("Y" + std::to_string(j + 1));
    }
    for (int j = 0; j < r; ++j) {
      if (j == jj) continue;
      fr.fields.push_back([j, jj, dm, r](const std::vector<Jet>& x) {
        JTangent t{std::vector<Jet>(dm), std::vector<Jet>(r)};
        t.u[jj] += x[j];
        t.u[j] -= x[jj];
        return t;
      });
      fr.labels.push_back("P" + std::to_string(j + 1));
    }
  }
  const auto labels = ctx.roots().mbar_labels();
  for (int i = r; i < dm; ++i) {
    Tangent t = zero_tangent(ctx);
    t.m[i] = 1.0;
    fr.fields.push_back(constant_field(t));
    fr.labels.push_back(labels[i]);
  }
  return fr;
}

template <class T>
TangentT<T> apply_j(const FrameContext& ctx, const CoefficientSet<T>& cs, const TangentT<T>& x) {
  TangentT<T> y{std::vector<T>(ctx.mbar_dim(), T(0.0)), std::vector<T>(ctx.rank(), T(0.0))};
  for (int j = 0; j < ctx.rank(); ++j) {
    y.m[j] = -x.u[j];
    y.u[j] = x.m[j];
  }
  for (int s = 0; s < ctx.root_dim(); ++s) {
    const T& q = cs.q[ctx.root_of_slot(s)];
    const T p = x.m[ctx.xi_index(s)];
    const T z = x.m[ctx.zeta_index(s)];
    y.m[ctx.xi_index(s)] = q * z;
    y.m[ctx.zeta_index(s)] = -(p / q);
  }
  return y;
}

template <class T>
TangentT<T> apply_phi(const FrameContext& ctx, const CoefficientSet<T>& cs, const std::vector<T>& w, double radius,
                      const TangentT<T>& x) {
  TangentT<T> y = apply_j(ctx, cs, x);
  T uw(0.0);
  for (int j = 0; j < ctx.rank(); ++j) uw += x.m[j] * w[j];
  const T s = uw / T(radius * radius);
  for (int j = 0; j < ctx.rank(); ++j) y.u[j] = x.m[j] - s * w[j];
  return y;
}

template <class T>
T metric(const FrameContext& ctx, const CoefficientSet<T>& cs, const TangentT<T>& x, const TangentT<T>& y) {
  T base(0.0);
  for (int j = 0; j < ctx.rank(); ++j) base += x.m[j] * y.m[j] + x.u[j] * y.u[j];
  T out = cs.a0 * cs.a0 * base;
  for (int s = 0; s < ctx.root_dim(); ++s) {
    const int i = ctx.root_of_slot(s);
    out += cs.a[i] * x.m[ctx.xi_index(s)] * y.m[ctx.xi_index(s)];
    out += cs.b[i] * x.m[ctx.zeta_index(s)] * y.m[ctx.zeta_index(s)];
  }
  return out;
}

template <class T>
T eta(const FrameContext& ctx, const CoefficientSet<T>& cs, const std::vector<T>& w, double radius,
      const TangentT<T>& x) {
  T uw(0.0);
  for (int j = 0; j < ctx.rank(); ++j) uw += x.m[j] * w[j];
  return cs.a0 / T(radius) * uw;
}

template TangentT<double> apply_j(const FrameContext&, const CoefficientSet<double>&, const TangentT<double>&);
template TangentT<Jet> apply_j(const FrameContext&, const CoefficientSet<Jet>&, const TangentT<Jet>&);
template TangentT<double> apply_phi(const FrameContext&, const CoefficientSet<double>&, const std::vector<double>&,
                                    double, const TangentT<double>&);
template TangentT<Jet> apply_phi(const FrameContext&, const CoefficientSet<Jet>&, const std::vector<Jet>&, double,
                                 const TangentT<Jet>&);
template double metric(const FrameContext&, const CoefficientSet<double>&, const TangentT<double>&,
                       const TangentT<double>&);
template Jet metric(const FrameContext&, const CoefficientSet<Jet>&, const TangentT<Jet>&, const TangentT<Jet>&);
template double eta(const FrameContext&, const CoefficientSet<double>&, const std::vector<double>&, double,
                    const TangentT<double>&);
template Jet eta(const FrameContext&, const CoefficientSet<Jet>&, const std::vector<Jet>&, double,
                 const TangentT<Jet>&);

Field j_field(const FrameContext& ctx, const StructureProfile& sp, Field a) {
  return [&ctx, sp, a = std::move(a)](const std::vector<Jet>& w) {
    const CoefficientSet<Jet> cs = sp.realize<Jet>(ctx.roots(), w);
    return apply_j(ctx, cs, a(w));
  };
}

Field phi_field(const FrameContext& ctx, const StructureProfile& sp, Field a) {
  return [&ctx, sp, a = std::move(a)](const std::vector<Jet>& w) {
    const CoefficientSet<Jet> cs = sp.realize<Jet>(ctx.roots(), w);
    return apply_phi(ctx, cs, w, sp.radius, a(w));
  };
}

Field reeb_field(const FrameContext& ctx, const StructureProfile& sp) {
  return [&ctx, sp](const std::vector<Jet>& w) {
    const CoefficientSet<Jet> cs = sp.realize<Jet>(ctx.roots(), w);
    JTangent t{std::vector<Jet>(ctx.mbar_dim()), std::vector<Jet>(ctx.rank())};
    const Jet scale = Jet(1.0) / (cs.a0 * Jet(sp.radius));
    for (int j = 0; j < ctx.rank(); ++j) t.m[j] = scale * w[j];
    return t;
  };
}

Field standard_xi_field(const FrameContext& ctx, double radius) {
  return [radius, dm = ctx.mbar_dim(), r = ctx.rank()](const std::vector<Jet>& w) {
    JTangent t{std::vector<Jet>(dm), std::vector<Jet>(r)};
    for (int j = 0; j < r; ++j) t.m[j] = w[j] / Jet(radius);
    return t;
  };
}

namespace {

// standard_xi_field leaves mbar short; pad to the context dimension.
Tangent padded(const FrameContext& ctx, Tangent t) {
  t.m.resize(ctx.mbar_dim(), 0.0);
  t.u.resize(ctx.rank(), 0.0);
  return t;
}

Field pad_field(const FrameContext& ctx, Field f) {
  return [&ctx, f = std::move(f)](const std::vector<Jet>& w) {
    JTangent t = f(w);
    t.m.resize(ctx.mbar_dim(), Jet(0.0));
    t.u.resize(ctx.rank(), Jet(0.0));
    return t;
  };
}

Tangent apply_structure(const FrameAtPoint& frame, const StructureProfile& sp, const CoefficientSet<double>& cs,
                        const Tangent& x) {
  if (frame.kind == FrameKind::FullW) return apply_j(*frame.ctx, cs, x);
  return apply_phi(*frame.ctx, cs, to_std(frame.w), sp.radius, x);
}

Field structure_field(const FrameAtPoint& frame, const StructureProfile& sp, Field a) {
  if (frame.kind == FrameKind::FullW) return j_field(*frame.ctx, sp, std::move(a));
  return phi_field(*frame.ctx, sp, std::move(a));
}

std::vector<Field> padded_fields(const FrameAtPoint& frame) {
  std::vector<Field> out;
  for (const Field& f : frame.fields) out.push_back(pad_field(*frame.ctx, f));
  return out;
}

}  // namespace

TensorPack structure_at(const FrameAtPoint& frame, const StructureProfile& sp) {
  if (frame.kind == FrameKind::Sphere) require_sphere(frame, sp);
  const FrameContext& ctx = *frame.ctx;
  const CoefficientSet<double> cs = realize_at(frame, sp);
  const int n = frame.size();
  std::vector<Tangent> f(n), jf(n);
  for (int i = 0; i < n; ++i) {
    f[i] = padded(ctx, eval_field(frame.fields[i], frame.w));
    jf[i] = apply_structure(frame, sp, cs, f[i]);
  }
  TensorPack tp;
  tp.labels = frame.labels;
  tp.g.resize(n, n);
  tp.omega.resize(n, n);
  tp.j_or_phi.resize(n, n);
  for (int i = 0; i < n; ++i) {
    double res = 0.0;
    tp.j_or_phi.col(i) = frame.coordinates(jf[i], &res);
    tp.frame_residual = std::max(tp.frame_residual, res);
    for (int j = 0; j < n; ++j) {
      tp.g(i, j) = metric(ctx, cs, f[i], f[j]);
      tp.omega(i, j) = metric(ctx, cs, f[i], jf[j]);
    }
  }
  if (frame.kind == FrameKind::Sphere) {
    const std::vector<double> w = to_std(frame.w);
    tp.eta.resize(n);
    for (int i = 0; i < n; ++i) tp.eta[i] = eta(ctx, cs, w, sp.radius, f[i]);
    tp.xi = frame.coordinates(padded(ctx, eval_field(reeb_field(ctx, sp), frame.w)));
  }
  tp.dtheta = dtheta_at(frame);
  return tp;
}

TensorPack standard_structure_at(const FrameAtPoint& frame) {
  if (frame.kind != FrameKind::FullW) throw Error("standard structure expects a full-W frame");
  StructureProfile sp;
  sp.q = ScalarProfile::parse("id:1");
  sp.a0 = A0Recipe::parse("const:1");
  sp.alambda = ALambdaRecipe::parse("explicit:1");
  return structure_at(frame, sp);
}

Mat dtheta_at(const FrameAtPoint& frame) {
  const FrameContext& ctx = *frame.ctx;
  const int n = frame.size();
  const int r = ctx.rank();
  Vec wm = Vec::Zero(ctx.mbar_dim());
  wm.head(r) = frame.w;
  std::vector<Tangent> f(n);
  for (int i = 0; i < n; ++i) f[i] = padded(ctx, eval_field(frame.fields[i], frame.w));
  Mat d(n, n);
  for (int i = 0; i < n; ++i) {
    const Vec mu = Eigen::Map<const Vec>(f[i].m.data(), ctx.mbar_dim());
    const Vec wmu = ctx.bracket(wm, mu);
    for (int j = 0; j < n; ++j) {
      double un = 0.0, vm = 0.0, br = 0.0;
      for (int k = 0; k < r; ++k) {
        un += f[i].u[k] * f[j].m[k];
        vm += f[j].u[k] * f[i].m[k];
      }
      for (int k = 0; k < ctx.mbar_dim(); ++k) br += wmu[k] * f[j].m[k];
      d(i, j) = 0.5 * (un - vm - br);
    }
  }
  return d;
}

Mat dtheta_exterior_at(const FrameAtPoint& frame, DerivMode mode) {
  const FrameContext& ctx = *frame.ctx;
  const int n = frame.size();
  const int r = ctx.rank();
  const std::vector<Field> fields = padded_fields(frame);
  auto theta_of = [r](const Field& b) -> ScalarField {
    return [r, b](const std::vector<Jet>& w) {
      const JTangent t = b(w);
      Jet s(0.0);
      for (int k = 0; k < r; ++k) s += w[k] * t.m[k];
      return s;
    };
  };
  Mat d(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Tangent a = eval_field(fields[i], frame.w);
      const Tangent b = eval_field(fields[j], frame.w);
      const double ab = derive_scalar(theta_of(fields[j]), frame.w, u_of(a), mode);
      const double ba = derive_scalar(theta_of(fields[i]), frame.w, u_of(b), mode);
      const Tangent br = field_bracket(ctx, fields[i], fields[j], frame.w, mode);
      double th = 0.0;
      for (int k = 0; k < r; ++k) th += frame.w[k] * br.m[k];
      d(i, j) = 0.5 * (ab - ba - th);
    }
  return d;
}

Mat deta_at(const FrameAtPoint& frame, const StructureProfile& sp) {
  require_sphere(frame, sp);
  const FrameContext& ctx = *frame.ctx;
  const int n = frame.size();
  const std::vector<Field> fields = padded_fields(frame);
  const CoefficientSet<double> cs = realize_at(frame, sp);
  const std::vector<double> w = to_std(frame.w);
  auto eta_of = [&ctx, &sp](const Field& b) -> ScalarField {
    return [&ctx, &sp, b](const std::vector<Jet>& x) {
      const CoefficientSet<Jet> c = sp.realize<Jet>(ctx.roots(), x);
      return eta(ctx, c, x, sp.radius, b(x));
    };
  };
  Mat d(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Tangent a = eval_field(fields[i], frame.w);
      const Tangent b = eval_field(fields[j], frame.w);
      const double ab = derive_scalar(eta_of(fields[j]), frame.w, u_of(a), DerivMode::Analytic);
      const double ba = derive_scalar(eta_of(fields[i]), frame.w, u_of(b), DerivMode::Analytic);
      const Tangent br = field_bracket(ctx, fields[i], fields[j], frame.w);
      d(i, j) = 0.5 * (ab - ba - eta(ctx, cs, w, sp.radius, br));
    }
  return d;
}

double contact_residual(const FrameAtPoint& frame, const StructureProfile& sp) {
  const Mat d = deta_at(frame, sp);
  const TensorPack tp = structure_at(frame, sp);
  // g(A, phi B) in frame coordinates
  return (d - tp.omega).cwiseAbs().maxCoeff();
}

CompatibilityResiduals compatibility(const FrameAtPoint& frame, const StructureProfile& sp) {
  const FrameContext& ctx = *frame.ctx;
  const CoefficientSet<double> cs = realize_at(frame, sp);
  const int n = frame.size();
  CompatibilityResiduals res{};
  std::vector<Tangent> f(n), jf(n);
  for (int i = 0; i < n; ++i) {
    f[i] = padded(ctx, eval_field(frame.fields[i], frame.w));
    jf[i] = apply_structure(frame, sp, cs, f[i]);
  }
  if (frame.kind == FrameKind::FullW) {
    for (int i = 0; i < n; ++i) {
      res.j_square = std::max(res.j_square, tangent_norm(axpy(1.0, f[i], apply_j(ctx, cs, jf[i]))));
      for (int j = 0; j < n; ++j)
        res.hermitian = std::max(res.hermitian, std::abs(metric(ctx, cs, jf[i], jf[j]) - metric(ctx, cs, f[i], f[j])));
    }
    return res;
  }
  require_sphere(frame, sp);
  const std::vector<double> w = to_std(frame.w);
  const Tangent xi = padded(ctx, eval_field(reeb_field(ctx, sp), frame.w));
  res.eta_xi = std::abs(eta(ctx, cs, w, sp.radius, xi) - 1.0);
  for (int i = 0; i < n; ++i) {
    const double ei = eta(ctx, cs, w, sp.radius, f[i]);
    const Tangent pp = apply_phi(ctx, cs, w, sp.radius, jf[i]);
    res.phi_square = std::max(res.phi_square, tangent_norm(axpy(-ei, xi, axpy(1.0, f[i], pp))));
    for (int j = 0; j < n; ++j) {
      const double ej = eta(ctx, cs, w, sp.radius, f[j]);
      res.metric = std::max(res.metric, std::abs(metric(ctx, cs, jf[i], jf[j]) - metric(ctx, cs, f[i], f[j]) + ei * ej));
    }
  }
  return res;
}

Mat lie_derivative_metric(const FrameAtPoint& frame, const StructureProfile& sp, bool standard_xi) {
  require_sphere(frame, sp);
  const FrameContext& ctx = *frame.ctx;
  const int n = frame.size();
  const std::vector<Field> fields = padded_fields(frame);
  const Field xi = standard_xi ? standard_xi_field(ctx, sp.radius) : reeb_field(ctx, sp);
  const CoefficientSet<double> cs = realize_at(frame, sp);
  const Tangent xv = eval_field(xi, frame.w);
  std::vector<Tangent> f(n), br(n);
  for (int i = 0; i < n; ++i) {
    f[i] = eval_field(fields[i], frame.w);
    br[i] = field_bracket(ctx, xi, fields[i], frame.w);
  }
  Mat l(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const Field& fi = fields[i];
      const Field& fj = fields[j];
      const ScalarField gij = [&ctx, &sp, fi, fj](const std::vector<Jet>& x) {
        const CoefficientSet<Jet> c = sp.realize<Jet>(ctx.roots(), x);
        return metric(ctx, c, fi(x), fj(x));
      };
      const double dg = derive_scalar(gij, frame.w, u_of(xv), DerivMode::Analytic);
      l(i, j) = dg - metric(ctx, cs, br[i], f[j]) - metric(ctx, cs, f[i], br[j]);
    }
  return l;
}

NijenhuisReport nijenhuis_at(const FrameAtPoint& frame, const StructureProfile& sp, DerivMode mode) {
  if (frame.kind != FrameKind::FullW) throw Error("Nijenhuis torsion is evaluated on full-W frames");
  const FrameContext& ctx = *frame.ctx;
  const int n = frame.size();
  const int r = ctx.rank();
  const CoefficientSet<double> cs = realize_at(frame, sp);
  std::vector<Field> jf(n);
  for (int i = 0; i < n; ++i) jf[i] = j_field(ctx, sp, frame.fields[i]);
  NijenhuisReport rep;
  rep.components = Mat::Zero(r, ctx.root_dim());
  auto tensor = [&](int i, int j) {
    const Tangent ab = field_bracket(ctx, frame.fields[i], frame.fields[j], frame.w, mode);
    const Tangent jab = field_bracket(ctx, jf[i], frame.fields[j], frame.w, mode);
    const Tangent ajb = field_bracket(ctx, frame.fields[i], jf[j], frame.w, mode);
    const Tangent jajb = field_bracket(ctx, jf[i], jf[j], frame.w, mode);
    Tangent out = ab;
    out = axpy(1.0, apply_j(ctx, cs, jab), out);
    out = axpy(1.0, apply_j(ctx, cs, ajb), out);
    return axpy(-1.0, jajb, out);
  };
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) rep.max_norm = std::max(rep.max_norm, tangent_norm(tensor(i, j)));
  for (int j = 0; j < r; ++j)
    for (int s = 0; s < ctx.root_dim(); ++s) {
      const int root = ctx.root_of_slot(s);
      const Tangent nv = tensor(j, 2 * r + s);
      const double comp = nv.m[ctx.zeta_index(s)];
      rep.components(j, s) = comp;
      const double lam = cs.lambda[root];
      const double q = cs.q[root];
      const bool fixed = !sp.q_overrides.empty() && sp.q_overrides[root].has_value();
      const double dq = fixed ? 0.0 : sp.q.derivative(lam);
      const double closed = ctx.roots().positive_roots[root].lambda_r[j] / (q * q) * (1.0 - q * q - dq);
      rep.closed_form_gap = std::max(rep.closed_form_gap, std::abs(comp - closed));
      rep.closed_form_max = std::max(rep.closed_form_max, std::abs(closed));
    }
  return rep;
}

Mat h_tensor(const FrameAtPoint& frame, const StructureProfile& sp) {
  require_sphere(frame, sp);
  const FrameContext& ctx = *frame.ctx;
  const int n = frame.size();
  const std::vector<Field> fields = padded_fields(frame);
  const Field xi = reeb_field(ctx, sp);
  const CoefficientSet<double> cs = realize_at(frame, sp);
  const std::vector<double> w = to_std(frame.w);
  Mat h(n, n);
  for (int i = 0; i < n; ++i) {
    const Tangent a = field_bracket(ctx, xi, phi_field(ctx, sp, fields[i]), frame.w);
    const Tangent b = apply_phi(ctx, cs, w, sp.radius, field_bracket(ctx, xi, fields[i], frame.w));
    h.col(i) = frame.coordinates(scaled(0.5, axpy(-1.0, b, a)));
  }
  return h;
}

NormalityReport normality_tensor_at(const FrameAtPoint& frame, const StructureProfile& sp) {
  require_sphere(frame, sp);
  const FrameContext& ctx = *frame.ctx;
  const int n = frame.size();
  const int r = ctx.rank();
  const std::vector<Field> fields = padded_fields(frame);
  const CoefficientSet<double> cs = realize_at(frame, sp);
  const std::vector<double> w = to_std(frame.w);
  const Mat d = deta_at(frame, sp);
  const Tangent xi = eval_field(reeb_field(ctx, sp), frame.w);
  std::vector<Field> pf(n);
  for (int i = 0; i < n; ++i) pf[i] = phi_field(ctx, sp, fields[i]);
  auto phi = [&](const Tangent& t) { return apply_phi(ctx, cs, w, sp.radius, t); };
  auto tensor = [&](int i, int j) {
    Tangent out = phi(phi(field_bracket(ctx, fields[i], fields[j], frame.w)));
    out = axpy(1.0, field_bracket(ctx, pf[i], pf[j], frame.w), out);
    out = axpy(-1.0, phi(field_bracket(ctx, pf[i], fields[j], frame.w)), out);
    out = axpy(-1.0, phi(field_bracket(ctx, fields[i], pf[j], frame.w)), out);
    return axpy(2.0 * d(i, j), xi, out);
  };
  NormalityReport rep;
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) rep.max_norm = std::max(rep.max_norm, tangent_norm(tensor(i, j)));
  // frame slot 0 is xi^S, a multiple of xi
  const int root_start = r >= 2 ? 1 + 2 * (r - 1) : 1;
  const double xi_scale = 1.0 / value_of(cs.a0);  // xi = xi^S / a0
  for (int s = 0; s < ctx.root_dim(); ++s) {
    const Tangent t = tensor(0, root_start + s);
    rep.xi_root.push_back(xi_scale * t.m[ctx.zeta_index(s)]);
  }
  if (r >= 2) {
    int k = 0;
    for (int j = 0; j < r; ++j) {
      if (j == frame.j0) continue;
      const Tangent t = scaled(xi_scale, tensor(0, 1 + k));
      const Vec p = SphereChart::y_field(frame.w, j, frame.j0);
      const Vec u = u_of(t);
      const double coef = u.dot(p) / p.squaredNorm();
      rep.xi_y.push_back(coef);
      double off = (u - coef * p).norm();
      for (double v : t.m) off = std::max(off, std::abs(v));
      rep.xi_y_off_direction = std::max(rep.xi_y_off_direction, off);
      ++k;
    }
  }
  return rep;
}

KoszulReport koszul_at(const FrameAtPoint& frame, const StructureProfile& sp) {
  require_sphere(frame, sp);
  const FrameContext& ctx = *frame.ctx;
  if (ctx.rank() != 1) throw Error("Koszul connection is supported on rank-one frames only");
  const int n = ctx.mbar_dim();
  const CoefficientSet<double> cs = realize_at(frame, sp);
  Vec gdiag(n);
  gdiag[0] = cs.a0 * cs.a0;
  for (int s = 0; s < ctx.root_dim(); ++s) {
    gdiag[ctx.xi_index(s)] = cs.a[ctx.root_of_slot(s)];
    gdiag[ctx.zeta_index(s)] = cs.b[ctx.root_of_slot(s)];
  }
  auto gm = [&](const Vec& x, const Vec& y) { return x.dot(gdiag.cwiseProduct(y)); };
  auto nabla = [&](const Vec& u, const Vec& v) {
    Vec out(n);
    const Vec uv = ctx.bracket(u, v);
    for (int z = 0; z < n; ++z) {
      const Vec ez = Vec::Unit(n, z);
      const double rhs = gm(uv, ez) + gm(ctx.bracket(ez, u), v) + gm(ctx.bracket(ez, v), u);
      out[z] = 0.5 * rhs / gdiag[z];
    }
    return out;
  };
  const Vec xi = Vec::Unit(n, 0) / cs.a0;
  KoszulReport rep;
  rep.nabla_xi.resize(n, n);
  for (int a = 0; a < n; ++a) rep.nabla_xi.col(a) = nabla(Vec::Unit(n, a), xi);
  for (int s = 0; s < ctx.root_dim(); ++s) rep.nabla_root.push_back(rep.nabla_xi(ctx.zeta_index(s), ctx.xi_index(s)));

  // frame coordinates coincide with mbar coordinates on a rank-one sphere frame
  const TensorPack tp = structure_at(frame, sp);
  const Mat h = h_tensor(frame, sp);
  const Mat target = -(tp.j_or_phi + tp.j_or_phi * h);
  rep.structure_residual = (rep.nabla_xi - target).cwiseAbs().maxCoeff();
  return rep;
}

double derivative_crosscheck(const FrameAtPoint& frame, const StructureProfile& sp) {
  const FrameContext& ctx = *frame.ctx;
  const std::vector<Field> fields = padded_fields(frame);
  double gap = 0.0;
  auto compare = [&](const Field& f, const Vec& dir) {
    const Tangent a = derive_field(f, frame.w, dir, DerivMode::Analytic);
    const Tangent b = derive_field(f, frame.w, dir, DerivMode::FiniteDifference);
    const double diff = tangent_norm(axpy(-1.0, b, a));
    gap = std::max(gap, diff / std::max(1.0, tangent_norm(a)));
  };
  for (int k = 0; k < ctx.rank(); ++k) {
    Vec dir = Vec::Unit(ctx.rank(), k);
    if (frame.kind == FrameKind::Sphere && ctx.rank() >= 2) {
      dir -= dir.dot(frame.w) / frame.w.squaredNorm() * frame.w;
      if (dir.norm() < 1e-12) continue;
    } else if (frame.kind == FrameKind::Sphere) {
      continue;
    }
    for (const Field& f : fields) {
      compare(f, dir);
      compare(structure_field(frame, sp, f), dir);
    }
  }
  return gap;
}

Mat ad_on_mbar(const FrameContext& ctx, const CMat& k) {
  const SymmetricPair& pair = ctx.pair();
  const Mat& mb = ctx.mbar_basis();
  Mat r(mb.cols(), mb.cols());
  for (int a = 0; a < mb.cols(); ++a) r.col(a) = mb.transpose() * pair.algebra.gram() * adjoint_action(pair, k, mb.col(a));
  return r;
}

}  // namespace symlab
