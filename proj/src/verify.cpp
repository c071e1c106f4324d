#include "symlab/verify.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <future>
#include <limits>
#include <numbers>
#include <thread>

namespace symlab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

double max_abs(const Mat& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

struct Setup {
  std::shared_ptr<const Decomposition> dec;
  std::unique_ptr<FrameContext> ctx;
  std::vector<Vec> samples;

  const RestrictedRootData& roots() const { return dec->roots; }
  int rank() const { return dec->roots.rank(); }
};

Setup setup(const std::string& space, double radius, const CheckOptions& opt, DecompositionCache& cache) {
  Setup s;
  s.dec = cache.get(space, opt.seed, opt.trace_coefficient);
  s.ctx = std::make_unique<FrameContext>(s.dec->pair, s.dec->roots);
  s.samples = SphereChart(s.dec->roots, radius).samples(opt.seed, opt.samples);
  return s;
}

std::vector<double> to_std(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

void record_profile(VerificationReport& rep, const StructureProfile& sp, const CheckOptions& opt) {
  rep.parameters["q"] = sp.q.literal();
  rep.parameters["a0"] = sp.a0.literal();
  rep.parameters["alambda"] = sp.alambda.literal();
  rep.parameters["radius"] = num(sp.radius);
  if (!sp.q_overrides.empty()) rep.parameters["qroots"] = StructureProfile::overrides_literal(sp.q_overrides);
  rep.parameters["seed"] = std::to_string(opt.seed);
}

bool all_q_one(const CoefficientSet<double>& cs) {
  for (double q : cs.q)
    if (std::abs(q - 1.0) > 1e-12) return false;
  return true;
}

// Single-term profile of the given kind with unit coefficient and parameter.
bool is_unit_term(const ScalarProfile& q, QKind kind) {
  return q.terms().size() == 1 && q.terms()[0].kind == kind && q.terms()[0].coef == 1.0 && q.terms()[0].c == 1.0;
}

template <class F>
VerificationReport timed(F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  VerificationReport rep = body();
  rep.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  rep.finalize();
  return rep;
}

// max |d eta(A,B) - g(A, phi B)| / (|A|_g |B|_g) over frame pairs.
double unit_scale_contact_residual(const FrameAtPoint& frame, const StructureProfile& sp) {
  const TensorPack pack = structure_at(frame, sp);
  const Mat m = deta_at(frame, sp) - pack.g * pack.j_or_phi;
  const Vec len = pack.g.diagonal().cwiseSqrt();
  return (m.array() / (len * len.transpose()).array()).abs().maxCoeff();
}

// Sphere-frame column index of Y_j and P_j (j != j0).
int y_index(int j, int j0) { return 1 + (j < j0 ? j : j - 1); }
int p_index(int j, int j0, int rank) { return rank + (j < j0 ? j : j - 1); }

}  // namespace

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Fail: return "fail";
    case Verdict::ExpectedFailConfirmed: return "expected-fail-confirmed";
  }
  return "?";
}

void VerificationReport::vanish(const std::string& name, double value, double tol) {
  entries.push_back({name, value, false, tol});
}

void VerificationReport::detect(const std::string& name, double value, double floor) {
  entries.push_back({name, value, true, floor});
}

void VerificationReport::expect(const std::string& name, double value, bool should_vanish, double tol,
                                double floor) {
  if (should_vanish)
    vanish(name, value, tol);
  else
    detect(name, value, floor);
}

void VerificationReport::finalize() {
  bool all_met = !entries.empty();
  for (const ReportEntry& e : entries)
    if (!std::isfinite(e.value) || !e.met()) all_met = false;
  if (!all_met)
    verdict = Verdict::Fail;
  else
    verdict = entries.front().detect ? Verdict::ExpectedFailConfirmed : Verdict::Pass;
}

const ReportEntry* VerificationReport::find(const std::string& name) const {
  for (const ReportEntry& e : entries)
    if (e.name == name) return &e;
  return nullptr;
}

std::shared_ptr<const Decomposition> DecompositionCache::get(const std::string& tag, std::uint64_t seed,
                                                             double trace_coefficient) {
  const std::string key = tag + "|" + std::to_string(seed) + "|" + num(trace_coefficient);
  std::lock_guard<std::mutex> lock(mu_);
  auto it = items_.find(key);
  if (it != items_.end()) return it->second;
  DecomposeOptions opt;
  opt.seed = seed;
  auto d = std::make_shared<const Decomposition>(loader_ ? loader_(tag, opt, trace_coefficient)
                                                          : decompose(tag, opt, trace_coefficient));
  items_.emplace(key, d);
  return d;
}

StructureProfile contact_profile(const std::string& q, double radius) {
  StructureProfile sp;
  sp.q = ScalarProfile::parse(q);
  sp.a0 = A0Recipe::parse("contact");
  sp.alambda = ALambdaRecipe::parse("contact");
  sp.radius = radius;
  return sp;
}

StructureProfile standard_profile(double radius) {
  StructureProfile sp;
  sp.q = ScalarProfile::parse("id");
  sp.a0 = A0Recipe::parse("const:1");
  sp.alambda = ALambdaRecipe::parse("explicit:1");
  sp.radius = radius;
  return sp;
}

StructureProfile rectified_profile(double radius) {
  StructureProfile sp = standard_profile(radius);
  sp.a0 = A0Recipe::parse("contact");
  sp.alambda.values = {1.0 / (4.0 * radius * radius)};
  return sp;
}

VerificationReport check_contact(const std::string& space, const StructureProfile& sp, const CheckOptions& opt,
                                 DecompositionCache& cache) {
  return timed([&] {
    VerificationReport rep;
    rep.check_id = "contact";
    rep.space_id = space;
    record_profile(rep, sp, opt);
    const Setup s = setup(space, sp.radius, opt, cache);
    const double r = sp.radius;
    const int nr = static_cast<int>(s.roots().positive_roots.size());

    bool predicted = true;
    double residual = 0.0, compat = 0.0;
    std::vector<CoefficientSet<double>> sets;
    for (const Vec& w : s.samples) {
      const auto cs = sp.realize<double>(s.roots(), to_std(w));
      if (s.rank() >= 2 && std::abs(cs.a0 - 1.0 / (2.0 * r)) > 1e-12 * cs.a0) predicted = false;
      for (int i = 0; i < nr; ++i) {
        const double target = cs.a0 * cs.lambda[i] / (2.0 * r * cs.q[i]);
        if (std::abs(cs.a[i] - target) > 1e-12 * target) predicted = false;
      }
      sets.push_back(cs);
      const FrameAtPoint frame = sphere_frame(*s.ctx, w, r);
      residual = std::max(residual, contact_residual(frame, sp));
      const CompatibilityResiduals c = compatibility(frame, sp);
      compat = std::max({compat, c.phi_square, c.metric, c.eta_xi});
    }
    rep.parameters["predicted"] = predicted ? "contact" : "not-contact";
    rep.expect("contact_identity", residual, predicted, opt.tol_or(1e-9), opt.floor);
    rep.vanish("compatibility", compat, opt.tol_or(1e-9));

    if (predicted) {
      // Pointwise explicit coefficients reproduce the identity exactly, so a
      // single scaled a_lambda isolates the perturbation.
      double weakest = kInf, weakest_abs = kInf;
      for (std::size_t k = 0; k < s.samples.size(); ++k) {
        const FrameAtPoint frame = sphere_frame(*s.ctx, s.samples[k], r);
        for (int i = 0; i < nr; ++i) {
          StructureProfile p = sp;
          p.alambda.kind = ALambdaRecipe::Kind::Explicit;
          p.alambda.values = sets[k].a;
          p.alambda.values[i] *= 1.1;
          p.q_overrides.assign(sets[k].q.begin(), sets[k].q.end());
          weakest = std::min(weakest, unit_scale_contact_residual(frame, p));
          weakest_abs = std::min(weakest_abs, contact_residual(frame, p));
        }
      }
      rep.detect("perturbed_alambda", weakest, opt.floor);
      rep.observations["perturbed_alambda_absolute"] = weakest_abs;
    }

    // Almost-Kaehler rule scaled by 1/(4 r^2) is the contact rule.
    StructureProfile ak = sp;
    ak.a0.kind = A0Recipe::Kind::Const;
    ak.a0.kappa = 1.0 / (2.0 * r);
    ak.alambda = ALambdaRecipe::parse("ak");
    double ak_res = 0.0;
    for (const Vec& w : s.samples) ak_res = std::max(ak_res, contact_residual(sphere_frame(*s.ctx, w, r), ak));
    rep.vanish("scaled_almost_kahler", ak_res, opt.tol_or(1e-9));
    return rep;
  });
}

VerificationReport check_killing(const std::string& space, const StructureProfile& sp, const CheckOptions& opt,
                                 DecompositionCache& cache) {
  return timed([&] {
    VerificationReport rep;
    rep.check_id = "killing";
    rep.space_id = space;
    record_profile(rep, sp, opt);
    const Setup s = setup(space, sp.radius, opt, cache);
    const double r = sp.radius;
    const int rank = s.rank();

    bool predicted = rank == 1;
    double lmax = 0.0, gap = 0.0;
    for (const Vec& w : s.samples) {
      const auto cs = sp.realize<double>(s.roots(), to_std(w));
      if (!all_q_one(cs)) predicted = false;
      const FrameAtPoint frame = sphere_frame(*s.ctx, w, r);
      const Mat l = lie_derivative_metric(frame, sp);
      lmax = std::max(lmax, max_abs(l));
      if (rank >= 2) {
        const int j0 = frame.j0;
        for (int j = 0; j < rank; ++j) {
          if (j == j0) continue;
          for (int k = 0; k < rank; ++k) {
            if (k == j0) continue;
            const double expected =
                cs.a0 / r * ((j == k ? w[j0] * w[j0] : 0.0) + w[j] * w[k]);
            gap = std::max(gap, std::abs(l(y_index(j, j0), p_index(k, j0, rank)) - expected));
          }
        }
      } else {
        const FrameContext& ctx = *s.ctx;
        for (int slot = 0; slot < ctx.root_dim(); ++slot) {
          const int i = ctx.root_of_slot(slot);
          const double lam = cs.lambda[i] / r;
          const double expected = lam * (cs.b[i] - cs.a[i]) / cs.a0;
          gap = std::max(gap, std::abs(l(1 + slot, 1 + ctx.root_dim() + slot) - expected));
        }
      }
    }
    rep.parameters["predicted"] = predicted ? "killing" : "not-killing";
    rep.expect("lie_derivative", lmax, predicted, opt.tol_or(1e-9), opt.floor);
    rep.vanish(rank >= 2 ? "component_y_p" : "component_xi_zeta", gap, opt.tol_or(1e-8));

    if (rank == 1) {
      // Standard vector field against the Sasaki metric restricted to T_r.
      const InducedMetric im = induced_standard_metric(s.roots(), r);
      const StructureProfile st = standard_profile(r);
      const auto cs = st.realize<double>(s.roots(), to_std(s.samples.front()));
      bool induced_killing = true;
      double consistency = 0.0;
      for (std::size_t i = 0; i < im.k_coef.size(); ++i) {
        consistency = std::max({consistency, std::abs(cs.b[i] - im.k_coef[i]), std::abs(cs.a[i] - im.m_coef[i])});
        if (std::abs(im.k_coef[i] - im.m_coef[i]) > 1e-12) induced_killing = false;
      }
      const Mat l = lie_derivative_metric(sphere_frame(*s.ctx, s.samples.front(), r), st, true);
      rep.parameters["standard"] = induced_killing ? "killing" : "not-killing";
      rep.vanish("induced_metric_consistency", consistency, opt.tol_or(1e-10));
      rep.expect("standard_lie_derivative", max_abs(l), induced_killing, opt.tol_or(1e-9), opt.floor);
    }
    return rep;
  });
}

VerificationReport check_rank1_classification(const std::string& space, double kappa,
                                              const std::vector<double>& q_values, double radius,
                                              const CheckOptions& opt, DecompositionCache& cache) {
  return timed([&] {
    VerificationReport rep;
    rep.check_id = "rank1";
    rep.space_id = space;
    const Setup s = setup(space, radius, opt, cache);
    if (s.rank() != 1) throw Error("rank-one classification needs a rank-one space, " + space + " has rank " +
                                   std::to_string(s.rank()));
    const int nr = static_cast<int>(s.roots().positive_roots.size());
    if (q_values.size() != 1 && static_cast<int>(q_values.size()) != nr)
      throw Error("expected 1 or " + std::to_string(nr) + " per-root q values");

    StructureProfile sp;
    sp.a0.kind = A0Recipe::Kind::Const;
    sp.a0.kappa = kappa;
    sp.alambda = ALambdaRecipe::parse("contact");
    sp.radius = radius;
    for (int i = 0; i < nr; ++i) sp.q_overrides.emplace_back(q_values.size() == 1 ? q_values[0] : q_values[i]);
    record_profile(rep, sp, opt);
    rep.parameters["kappa"] = num(kappa);

    const FrameContext& ctx = *s.ctx;
    const Vec& w = s.samples.front();
    const FrameAtPoint frame = sphere_frame(ctx, w, radius);
    const auto cs = sp.realize<double>(s.roots(), to_std(w));
    const bool kcontact = all_q_one(cs);
    rep.parameters["classification"] = kcontact ? "sasakian" : "contact";

    rep.vanish("contact_identity", contact_residual(frame, sp), opt.tol_or(1e-9));
    const CompatibilityResiduals c = compatibility(frame, sp);
    rep.vanish("compatibility", std::max({c.phi_square, c.metric, c.eta_xi}), opt.tol_or(1e-9));
    rep.expect("lie_derivative", max_abs(lie_derivative_metric(frame, sp)), kcontact, opt.tol_or(1e-9),
               opt.floor);

    const int R = ctx.root_dim();
    const Mat h = h_tensor(frame, sp);
    const Mat phi = structure_at(frame, sp).j_or_phi;
    const KoszulReport kz = koszul_at(frame, sp);
    double h_gap = 0.0, nabla_gap = 0.0, b_gap = 0.0;
    for (int slot = 0; slot < R; ++slot) {
      const int i = ctx.root_of_slot(slot);
      const double lam = cs.lambda[i] / radius;
      const double q = cs.q[i];
      const double ev = lam / (2.0 * kappa * q) * (q * q - 1.0);
      Vec col_xi = Vec::Zero(h.rows()), col_zeta = Vec::Zero(h.rows());
      col_xi[1 + slot] = ev;
      col_zeta[1 + R + slot] = -ev;
      h_gap = std::max({h_gap, (h.col(1 + slot) - col_xi).cwiseAbs().maxCoeff(),
                        (h.col(1 + R + slot) - col_zeta).cwiseAbs().maxCoeff()});
      nabla_gap = std::max(nabla_gap, std::abs(kz.nabla_root[slot] - (1.0 / q) * (1.0 + ev)));
    }
    for (int i = 0; i < nr; ++i) {
      const double lam = cs.lambda[i] / radius;
      b_gap = std::max(b_gap, std::abs(cs.b[i] - kappa * kappa * lam * lam / (4.0 * cs.a[i])));
    }
    rep.vanish("h_eigenvalues", h_gap, opt.tol_or(1e-8));
    rep.vanish("h_xi", h.col(0).cwiseAbs().maxCoeff(), opt.tol_or(1e-8));
    rep.vanish("h_anticommutes_phi", max_abs(h * phi + phi * h), opt.tol_or(1e-8));
    rep.vanish("nabla_xi_structure", kz.structure_residual, opt.tol_or(1e-8));
    rep.vanish("nabla_xi_roots", nabla_gap, opt.tol_or(1e-8));
    rep.vanish("b_lambda_relation", b_gap, opt.tol_or(1e-10));

    const NormalityReport nr_rep = normality_tensor_at(frame, sp);
    rep.expect("normality", nr_rep.max_norm, kcontact, opt.tol_or(1e-8), opt.floor);
    double n_gap = 0.0;
    for (int slot = 0; slot < R; ++slot) {
      const int i = ctx.root_of_slot(slot);
      const double lam = cs.lambda[i] / radius;
      const double q = cs.q[i];
      n_gap = std::max(n_gap, std::abs(nr_rep.xi_root[slot] - lam / (kappa * q * q) * (q * q - 1.0)));
    }
    rep.vanish("normality_xi_root", n_gap, opt.tol_or(1e-8));
    if (kcontact) {
      double coef_gap = std::abs(cs.a0 * cs.a0 - kappa * kappa);
      for (int i = 0; i < nr; ++i) coef_gap = std::max(coef_gap, std::abs(cs.a[i] - kappa * cs.lambda[i] / (2.0 * radius)));
      rep.vanish("sasakian_coefficients", coef_gap, opt.tol_or(1e-12));
    }
    return rep;
  });
}

VerificationReport check_almost_kahler(const std::string& space, const ScalarProfile& q, double a0,
                                       const CheckOptions& opt, DecompositionCache& cache) {
  return timed([&] {
    VerificationReport rep;
    rep.check_id = "almost-kahler";
    rep.space_id = space;
    StructureProfile sp;
    sp.q = q;
    sp.a0.kind = A0Recipe::Kind::Const;
    sp.a0.kappa = a0;
    sp.alambda = ALambdaRecipe::parse("ak");
    record_profile(rep, sp, opt);
    const Setup s = setup(space, 1.0, opt, cache);

    double omega_gap = 0.0, route_gap = 0.0, herm = 0.0, nij = 0.0, nij_gap = 0.0;
    for (const Vec& w : s.samples) {
      const FrameAtPoint frame = full_frame(*s.ctx, w);
      const TensorPack pack = structure_at(frame, sp);
      omega_gap = std::max(omega_gap, max_abs(pack.omega - 2.0 * a0 * a0 * pack.dtheta));
      route_gap = std::max(route_gap, max_abs(dtheta_at(frame) - dtheta_exterior_at(frame)));
      const CompatibilityResiduals c = compatibility(frame, sp);
      herm = std::max({herm, c.j_square, c.hermitian});
      const NijenhuisReport n = nijenhuis_at(frame, sp);
      nij = std::max(nij, n.max_norm);
      nij_gap = std::max(nij_gap, n.closed_form_gap);
    }
    rep.vanish("omega_vs_dtheta", omega_gap, opt.tol_or(1e-10));
    rep.vanish("dtheta_routes", route_gap, opt.tol_or(1e-10));
    rep.vanish("hermitian", herm, opt.tol_or(1e-10));
    rep.vanish("nijenhuis_closed_form", nij_gap, opt.tol_or(1e-8));

    const bool riccati = is_unit_term(q, QKind::Tanh) || is_unit_term(q, QKind::Coth);
    double ric = 0.0;
    for (int k = 0; k <= 99; ++k) ric = std::max(ric, std::abs(q.riccati_residual(0.05 + k * (5.0 - 0.05) / 99)));
    rep.expect("riccati", ric, riccati, opt.tol_or(1e-12), opt.floor);
    // Riccati is necessary for integrability; tanh is the integrable member.
    if (is_unit_term(q, QKind::Tanh))
      rep.vanish("nijenhuis", nij, opt.tol_or(1e-8));
    else if (riccati)
      rep.observations["nijenhuis_max"] = nij;
    else
      rep.detect("nijenhuis", nij, opt.floor);

    const LimitClass lc = q.limit_class();
    const bool extends = lc.kind == LimitKind::FinitePositive;
    rep.vanish("limit_class_numeric", lc.numeric_agrees ? 0.0 : 1.0, 0.0);
    if (extends)
      rep.vanish("limit_ratio", std::abs(lc.numeric_ratio - lc.value) / lc.value, 1e-4);
    else
      rep.detect("limit_ratio", lc.numeric_ratio, 1e4);
    rep.parameters["extension"] = extends ? "feasible" : "infeasible";
    rep.parameters["riccati"] = riccati ? "yes" : "no";
    rep.parameters["kahler"] = extends && is_unit_term(q, QKind::Tanh) ? "yes" : "no";
    return rep;
  });
}

VerificationReport check_normality(const std::string& space, const StructureProfile& sp, const CheckOptions& opt,
                                   DecompositionCache& cache) {
  return timed([&] {
    VerificationReport rep;
    rep.check_id = "normality";
    rep.space_id = space;
    record_profile(rep, sp, opt);
    const Setup s = setup(space, sp.radius, opt, cache);
    const double r = sp.radius;
    const double tol = opt.tol_or(1e-8);

    int disagreements = 0;
    double l_false = kInf, n_false = kInf;
    double component_gap = 0.0, off = 0.0;
    bool killing_all = true, normal_all = true, cond_all = true;
    for (const Vec& w : s.samples) {
      const auto cs = sp.realize<double>(s.roots(), to_std(w));
      const FrameAtPoint frame = sphere_frame(*s.ctx, w, r);
      const double l = max_abs(lie_derivative_metric(frame, sp));
      const NormalityReport n = normality_tensor_at(frame, sp);
      const bool killing = l <= tol;
      const bool normal = n.max_norm <= tol;
      const bool cond = s.rank() == 1 && all_q_one(cs);
      if (killing != normal || normal != cond) ++disagreements;
      killing_all = killing_all && killing;
      normal_all = normal_all && normal;
      cond_all = cond_all && cond;
      if (!killing) l_false = std::min(l_false, l);
      if (!normal) n_false = std::min(n_false, n.max_norm);
      if (s.rank() == 1) {
        for (int slot = 0; slot < s.ctx->root_dim(); ++slot) {
          const int i = s.ctx->root_of_slot(slot);
          const double lam = cs.lambda[i] / r;
          const double q = cs.q[i];
          component_gap =
              std::max(component_gap, std::abs(n.xi_root[slot] - lam / (cs.a0 * q * q) * (q * q - 1.0)));
        }
      } else {
        for (double v : n.xi_y) component_gap = std::max(component_gap, std::abs(v - 1.0 / (r * cs.a0)));
        off = std::max(off, n.xi_y_off_direction);
      }
    }
    rep.parameters["killing"] = killing_all ? "true" : "false";
    rep.parameters["normal"] = normal_all ? "true" : "false";
    rep.parameters["rank_one_q_one"] = cond_all ? "true" : "false";
    rep.vanish("boolean_disagreements", disagreements, 0.0);
    if (l_false < kInf) rep.detect("killing_separation", l_false, opt.floor);
    if (n_false < kInf) rep.detect("normality_separation", n_false, opt.floor);
    rep.vanish(s.rank() == 1 ? "normality_xi_root" : "normality_xi_y", component_gap, opt.tol_or(1e-8));
    if (s.rank() >= 2) rep.vanish("normality_xi_y_direction", off, opt.tol_or(1e-8));
    return rep;
  });
}

VerificationReport check_catalog_tables(const CheckOptions& opt, DecompositionCache& cache) {
  return timed([&] {
    VerificationReport rep;
    rep.check_id = "tables";
    rep.space_id = "catalog";
    rep.parameters["seed"] = std::to_string(opt.seed);

    struct Row {
      std::string tag;
      int eps, half;
    };
    std::vector<Row> rows;
    for (int n = 2; n <= 6; ++n) {
      rows.push_back({"sphere" + std::to_string(n), n - 1, 0});
      rows.push_back({"rp" + std::to_string(n), n - 1, 0});
    }
    for (int n = 2; n <= 4; ++n) rows.push_back({"cp" + std::to_string(n), 1, 2 * n - 2});
    for (int n = 1; n <= 3; ++n) rows.push_back({"hp" + std::to_string(n), 3, 4 * n - 4});
    std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.tag < b.tag; });
    for (const Row& row : rows) {
      const auto d = cache.get(row.tag, opt.seed, opt.trace_coefficient);
      const auto [eps, half] = rank_one_multiplicities(d->roots);
      rep.parameters["table." + row.tag] = std::to_string(eps) + "," + std::to_string(half);
      rep.vanish("multiplicity." + row.tag, std::abs(eps - row.eps) + std::abs(half - row.half), 0.0);
    }

    for (const std::string& tag : catalog_tags()) {
      const auto d = cache.get(tag, opt.seed, opt.trace_coefficient);
      rep.vanish("pairing." + tag, diagnose_roots(d->pair, d->roots).pairing, opt.tol_or(1e-8));
    }

    const auto d = cache.get("su_so3", opt.seed, opt.trace_coefficient);
    const RestrictedRootData& rr = d->roots;
    const AlgebraBasis& alg = d->pair.algebra;
    rep.vanish("su_so3.dim_m", std::abs(d->pair.m_basis.cols() - 5), 0.0);
    rep.vanish("su_so3.dim_h", rr.centralizer_basis.cols(), 0.0);
    int shape = std::abs(static_cast<int>(rr.positive_roots.size()) - 3);
    for (const RootRecord& root : rr.positive_roots) shape += std::abs(root.multiplicity - 1);
    rep.vanish("su_so3.roots", shape, 0.0);
    rep.vanish("su_so3.theta_max", std::abs(rr.chamber.theta_max - std::numbers::pi / 3.0), opt.tol_or(1e-9));

    // su(3) basis: A12 A23 C12 C13 C23 B12 B13 B23; C_jk pairs with B_jk.
    const int c_idx[3] = {2, 3, 4};
    const int b_idx[3] = {5, 6, 7};
    auto align = [&](const Vec& x, int idx) {
      Vec e = Vec::Zero(alg.dim());
      e[idx] = 1.0;
      return std::abs(alg.inner(x, e)) / (alg.norm(x) * alg.norm(e));
    };
    double worst = 1.0;
    std::vector<bool> used(3, false);
    for (const RootRecord& root : rr.positive_roots) {
      if (root.m_basis.cols() != 1) {
        worst = 0.0;
        continue;
      }
      int best = -1;
      double best_a = -1.0;
      for (int t = 0; t < 3; ++t) {
        const double a = align(root.m_basis.col(0), c_idx[t]);
        if (!used[t] && a > best_a) best_a = a, best = t;
      }
      used[best] = true;
      worst = std::min({worst, best_a, align(root.k_basis.col(0), b_idx[best])});
    }
    rep.vanish("su_so3.alignment_deficit", 1.0 - worst, opt.tol_or(1e-8));
    rep.discrepancies.push_back(
        "su_so3 sign note: on the chamber 0 < b < sqrt(3) a the positive root functionals are (sqrt3, 1), "
        "(sqrt3, -1) and (0, 2) in (X_1, X_2) coordinates; the forms -r(sqrt3 cos t + sin t) and -2r sin t "
        "are negative there and are not used.");
    return rep;
  });
}

std::vector<SuiteCheck> acceptance_suite(const CheckOptions& opt) {
  std::vector<SuiteCheck> out;
  auto add = [&](std::string id, std::function<VerificationReport(DecompositionCache&)> f) {
    out.push_back({id, [id, f](DecompositionCache& c) {
                     VerificationReport rep = f(c);
                     rep.check_id = id;
                     return rep;
                   }});
  };
  const double radii[3] = {0.5, 1.0, 2.0};

  add("tables", [opt](DecompositionCache& c) { return check_catalog_tables(opt, c); });

  for (const std::string& tag : catalog_tags()) {
    for (const char* q : {"id", "tanh", "sinh", "ln"})
      for (double r : radii)
        add("contact/" + tag + "/" + q + "/r=" + num(r),
            [opt, tag, q = std::string(q), r](DecompositionCache& c) {
              return check_contact(tag, contact_profile(q, r), opt, c);
            });
    for (double r : radii) {
      add("tashiro/" + tag + "/standard/r=" + num(r),
          [opt, tag, r](DecompositionCache& c) { return check_contact(tag, standard_profile(r), opt, c); });
      add("tashiro/" + tag + "/rectified/r=" + num(r),
          [opt, tag, r](DecompositionCache& c) { return check_contact(tag, rectified_profile(r), opt, c); });
    }
  }

  for (const char* tag : {"sphere2", "sphere3", "sphere4", "rp3", "cp2", "cp3", "hp1", "hp2"})
    for (double r : radii) {
      const std::string t = tag;
      add("killing/" + t + "/q=1/r=" + num(r), [opt, t, r](DecompositionCache& c) {
        StructureProfile sp = contact_profile("id", r);
        sp.a0 = A0Recipe::parse("const:1");
        const auto d = c.get(t, opt.seed, opt.trace_coefficient);
        sp.q_overrides.assign(d->roots.positive_roots.size(), 1.0);
        return check_killing(t, sp, opt, c);
      });
      add("killing/" + t + "/q=tanh/r=" + num(r),
          [opt, t, r](DecompositionCache& c) { return check_killing(t, contact_profile("tanh", r), opt, c); });
    }
  for (const char* tag : {"su_so3", "su_so4", "grass2_3"})
    for (const char* q : {"id", "tanh"}) {
      const std::string t = tag;
      add("killing/" + t + "/q=" + q + "/r=1", [opt, t, q = std::string(q)](DecompositionCache& c) {
        return check_killing(t, contact_profile(q, 1.0), opt, c);
      });
    }

  struct R1 {
    std::string tag;
    double kappa;
    std::vector<double> q;
  };
  const std::vector<R1> r1 = {{"cp2", 1.0, {1.0}},        {"sphere3", 2.0, {3.0}},     {"hp1", 1.0, {1.0}},
                              {"cp2", 2.0, {3.0, 0.5}},   {"hp2", 0.5, {2.0, 1.5}},    {"sphere5", 1.0, {1.0}},
                              {"rp4", 3.0, {0.25}},       {"cp3", 1.0, {1.0, 2.0}}};
  for (const R1& c1 : r1) {
    std::string qs;
    for (std::size_t i = 0; i < c1.q.size(); ++i) qs += (i ? "," : "") + num(c1.q[i]);
    for (double r : {1.0, 2.0})
      add("rank1/" + c1.tag + "/kappa=" + num(c1.kappa) + "/q=" + qs + "/r=" + num(r),
          [opt, c1, r](DecompositionCache& c) {
            return check_rank1_classification(c1.tag, c1.kappa, c1.q, r, opt, c);
          });
  }

  for (const char* tag : {"su_so3", "cp2", "grass2_3", "sphere3", "hp2", "su_so4"})
    for (const char* q : {"tanh", "id", "sinh", "ln", "exp", "coth", "sinh:2+lin:0.5"}) {
      const std::string t = tag;
      add("almost-kahler/" + t + "/" + q, [opt, t, q = std::string(q)](DecompositionCache& c) {
        return check_almost_kahler(t, ScalarProfile::parse(q), 1.0, opt, c);
      });
    }

  for (const char* tag : {"sphere3", "rp3", "cp2", "hp1", "hp2", "su_so3", "grass2_3"})
    for (double qv : {1.0, 2.0})
      for (double r : {0.5, 1.0}) {
        const std::string t = tag;
        add("normality/" + t + "/q=" + num(qv) + "/r=" + num(r), [opt, t, qv, r](DecompositionCache& c) {
          StructureProfile sp = contact_profile("id", r);
          const auto d = c.get(t, opt.seed, opt.trace_coefficient);
          sp.q_overrides.assign(d->roots.positive_roots.size(), qv);
          return check_normality(t, sp, opt, c);
        });
      }

  std::sort(out.begin(), out.end(), [](const SuiteCheck& a, const SuiteCheck& b) { return a.id < b.id; });
  return out;
}

std::vector<VerificationReport> run_checks(const std::vector<SuiteCheck>& checks, DecompositionCache& cache,
                                           bool parallel) {
  std::vector<VerificationReport> out;
  out.reserve(checks.size());
  if (!parallel) {
    for (const SuiteCheck& c : checks) out.push_back(c.run(cache));
  } else {
    std::vector<std::optional<VerificationReport>> slots(checks.size());
    std::atomic<std::size_t> next{0};
    const unsigned workers = std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(), 16));
    std::vector<std::future<void>> pool;
    for (unsigned t = 0; t < workers; ++t)
      pool.push_back(std::async(std::launch::async, [&] {
        for (std::size_t i = next++; i < checks.size(); i = next++) slots[i] = checks[i].run(cache);
      }));
    for (auto& f : pool) f.get();
    for (auto& s : slots) out.push_back(std::move(*s));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const VerificationReport& a, const VerificationReport& b) { return a.check_id < b.check_id; });
  return out;
}

}  // namespace symlab
