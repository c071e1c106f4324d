#include "symlab/symspace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>
#include <regex>

namespace symlab {
namespace {

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

int parse_int(const std::string& s) { return std::stoi(s); }

void require(bool ok, const std::string& msg) {
  if (!ok) throw Error(msg);
}

// Orthonormal basis (columns) of the nullspace of a, threshold relative to the
// largest singular value.
Mat nullspace(const Mat& a, double rel_tol = 1e-9) {
  const int n = static_cast<int>(a.cols());
  if (a.rows() == 0) return Mat::Identity(n, n);
  Eigen::JacobiSVD<Mat> svd(a, Eigen::ComputeFullV);
  const Vec s = svd.singularValues();
  const double smax = s.size() > 0 ? s[0] : 0.0;
  const double thresh = rel_tol * std::max(1.0, smax);
  int rank = 0;
  for (int i = 0; i < s.size(); ++i)
    if (s[i] > thresh) ++rank;
  return svd.matrixV().rightCols(n - rank);
}

Mat columns(const std::vector<Vec>& v, int rows) {
  Mat m(rows, static_cast<Eigen::Index>(v.size()));
  for (std::size_t i = 0; i < v.size(); ++i) m.col(static_cast<Eigen::Index>(i)) = v[i];
  return m;
}

// Index of the basis element with the given (j,k) position in the catalog order.
int so_index(int n, int j, int k) {
  int idx = 0;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      if (a == j && b == k) return idx;
      ++idx;
    }
  throw Error("so index out of range");
}

int su_b_index(int n, int j, int k) {
  const int pairs = n * (n - 1) / 2;
  return (n - 1) + pairs + so_index(n, j, k);
}

Vec unit_vec(int d, int i) { return Vec::Unit(d, i); }

std::vector<Vec> seeds_for(const SpaceSpec& s, int dim) {
  std::vector<Vec> out;
  if (s.family == "sphere" || s.family == "rp") {
    out.push_back(unit_vec(dim, so_index(s.algebra_n, 0, 1)));
  } else if (s.family == "cp") {
    out.push_back(unit_vec(dim, su_b_index(s.algebra_n, 0, 1)));
  } else if (s.family == "hp") {
    // [[B_12, 0], [0, B_12]] sits after the n diagonal generators
    out.push_back(unit_vec(dim, s.algebra_n));
  } else if (s.family == "su_so") {
    for (int j = 0; j + 1 < s.algebra_n; ++j) out.push_back(unit_vec(dim, j));
  } else if (s.family == "grass") {
    for (int k = 0; k < s.p; ++k) out.push_back(unit_vec(dim, so_index(s.algebra_n, k, s.p + k)));
  }
  return out;
}

Vec diag_for(const SpaceSpec& s) {
  if (s.family == "hp") {
    const int m = s.algebra_n;
    Vec d = Vec::Ones(2 * m);
    d[0] = -1.0;
    d[m] = -1.0;
    return d;
  }
  Vec d = Vec::Ones(s.algebra_n);
  if (s.family == "grass") {
    d.head(s.p).setConstant(-1.0);
  } else {
    d[0] = -1.0;
  }
  return d;
}

SymmetricPair assemble_pair(const SpaceSpec& spec, double c) {
  SymmetricPair pair{spec, build_algebra(spec.algebra, spec.algebra_n, c), {}, {}, {}, {}, {}, {}};
  const AlgebraBasis& g = pair.algebra;
  const int d = g.dim();
  if (spec.family == "su_so") {
    pair.involution_kind = InvolutionKind::ComplexConjugation;
  } else {
    pair.involution_kind = InvolutionKind::DiagonalConjugation;
    pair.s_diag = diag_for(spec);
  }
  pair.involution.resize(d, d);
  for (int i = 0; i < d; ++i) {
    const Expansion e = g.expand(pair.apply_involution(g.basis()[i]));
    require(e.residual < 1e-10, "involution does not preserve the algebra");
    pair.involution.col(i) = e.coefficients;
  }
  const Mat id = Mat::Identity(d, d);
  pair.k_basis = orthonormalize(g, 0.5 * (id + pair.involution));
  pair.m_basis = orthonormalize(g, 0.5 * (id - pair.involution));
  require(pair.k_basis.cols() + pair.m_basis.cols() == d, "Cartan decomposition is not direct");
  pair.cartan_seeds = seeds_for(spec, d);
  return pair;
}

bool rank_one_family(const SpaceSpec& s) {
  return s.family == "sphere" || s.family == "rp" || s.family == "cp" || s.family == "hp";
}

// Largest root value on the unit seed at the given scale.
double rank_one_root_scale(const SymmetricPair& pair) {
  const AlgebraBasis& g = pair.algebra;
  Vec x = pair.cartan_seeds.front();
  x /= g.norm(x);
  const Mat ad = g.ad_matrix(x);
  const Mat& m = pair.m_basis;
  Mat t = -(m.transpose() * g.gram() * ad * ad * m);
  t = 0.5 * (t + t.transpose());
  Eigen::SelfAdjointEigenSolver<Mat> es(t);
  return std::sqrt(std::max(0.0, es.eigenvalues().maxCoeff()));
}

// Principal-axes orthonormalization of a set of commuting seeds.
std::vector<Vec> principal_axes(const AlgebraBasis& g, const std::vector<Vec>& seeds) {
  const int k = static_cast<int>(seeds.size());
  Mat s = columns(seeds, g.dim());
  const Mat gs = s.transpose() * g.gram() * s;
  const Mat off = gs - Mat(gs.diagonal().asDiagonal());
  std::vector<Vec> out;
  if (off.cwiseAbs().maxCoeff() < 1e-12) {
    for (int i = 0; i < k; ++i) out.push_back(s.col(i) / std::sqrt(gs(i, i)));
    return out;
  }
  Eigen::SelfAdjointEigenSolver<Mat> es(gs);
  for (int i = k - 1; i >= 0; --i) {
    const double ev = es.eigenvalues()[i];
    require(ev > 1e-12, "dependent Cartan seeds");
    Vec v = es.eigenvectors().col(i);
    for (int j = 0; j < k; ++j)
      if (std::abs(v[j]) > 1e-12) {
        if (v[j] < 0) v = -v;
        break;
      }
    out.push_back(s * v / std::sqrt(ev));
  }
  return out;
}

// Centralizer of span(gens) inside m, in m-coordinates.
Mat centralizer_in_m(const SymmetricPair& pair, const std::vector<Vec>& gens) {
  const AlgebraBasis& g = pair.algebra;
  const Mat& m = pair.m_basis;
  Mat stacked(static_cast<Eigen::Index>(gens.size()) * g.dim(), m.cols());
  for (std::size_t i = 0; i < gens.size(); ++i)
    stacked.middleRows(static_cast<Eigen::Index>(i) * g.dim(), g.dim()) = g.ad_matrix(gens[i]) * m;
  return nullspace(stacked);
}

std::vector<Vec> greedy_extend(const SymmetricPair& pair, std::vector<Vec> gens) {
  const AlgebraBasis& g = pair.algebra;
  const Mat& m = pair.m_basis;
  for (int guard = 0; guard < m.cols(); ++guard) {
    const Mat null = centralizer_in_m(pair, gens);
    if (null.cols() <= static_cast<Eigen::Index>(gens.size())) break;
    Mat cur(m.cols(), static_cast<Eigen::Index>(gens.size()));
    for (std::size_t i = 0; i < gens.size(); ++i)
      cur.col(static_cast<Eigen::Index>(i)) = m.transpose() * g.gram() * gens[i];
    int best = -1;
    double best_norm = 0.0;
    Vec best_v;
    for (int c = 0; c < null.cols(); ++c) {
      Vec v = null.col(c);
      v -= cur * (cur.transpose() * v);
      const double nv = v.norm();
      if (nv > best_norm + 1e-12) {
        best = c;
        best_norm = nv;
        best_v = v;
      }
    }
    if (best < 0 || best_norm < 1e-8) break;
    gens.push_back(m * (best_v / best_norm));
  }
  return gens;
}

bool commute_all(const AlgebraBasis& g, const std::vector<Vec>& v) {
  for (std::size_t i = 0; i < v.size(); ++i)
    for (std::size_t j = i + 1; j < v.size(); ++j)
      if (g.norm(g.bracket_sc(v[i], v[j])) > 1e-10) return false;
  return true;
}

bool lex_less(const Vec& a, const Vec& b) {
  for (int i = 0; i < a.size(); ++i) {
    if (a[i] < b[i] - 1e-12) return true;
    if (a[i] > b[i] + 1e-12) return false;
  }
  return false;
}

}  // namespace

SpaceSpec parse_space(const std::string& tag) {
  static const std::regex simple(R"((sphere|rp|cp|hp|su_so)(\d+))");
  static const std::regex grass(R"(grass(\d+)_(\d+))");
  std::smatch m;
  SpaceSpec s;
  s.tag = tag;
  if (std::regex_match(tag, m, grass)) {
    s.family = "grass";
    s.p = parse_int(m[1]);
    const int q = parse_int(m[2]);
    require(s.p >= 2 && q > s.p && s.p + q <= 8, "grass(p,q) needs 2 <= p < q, p+q <= 8: " + tag);
    s.n = q;
    s.algebra = "so";
    s.algebra_n = s.p + q;
    s.label = "SO(" + std::to_string(s.p + q) + ")/SO(" + std::to_string(s.p) + ")xSO(" +
              std::to_string(q) + ")";
    return s;
  }
  require(std::regex_match(tag, m, simple), "unknown space tag '" + tag + "'");
  s.family = m[1];
  s.n = parse_int(m[2]);
  const int n = s.n;
  if (s.family == "sphere" || s.family == "rp") {
    require(n >= 2 && n <= 8, "sphere/rp size must be in 2..8: " + tag);
    s.algebra = "so";
    s.algebra_n = n + 1;
    s.label = s.family == "sphere" ? "SO(" + std::to_string(n + 1) + ")/SO(" + std::to_string(n) + ")"
                                   : "SO(" + std::to_string(n + 1) + ")/O(" + std::to_string(n) + ")";
  } else if (s.family == "cp") {
    require(n >= 1 && n <= 5, "cp size must be in 1..5: " + tag);
    s.algebra = "su";
    s.algebra_n = n + 1;
    s.label = "SU(" + std::to_string(n + 1) + ")/S(U(1)xU(" + std::to_string(n) + "))";
  } else if (s.family == "hp") {
    require(n >= 1 && n <= 4, "hp size must be in 1..4: " + tag);
    s.algebra = "sp";
    s.algebra_n = n + 1;
    s.label = "Sp(" + std::to_string(n + 1) + ")/Sp(1)xSp(" + std::to_string(n) + ")";
  } else {
    require(n >= 3 && n <= 6, "su_so size must be in 3..6: " + tag);
    s.algebra = "su";
    s.algebra_n = n;
    s.label = "SU(" + std::to_string(n) + ")/SO(" + std::to_string(n) + ")";
  }
  return s;
}

std::vector<std::string> catalog_tags() {
  std::vector<std::string> t;
  for (int n = 2; n <= 6; ++n) t.push_back("sphere" + std::to_string(n));
  for (int n = 2; n <= 6; ++n) t.push_back("rp" + std::to_string(n));
  for (int n = 2; n <= 4; ++n) t.push_back("cp" + std::to_string(n));
  for (int n = 1; n <= 3; ++n) t.push_back("hp" + std::to_string(n));
  t.push_back("su_so3");
  t.push_back("su_so4");
  t.push_back("grass2_3");
  return t;
}

CMat SymmetricPair::apply_involution(const CMat& x) const {
  if (involution_kind == InvolutionKind::ComplexConjugation) return x.conjugate();
  CMat y = x;
  const Mat outer = s_diag * s_diag.transpose();
  y.re = y.re.cwiseProduct(outer);
  y.im = y.im.cwiseProduct(outer);
  return y;
}

Vec SymmetricPair::project_k(const Vec& x) const {
  return k_basis * (k_basis.transpose() * (algebra.gram() * x));
}

Vec SymmetricPair::project_m(const Vec& x) const {
  return m_basis * (m_basis.transpose() * (algebra.gram() * x));
}

SymmetricPair build_pair(const std::string& tag, double trace_coefficient) {
  const SpaceSpec spec = parse_space(tag);
  if (trace_coefficient > 0.0) return assemble_pair(spec, trace_coefficient);
  SymmetricPair base = assemble_pair(spec, 0.5);
  if (!rank_one_family(spec)) return base;
  const double e = rank_one_root_scale(base);
  const double c = 0.5 * e * e;
  if (std::abs(c - 0.5) < 1e-14) return base;
  return assemble_pair(spec, c);
}

PairDiagnostics diagnose_pair(const SymmetricPair& pair) {
  const AlgebraBasis& g = pair.algebra;
  PairDiagnostics d{};
  const int dim = g.dim();
  d.involution_square = (pair.involution * pair.involution - Mat::Identity(dim, dim)).cwiseAbs().maxCoeff();
  const Mat& k = pair.k_basis;
  const Mat& m = pair.m_basis;
  d.k_perp_m = (k.transpose() * g.gram() * m).cwiseAbs().maxCoeff();
  auto off = [&](const Vec& z, bool want_k) {
    const Vec r = want_k ? z - pair.project_k(z) : z - pair.project_m(z);
    return g.norm(r);
  };
  for (int i = 0; i < k.cols(); ++i) {
    for (int j = 0; j < k.cols(); ++j) d.kk_in_k = std::max(d.kk_in_k, off(g.bracket_sc(k.col(i), k.col(j)), true));
    for (int j = 0; j < m.cols(); ++j) d.km_in_m = std::max(d.km_in_m, off(g.bracket_sc(k.col(i), m.col(j)), false));
  }
  for (int i = 0; i < m.cols(); ++i)
    for (int j = 0; j < m.cols(); ++j) d.mm_in_k = std::max(d.mm_in_k, off(g.bracket_sc(m.col(i), m.col(j)), true));
  return d;
}

Mat cartan_subspace(const SymmetricPair& pair, std::uint64_t seed, int attempts) {
  const AlgebraBasis& g = pair.algebra;
  std::mt19937_64 rng(seed);
  for (int attempt = 0; attempt < attempts; ++attempt) {
    std::vector<Vec> gens;
    if (attempt == 0) {
      std::vector<Vec> seeds;
      for (const Vec& s : pair.cartan_seeds) seeds.push_back(pair.project_m(s));
      if (!seeds.empty() && commute_all(g, seeds)) gens = principal_axes(g, seeds);
    }
    if (gens.empty()) {
      Vec y(pair.m_basis.cols());
      for (int i = 0; i < y.size(); ++i) y[i] = uniform01(rng) - 0.5;
      Vec x = pair.m_basis * y;
      gens.push_back(x / g.norm(x));
    }
    gens = greedy_extend(pair, gens);
    const Mat cent = centralizer_in_m(pair, gens);
    if (cent.cols() == static_cast<Eigen::Index>(gens.size()) && commute_all(g, gens))
      return columns(gens, g.dim());
  }
  throw Error("Cartan subspace maximality certificate failed for " + pair.space.tag);
}

int RestrictedRootData::root_dim() const {
  int s = 0;
  for (const auto& r : positive_roots) s += r.multiplicity;
  return s;
}

Mat RestrictedRootData::mbar_basis() const {
  const int d = static_cast<int>(cartan_basis.rows());
  Mat b(d, mbar_dim());
  int c = 0;
  for (int j = 0; j < rank(); ++j) b.col(c++) = cartan_basis.col(j);
  for (const auto& r : positive_roots)
    for (int s = 0; s < r.multiplicity; ++s) b.col(c++) = r.m_basis.col(s);
  for (const auto& r : positive_roots)
    for (int s = 0; s < r.multiplicity; ++s) b.col(c++) = r.k_basis.col(s);
  return b;
}

std::vector<std::string> RestrictedRootData::mbar_labels() const {
  std::vector<std::string> out;
  for (int j = 0; j < rank(); ++j) out.push_back("X" + std::to_string(j + 1));
  for (std::size_t i = 0; i < positive_roots.size(); ++i)
    for (int s = 0; s < positive_roots[i].multiplicity; ++s)
      out.push_back("xi" + std::to_string(i + 1) + "." + std::to_string(s + 1));
  for (std::size_t i = 0; i < positive_roots.size(); ++i)
    for (int s = 0; s < positive_roots[i].multiplicity; ++s)
      out.push_back("zeta" + std::to_string(i + 1) + "." + std::to_string(s + 1));
  return out;
}

ChamberData chamber_geometry(const std::vector<RootRecord>& roots, int rank) {
  ChamberData ch;
  const int nr = static_cast<int>(roots.size());
  auto scale = [&](const Vec& v) { return std::max(1.0, v.norm()); };
  for (int i = 0; i < nr; ++i) {
    bool decomposable = false;
    for (int a = 0; a < nr && !decomposable; ++a)
      for (int b = a; b < nr && !decomposable; ++b)
        if ((roots[a].lambda_r + roots[b].lambda_r - roots[i].lambda_r).norm() <=
            1e-9 * scale(roots[i].lambda_r))
          decomposable = true;
    if (!decomposable) ch.simple_roots.push_back(i);
  }
  require(static_cast<int>(ch.simple_roots.size()) == rank,
          "simple roots do not match the rank (empty or degenerate chamber)");
  Mat s(rank, rank);
  for (int i = 0; i < rank; ++i) {
    ch.wall_covectors.push_back(roots[ch.simple_roots[i]].lambda_r);
    s.row(i) = roots[ch.simple_roots[i]].lambda_r.transpose();
  }
  Vec w = s.fullPivLu().solve(Vec::Ones(rank));
  w /= w.norm();
  for (const auto& r : roots) require(r.value(w) > 1e-12, "empty Weyl chamber");
  ch.witness = w;
  if (rank == 2) {
    Vec d[2];
    for (int i = 0; i < 2; ++i) {
      const Vec& a = ch.wall_covectors[i];
      const Vec& other = ch.wall_covectors[1 - i];
      Vec v(2);
      v << -a[1], a[0];
      v /= v.norm();
      if (other.dot(v) < 0) v = -v;
      d[i] = v;
    }
    ch.theta_max = std::acos(std::clamp(d[0].dot(d[1]), -1.0, 1.0));
    const double cross = d[0][0] * d[1][1] - d[0][1] * d[1][0];
    const Vec& first = cross > 0 ? d[0] : d[1];
    ch.theta_start = std::atan2(first[1], first[0]);
    if (std::abs(ch.theta_start) < 1e-15) ch.theta_start = 0.0;
  }
  return ch;
}

RestrictedRootData restricted_root_decomposition(const SymmetricPair& pair, const Mat& a_basis,
                                                 const DecomposeOptions& opt) {
  const AlgebraBasis& g = pair.algebra;
  const Mat& m = pair.m_basis;
  const Mat& gram = g.gram();
  const int r = static_cast<int>(a_basis.cols());
  std::mt19937_64 rng(opt.seed ^ 0x9e3779b97f4a7c15ULL);
  std::string last_error = "no attempts";

  std::vector<Mat> ad_x(r);
  for (int j = 0; j < r; ++j) ad_x[j] = g.ad_matrix(a_basis.col(j));

  for (int attempt = 0; attempt < opt.attempts; ++attempt) {
    Vec c(r);
    for (int j = 0; j < r; ++j) c[j] = 0.5 + uniform01(rng);
    const Vec w0 = a_basis * c;
    const Mat adw = g.ad_matrix(w0);
    Mat t = -(m.transpose() * gram * adw * adw * m);
    t = 0.5 * (t + t.transpose());
    Eigen::SelfAdjointEigenSolver<Mat> es(t);
    const Vec ev = es.eigenvalues();
    const double emax = std::max(ev.maxCoeff(), 1e-300);
    int zeros = 0;
    while (zeros < ev.size() && ev[zeros] <= 1e-9 * emax) ++zeros;
    if (zeros != r) {
      last_error = "reference point is not regular";
      continue;
    }
    std::vector<std::pair<int, int>> clusters;  // [begin, end)
    for (int i = zeros; i < ev.size();) {
      int j = i + 1;
      while (j < ev.size() && ev[j] - ev[j - 1] <= opt.cluster_tol * ev[j]) ++j;
      clusters.emplace_back(i, j);
      i = j;
    }
    bool ambiguous = false;
    for (std::size_t k = 1; k < clusters.size(); ++k) {
      const double lo = ev[clusters[k - 1].second - 1];
      const double hi = ev[clusters[k].first];
      if (hi - lo <= 100.0 * opt.cluster_tol * hi) ambiguous = true;
    }
    if (ambiguous) {
      last_error = "eigenvalue clusters are not separated";
      continue;
    }

    RestrictedRootData data;
    data.cartan_basis = a_basis;
    bool consistent = true;
    for (const auto& [b, e] : clusters) {
      RootRecord rec;
      rec.multiplicity = e - b;
      const double lam0 = std::sqrt(ev.segment(b, e - b).mean());
      rec.m_basis = m * es.eigenvectors().middleCols(b, e - b);
      rec.k_basis = -(1.0 / lam0) * (adw * rec.m_basis);
      rec.lambda_r.resize(r);
      for (int j = 0; j < r; ++j) {
        const Vec bx = ad_x[j] * rec.m_basis.col(0);
        rec.lambda_r[j] = -bx.dot(gram * rec.k_basis.col(0));
        for (int s = 1; s < rec.multiplicity; ++s) {
          const double v = -(ad_x[j] * rec.m_basis.col(s)).dot(gram * rec.k_basis.col(s));
          if (std::abs(v - rec.lambda_r[j]) > 1e-8 * std::max(1.0, std::abs(v))) consistent = false;
        }
      }
      if (std::abs(rec.lambda_r.dot(c) - lam0) > 1e-8 * std::max(1.0, lam0)) consistent = false;
      const double lmax = rec.lambda_r.cwiseAbs().maxCoeff();
      for (int i = 0; i < r; ++i)
        if (std::abs(rec.lambda_r[i]) <= 1e-12 * lmax) rec.lambda_r[i] = 0.0;
      for (int i = 0; i < r; ++i) {
        if (std::abs(rec.lambda_r[i]) <= 1e-9) {
          rec.lambda_r[i] = 0.0;
          continue;
        }
        if (rec.lambda_r[i] < 0) {
          rec.lambda_r = -rec.lambda_r;
          rec.k_basis = -rec.k_basis;
        }
        break;
      }
      data.positive_roots.push_back(std::move(rec));
    }
    if (!consistent) {
      last_error = "root covector differs across the root space";
      continue;
    }

    Mat stacked(static_cast<Eigen::Index>(r) * g.dim(), pair.k_basis.cols());
    for (int j = 0; j < r; ++j) stacked.middleRows(static_cast<Eigen::Index>(j) * g.dim(), g.dim()) = ad_x[j] * pair.k_basis;
    data.centralizer_basis = pair.k_basis * nullspace(stacked);

    ChamberData ch = chamber_geometry(data.positive_roots, r);
    std::vector<int> order(data.positive_roots.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      const double va = data.positive_roots[a].value(ch.witness);
      const double vb = data.positive_roots[b].value(ch.witness);
      if (std::abs(va - vb) > 1e-12 * std::max(1.0, std::abs(va))) return va < vb;
      return lex_less(data.positive_roots[a].lambda_r, data.positive_roots[b].lambda_r);
    });
    std::vector<RootRecord> sorted;
    for (int i : order) sorted.push_back(data.positive_roots[i]);
    data.positive_roots = std::move(sorted);
    data.chamber = chamber_geometry(data.positive_roots, r);

    const int nr = static_cast<int>(data.positive_roots.size());
    for (int i = 0; i < nr; ++i)
      for (int j = 0; j < nr; ++j) {
        const Vec& li = data.positive_roots[i].lambda_r;
        const Vec& lj = data.positive_roots[j].lambda_r;
        if (i != j && (lj - 2.0 * li).norm() <= 1e-9 * lj.norm()) data.doubled.emplace_back(i, j);
      }
    return data;
  }
  throw Error("restricted root decomposition failed for " + pair.space.tag + ": " + last_error);
}

Decomposition decompose(const std::string& tag, const DecomposeOptions& opt, double trace_coefficient) {
  SymmetricPair pair = build_pair(tag, trace_coefficient);
  const Mat a = cartan_subspace(pair, opt.seed, opt.attempts);
  RestrictedRootData roots = restricted_root_decomposition(pair, a, opt);
  return {std::move(pair), std::move(roots)};
}

RootDiagnostics diagnose_roots(const SymmetricPair& pair, const RestrictedRootData& roots) {
  const AlgebraBasis& g = pair.algebra;
  RootDiagnostics d{};
  d.min_witness_value = std::numeric_limits<double>::infinity();
  for (int j = 0; j < roots.rank(); ++j) {
    const Mat ad = g.ad_matrix(roots.cartan_basis.col(j));
    for (const auto& rt : roots.positive_roots) {
      const double l = rt.lambda_r[j];
      for (int s = 0; s < rt.multiplicity; ++s) {
        d.pairing = std::max(d.pairing, g.norm(ad * rt.m_basis.col(s) + l * rt.k_basis.col(s)));
        d.pairing = std::max(d.pairing, g.norm(ad * rt.k_basis.col(s) - l * rt.m_basis.col(s)));
      }
    }
    for (int h = 0; h < roots.centralizer_basis.cols(); ++h)
      d.h_commutes_a = std::max(d.h_commutes_a, g.norm(ad * roots.centralizer_basis.col(h)));
  }
  for (const auto& rt : roots.positive_roots) {
    const Mat z = rt.k_basis.transpose() * g.gram() * rt.k_basis;
    d.zeta_orthonormal = std::max(
        d.zeta_orthonormal, (z - Mat::Identity(rt.multiplicity, rt.multiplicity)).cwiseAbs().maxCoeff());
    d.min_witness_value = std::min(d.min_witness_value, rt.value(roots.chamber.witness));
  }
  const auto& pr = roots.positive_roots;
  for (std::size_t i = 0; i < pr.size(); ++i)
    for (std::size_t j = i + 1; j < pr.size(); ++j) {
      d.root_orthogonality = std::max(
          d.root_orthogonality, (pr[i].m_basis.transpose() * g.gram() * pr[j].m_basis).cwiseAbs().maxCoeff());
      d.root_orthogonality = std::max(
          d.root_orthogonality, (pr[i].k_basis.transpose() * g.gram() * pr[j].k_basis).cwiseAbs().maxCoeff());
    }
  const int dm = static_cast<int>(pair.m_basis.cols());
  const int dk = static_cast<int>(pair.k_basis.cols());
  d.completeness = std::abs(dm - roots.rank() - roots.root_dim()) +
                   std::abs(dk - static_cast<int>(roots.centralizer_basis.cols()) - roots.root_dim());
  return d;
}

std::pair<int, int> rank_one_multiplicities(const RestrictedRootData& roots) {
  require(roots.rank() == 1, "rank-one multiplicities requested on a higher-rank space");
  const auto& pr = roots.positive_roots;
  if (pr.size() == 1) return {pr[0].multiplicity, 0};
  require(pr.size() == 2 && roots.doubled.size() == 1, "unexpected rank-one root system");
  const auto [half, full] = roots.doubled.front();
  return {pr[full].multiplicity, pr[half].multiplicity};
}

SphereChart::SphereChart(const RestrictedRootData& roots, double radius)
    : radius_(radius), rank_(roots.rank()), chamber_(roots.chamber) {
  require(radius > 0.0, "radius must be positive");
  kind_ = rank_ == 1 ? ChartKind::RankOnePoint : rank_ == 2 ? ChartKind::RankTwoArc : ChartKind::Generic;
  Mat s(rank_, rank_);
  for (int i = 0; i < rank_; ++i) s.row(i) = chamber_.wall_covectors[i].transpose();
  const Mat inv = s.inverse();
  for (int i = 0; i < rank_; ++i) coweights_.push_back(inv.col(i));
}

Vec SphereChart::arc_point(double theta) const {
  require(rank_ == 2, "arc parametrization needs rank 2");
  Vec w(2);
  w << radius_ * std::cos(chamber_.theta_start + theta), radius_ * std::sin(chamber_.theta_start + theta);
  return w;
}

std::vector<Vec> SphereChart::samples(std::uint64_t seed, int count) const {
  std::vector<Vec> out;
  if (kind_ == ChartKind::RankOnePoint) {
    out.push_back(Vec::Constant(1, radius_));
    return out;
  }
  if (kind_ == ChartKind::RankTwoArc) {
    const double lo = 0.05, hi = chamber_.theta_max - 0.05;
    for (int k = 0; k < count; ++k)
      out.push_back(arc_point(count == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * k / (count - 1)));
    return out;
  }
  std::mt19937_64 rng(seed);
  for (int k = 0; k < count; ++k) {
    Vec w = Vec::Zero(rank_);
    for (int i = 0; i < rank_; ++i) w += (0.2 + 0.8 * uniform01(rng)) * coweights_[i];
    out.push_back(radius_ * w / w.norm());
  }
  return out;
}

int SphereChart::default_j0(const Vec& w) {
  int j0 = 0;
  w.cwiseAbs().maxCoeff(&j0);
  return j0;
}

Vec SphereChart::y_field(const Vec& w, int j, int j0) {
  Vec y = Vec::Zero(w.size());
  y[j0] += w[j];
  y[j] -= w[j0];
  return y;
}

Vec connection_u(const SymmetricPair& pair, const Vec& mu1, const Vec& mu2) {
  const AlgebraBasis& g = pair.algebra;
  const Mat& m = pair.m_basis;
  Vec u = Vec::Zero(g.dim());
  for (int c = 0; c < m.cols(); ++c) {
    const Vec e = m.col(c);
    const double v = g.inner(pair.project_m(g.bracket_sc(e, mu1)), mu2) +
                     g.inner(pair.project_m(g.bracket_sc(e, mu2)), mu1);
    u += 0.5 * v * e;
  }
  return u;
}

Vec connection_bilinear(const SymmetricPair& pair, const Vec& mu1, const Vec& mu2) {
  return 0.5 * pair.project_m(pair.algebra.bracket_sc(mu1, mu2)) + connection_u(pair, mu1, mu2);
}

Vec adjoint_action(const SymmetricPair& pair, const CMat& k, const Vec& x, double tol) {
  const CMat y = k * pair.algebra.to_matrix(x) * k.adjoint();
  const Expansion e = pair.algebra.expand(y);
  if (e.residual > tol * std::max(1.0, y.norm())) throw Error("Ad_k leaves the algebra: k is not in the group");
  return e.coefficients;
}

}  // namespace symlab
