#include "symlab/serialize.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace symlab {
namespace {

Json cmat_to_json(const CMat& m) { return {{"re", matrix_to_json(m.re)}, {"im", matrix_to_json(m.im)}}; }

CMat cmat_from_json(const Json& j) { return {matrix_from_json(j.at("re")), matrix_from_json(j.at("im"))}; }

Json chamber_to_json(const ChamberData& c) {
  Json walls = Json::array();
  for (const Vec& v : c.wall_covectors) walls.push_back(vector_to_json(v));
  return {{"simple_roots", c.simple_roots},
          {"wall_covectors", walls},
          {"theta_max", c.theta_max},
          {"theta_start", c.theta_start},
          {"witness", vector_to_json(c.witness)}};
}

ChamberData chamber_from_json(const Json& j) {
  ChamberData c;
  c.simple_roots = j.at("simple_roots").get<std::vector<int>>();
  for (const Json& v : j.at("wall_covectors")) c.wall_covectors.push_back(vector_from_json(v));
  c.theta_max = j.at("theta_max").get<double>();
  c.theta_start = j.at("theta_start").get<double>();
  c.witness = vector_from_json(j.at("witness"));
  return c;
}

std::string cache_name(const std::string& tag, std::uint64_t seed, double c) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "-s%llu-c%a.json", static_cast<unsigned long long>(seed), c);
  return tag + buf;
}

}  // namespace

Json matrix_to_json(const Mat& m) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"data", rows}};
}

Mat matrix_from_json(const Json& j) {
  const auto rows = j.at("rows").get<Eigen::Index>();
  const auto cols = j.at("cols").get<Eigen::Index>();
  const Json& data = j.at("data");
  if (static_cast<Eigen::Index>(data.size()) != rows) throw Error("matrix row count mismatch");
  Mat m(rows, cols);
  for (Eigen::Index i = 0; i < rows; ++i) {
    if (static_cast<Eigen::Index>(data[i].size()) != cols) throw Error("matrix column count mismatch");
    for (Eigen::Index k = 0; k < cols; ++k) m(i, k) = data[i][k].get<double>();
  }
  return m;
}

Json vector_to_json(const Vec& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

Vec vector_from_json(const Json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vec>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Json decomposition_to_json(const Decomposition& d) {
  const SymmetricPair& p = d.pair;
  const AlgebraBasis& a = p.algebra;
  Json basis = Json::array();
  for (const CMat& b : a.basis()) basis.push_back(cmat_to_json(b));
  Json seeds = Json::array();
  for (const Vec& s : p.cartan_seeds) seeds.push_back(vector_to_json(s));

  Json roots = Json::array();
  for (const RootRecord& r : d.roots.positive_roots)
    roots.push_back({{"lambda_r", vector_to_json(r.lambda_r)},
                     {"multiplicity", r.multiplicity},
                     {"m_basis", matrix_to_json(r.m_basis)},
                     {"k_basis", matrix_to_json(r.k_basis)}});
  Json doubled = Json::array();
  for (const auto& [i, j] : d.roots.doubled) doubled.push_back({i, j});

  return {{"schema", kSchemaVersion},
          {"space", p.space.tag},
          {"label", p.space.label},
          {"algebra",
           {{"name", a.name()},
            {"n", a.n()},
            {"trace_coefficient", a.trace_coefficient()},
            {"basis", basis},
            {"gram", matrix_to_json(a.gram())},
            {"structure_constants", a.structure_constants()}}},
          {"pair",
           {{"involution_kind", p.involution_kind == InvolutionKind::DiagonalConjugation ? "diagonal" : "conjugation"},
            {"s_diag", vector_to_json(p.s_diag)},
            {"involution", matrix_to_json(p.involution)},
            {"k_basis", matrix_to_json(p.k_basis)},
            {"m_basis", matrix_to_json(p.m_basis)},
            {"cartan_seeds", seeds}}},
          {"roots",
           {{"rank", d.roots.rank()},
            {"cartan_basis", matrix_to_json(d.roots.cartan_basis)},
            {"centralizer_basis", matrix_to_json(d.roots.centralizer_basis)},
            {"positive_roots", roots},
            {"doubled", doubled},
            {"chamber", chamber_to_json(d.roots.chamber)}}}};
}

Decomposition decomposition_from_json(const Json& j) {
  if (j.value("schema", 0) != kSchemaVersion) throw Error("unsupported decomposition schema");
  const Json& ja = j.at("algebra");
  std::vector<CMat> basis;
  for (const Json& b : ja.at("basis")) basis.push_back(cmat_from_json(b));
  AlgebraBasis alg = AlgebraBasis::from_parts(ja.at("name").get<std::string>(), ja.at("n").get<int>(),
                                              ja.at("trace_coefficient").get<double>(), std::move(basis),
                                              matrix_from_json(ja.at("gram")),
                                              ja.at("structure_constants").get<std::vector<double>>());
  const Json& jp = j.at("pair");
  std::vector<Vec> seeds;
  for (const Json& s : jp.at("cartan_seeds")) seeds.push_back(vector_from_json(s));
  const std::string kind = jp.at("involution_kind").get<std::string>();
  if (kind != "diagonal" && kind != "conjugation") throw Error("unknown involution kind '" + kind + "'");
  SymmetricPair pair{parse_space(j.at("space").get<std::string>()),
                     std::move(alg),
                     kind == "diagonal" ? InvolutionKind::DiagonalConjugation : InvolutionKind::ComplexConjugation,
                     vector_from_json(jp.at("s_diag")),
                     matrix_from_json(jp.at("involution")),
                     matrix_from_json(jp.at("k_basis")),
                     matrix_from_json(jp.at("m_basis")),
                     std::move(seeds)};

  const Json& jr = j.at("roots");
  RestrictedRootData roots;
  roots.cartan_basis = matrix_from_json(jr.at("cartan_basis"));
  roots.centralizer_basis = matrix_from_json(jr.at("centralizer_basis"));
  for (const Json& r : jr.at("positive_roots")) {
    RootRecord rec;
    rec.lambda_r = vector_from_json(r.at("lambda_r"));
    rec.multiplicity = r.at("multiplicity").get<int>();
    rec.m_basis = matrix_from_json(r.at("m_basis"));
    rec.k_basis = matrix_from_json(r.at("k_basis"));
    roots.positive_roots.push_back(std::move(rec));
  }
  for (const Json& d : jr.at("doubled")) roots.doubled.emplace_back(d.at(0).get<int>(), d.at(1).get<int>());
  roots.chamber = chamber_from_json(jr.at("chamber"));
  return Decomposition{std::move(pair), std::move(roots)};
}

Json report_to_json(const VerificationReport& r) {
  Json residuals = Json::object();
  for (const ReportEntry& e : r.entries)
    residuals[e.name] = {{"value", e.value}, {"kind", e.detect ? "must_detect" : "must_vanish"},
                         {"threshold", e.threshold}, {"met", e.met()}};
  return {{"check_id", r.check_id},
          {"space_id", r.space_id},
          {"parameters", r.parameters},
          {"verdict", verdict_name(r.verdict)},
          {"residuals", residuals},
          {"observations", r.observations},
          {"discrepancies", r.discrepancies}};
}

Json suite_to_json(const std::vector<VerificationReport>& reports) {
  Json list = Json::array();
  int pass = 0, fail = 0, expected = 0;
  for (const VerificationReport& r : reports) {
    list.push_back(report_to_json(r));
    switch (r.verdict) {
      case Verdict::Pass: ++pass; break;
      case Verdict::Fail: ++fail; break;
      case Verdict::ExpectedFailConfirmed: ++expected; break;
    }
  }
  return {{"schema", kSchemaVersion},
          {"reports", list},
          {"summary",
           {{"total", reports.size()}, {"pass", pass}, {"fail", fail}, {"expected_fail_confirmed", expected}}}};
}

std::optional<std::filesystem::path> cache_dir_from_env() {
  const char* v = std::getenv("SYMLAB_CACHE_DIR");
  if (!v || !*v) return std::nullopt;
  return std::filesystem::path(v);
}

Decomposition load_or_decompose(const std::string& tag, const DecomposeOptions& opt, double trace_coefficient,
                                const std::optional<std::filesystem::path>& dir) {
  if (!dir || dir->empty()) return decompose(tag, opt, trace_coefficient);
  const std::filesystem::path file = *dir / cache_name(tag, opt.seed, trace_coefficient);
  if (std::ifstream in{file}) {
    try {
      return decomposition_from_json(Json::parse(in));
    } catch (const std::exception&) {
      // Stale or corrupt entry; rebuild below.
    }
  }
  Decomposition d = decompose(tag, opt, trace_coefficient);
  std::filesystem::create_directories(*dir);
  const std::filesystem::path tmp = file.string() + ".tmp";
  {
    std::ofstream out(tmp);
    if (!out) throw Error("cannot write cache file " + tmp.string());
    out << decomposition_to_json(d).dump();
  }
  std::filesystem::rename(tmp, file);
  return d;
}

}  // namespace symlab
