// symlab command-line driver.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "symlab/serialize.hpp"
#include "symlab/verify.hpp"

using namespace symlab;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitMismatch = 1;
constexpr int kExitUsage = 2;

struct UsageError : Error {
  using Error::Error;
};

struct RunConfig {
  std::string space;
  std::string theorem;
  std::string q = "tanh";
  std::string a0 = "contact";
  std::string alambda = "contact";
  std::string qroots;
  double radius = 1.0;
  double kappa = 1.0;
  double tol = 0.0;  // 0: pinned defaults
  double floor = 1e-3;
  double trace_coefficient = 0.0;
  int samples = 10;
  std::uint64_t seed = 1;
  std::string output;
  std::string cache_dir;
  std::string config;
  bool json = false;
  bool all = false;
  bool serial = false;
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

// key = value lines; '#' starts a comment.
std::map<std::string, std::pair<std::string, int>> read_config(const std::string& path,
                                                               const std::vector<std::string>& known) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file " + path);
  std::map<std::string, std::pair<std::string, int>> out;
  std::string line;
  for (int no = 1; std::getline(in, line); ++no) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw UsageError(path + ":" + std::to_string(no) + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (std::find(known.begin(), known.end(), key) == known.end())
      throw UsageError(path + ":" + std::to_string(no) + ": unknown key '" + key + "'");
    if (value.empty()) throw UsageError(path + ":" + std::to_string(no) + ": empty value for key '" + key + "'");
    out[key] = {value, no};
  }
  return out;
}

// Options shared by check/report/decompose, registered per subcommand.
struct Bindings {
  std::map<std::string, CLI::Option*> opts;

  void add(CLI::App* app, RunConfig& cfg, bool profile) {
    opts["space"] = app->add_option("--space", cfg.space, "Catalog tag, e.g. sphere3, cp2, su_so3");
    opts["seed"] = app->add_option("--seed", cfg.seed, "Seed for Cartan extension and sample grids");
    opts["trace_coefficient"] =
        app->add_option("--trace-coefficient", cfg.trace_coefficient, "Inner product scale c (default: catalog)")
            ->check(CLI::PositiveNumber);
    opts["cache_dir"] = app->add_option("--cache-dir", cfg.cache_dir, "Decomposition cache directory");
    opts["output"] = app->add_option("-o,--output", cfg.output, "Write JSON to this file");
    app->add_option("--config", cfg.config, "key = value config file; flags win");
    if (!profile) return;
    opts["q"] = app->add_option("--q", cfg.q, "q profile, e.g. tanh, id, sinh:2+lin:0.5");
    opts["a0"] = app->add_option("--a0", cfg.a0, "a0 recipe: contact or const:<k>");
    opts["alambda"] = app->add_option("--alambda", cfg.alambda, "a_lambda recipe: contact, ak or explicit:<v,...>");
    opts["qroots"] = app->add_option("--qroots", cfg.qroots, "Constant q per positive root, e.g. 3 or 1,-");
    opts["radius"] = app->add_option("--radius", cfg.radius, "Sphere radius r")->check(CLI::PositiveNumber);
    opts["kappa"] = app->add_option("--kappa", cfg.kappa, "Rank-one kappa")->check(CLI::PositiveNumber);
    opts["tol"] = app->add_option("--tol", cfg.tol, "Override every vanish tolerance")->check(CLI::PositiveNumber);
    opts["floor"] = app->add_option("--floor", cfg.floor, "Detection floor")->check(CLI::PositiveNumber);
    opts["samples"] = app->add_option("--samples", cfg.samples, "Samples per chart")->check(CLI::PositiveNumber);
  }

  // Config values fill options not given on the command line.
  void merge(RunConfig& cfg) const {
    if (cfg.config.empty()) return;
    std::vector<std::string> known;
    for (const auto& [k, _] : opts) known.push_back(k);
    for (const auto& [key, entry] : read_config(cfg.config, known)) {
      CLI::Option* o = opts.at(key);
      if (o->count() > 0) continue;
      try {
        o->add_result(entry.first);
        o->run_callback();
      } catch (const CLI::Error& e) {
        throw UsageError(cfg.config + ":" + std::to_string(entry.second) + ": bad value for key '" + key +
                         "': " + e.what());
      }
    }
  }
};

CheckOptions check_options(const RunConfig& cfg) {
  CheckOptions o;
  if (cfg.tol > 0.0) o.tol = cfg.tol;
  o.floor = cfg.floor;
  o.seed = cfg.seed;
  o.samples = cfg.samples;
  o.trace_coefficient = cfg.trace_coefficient;
  return o;
}

std::optional<std::filesystem::path> cache_dir(const RunConfig& cfg) {
  if (!cfg.cache_dir.empty()) return std::filesystem::path(cfg.cache_dir);
  return cache_dir_from_env();
}

DecompositionCache make_cache(const RunConfig& cfg) {
  const auto dir = cache_dir(cfg);
  if (!dir) return DecompositionCache{};
  return DecompositionCache([dir](const std::string& tag, const DecomposeOptions& opt, double c) {
    return load_or_decompose(tag, opt, c, dir);
  });
}

void emit_json(const Json& j, const RunConfig& cfg) {
  if (cfg.output.empty()) {
    std::cout << j.dump(2) << "\n";
    return;
  }
  std::ofstream out(cfg.output);
  if (!out) throw UsageError("cannot write " + cfg.output);
  out << j.dump(2) << "\n";
}

void print_report(std::ostream& os, const VerificationReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-48s %-24s %8.3fs\n", r.check_id.c_str(), verdict_name(r.verdict).c_str(),
                r.seconds);
  os << buf;
  for (const auto& [k, v] : r.parameters) os << "    " << k << " = " << v << "\n";
  for (const ReportEntry& e : r.entries) {
    std::snprintf(buf, sizeof buf, "    %-34s %12.4e %s %9.2e  %s\n", e.name.c_str(), e.value,
                  e.detect ? ">=" : "<=", e.threshold, e.met() ? "ok" : "MISMATCH");
    os << buf;
  }
  for (const auto& [k, v] : r.observations) {
    std::snprintf(buf, sizeof buf, "    %-34s %12.4e (observed)\n", k.c_str(), v);
    os << buf;
  }
  for (const std::string& d : r.discrepancies) os << "    note: " << d << "\n";
}

void print_summary_line(std::ostream& os, const VerificationReport& r) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-60s %-24s %8.3fs\n", r.check_id.c_str(), verdict_name(r.verdict).c_str(),
                r.seconds);
  os << buf;
}

StructureProfile profile_from(const RunConfig& cfg) {
  StructureProfile sp;
  sp.q = ScalarProfile::parse(cfg.q);
  sp.a0 = A0Recipe::parse(cfg.a0);
  sp.alambda = ALambdaRecipe::parse(cfg.alambda);
  sp.radius = cfg.radius;
  sp.q_overrides = StructureProfile::parse_overrides(cfg.qroots);
  return sp;
}

int run_catalog() {
  std::printf("%-10s %-28s %4s %6s %6s %6s  %s\n", "tag", "G/K", "rank", "dim_m", "dim_h", "roots",
              "multiplicities (m_eps, m_eps/2)");
  for (const std::string& tag : catalog_tags()) {
    const Decomposition d = decompose(tag);
    std::string mult = "-";
    if (d.roots.rank() == 1) {
      const auto [e, h] = rank_one_multiplicities(d.roots);
      mult = "(" + std::to_string(e) + ", " + std::to_string(h) + ")";
    } else {
      mult.clear();
      for (const RootRecord& r : d.roots.positive_roots) mult += (mult.empty() ? "" : ",") + std::to_string(r.multiplicity);
      mult = "[" + mult + "]";
    }
    std::printf("%-10s %-28s %4d %6d %6d %6zu  %s\n", tag.c_str(), d.pair.space.label.c_str(), d.roots.rank(),
                static_cast<int>(d.pair.m_basis.cols()), static_cast<int>(d.roots.centralizer_basis.cols()),
                d.roots.positive_roots.size(), mult.c_str());
  }
  return kExitOk;
}

int run_decompose(const RunConfig& cfg) {
  if (cfg.space.empty()) throw UsageError("decompose needs --space");
  DecomposeOptions opt;
  opt.seed = cfg.seed;
  const Decomposition d = load_or_decompose(cfg.space, opt, cfg.trace_coefficient, cache_dir(cfg));
  emit_json(decomposition_to_json(d), cfg);
  return kExitOk;
}

std::vector<double> parse_q_values(const std::string& s) {
  std::vector<double> out;
  for (const auto& v : StructureProfile::parse_overrides(s)) {
    if (!v) throw UsageError("rank1 needs a value for every root in --qroots");
    out.push_back(*v);
  }
  return out;
}

double a0_constant(const std::string& literal) {
  const A0Recipe r = A0Recipe::parse(literal.find(':') == std::string::npos && literal != "contact"
                                         ? "const:" + literal
                                         : literal);
  if (r.kind != A0Recipe::Kind::Const) throw UsageError("almost-kahler needs a constant a0, e.g. --a0 const:1");
  return r.kappa;
}

int run_check(const RunConfig& cfg) {
  const CheckOptions opt = check_options(cfg);
  DecompositionCache cache = make_cache(cfg);
  const std::string& t = cfg.theorem;
  if (t != "tables" && cfg.space.empty()) throw UsageError("check --theorem " + t + " needs --space");
  if (t != "tables") parse_space(cfg.space);

  VerificationReport rep;
  if (t == "tables")
    rep = check_catalog_tables(opt, cache);
  else if (t == "contact")
    rep = check_contact(cfg.space, profile_from(cfg), opt, cache);
  else if (t == "killing")
    rep = check_killing(cfg.space, profile_from(cfg), opt, cache);
  else if (t == "normality")
    rep = check_normality(cfg.space, profile_from(cfg), opt, cache);
  else if (t == "rank1")
    rep = check_rank1_classification(cfg.space, cfg.kappa, parse_q_values(cfg.qroots.empty() ? "1" : cfg.qroots),
                                     cfg.radius, opt, cache);
  else if (t == "almost-kahler")
    rep = check_almost_kahler(cfg.space, ScalarProfile::parse(cfg.q),
                              a0_constant(cfg.a0 == "contact" ? "const:1" : cfg.a0), opt, cache);
  else
    throw UsageError("unknown theorem '" + t + "'");

  if (cfg.json || !cfg.output.empty()) {
    emit_json({{"schema", kSchemaVersion}, {"report", report_to_json(rep)}}, cfg);
    if (!cfg.output.empty()) print_report(std::cout, rep);
  } else {
    print_report(std::cout, rep);
  }
  return rep.ok() ? kExitOk : kExitMismatch;
}

int run_report(const RunConfig& cfg) {
  if (!cfg.all) throw UsageError("report needs --all");
  const CheckOptions opt = check_options(cfg);
  DecompositionCache cache = make_cache(cfg);
  const auto t0 = std::chrono::steady_clock::now();
  const std::vector<VerificationReport> reports = run_checks(acceptance_suite(opt), cache, !cfg.serial);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  std::ostream& table = cfg.output.empty() ? std::cerr : std::cout;
  int mismatches = 0;
  for (const VerificationReport& r : reports) {
    print_summary_line(table, r);
    if (!r.ok()) {
      print_report(table, r);
      ++mismatches;
    }
  }
  table << reports.size() << " checks, " << mismatches << " mismatches, " << secs << " s\n";
  emit_json(suite_to_json(reports), cfg);
  return mismatches ? kExitMismatch : kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"symlab: contact and complex structures on tangent bundles of symmetric spaces"};
  app.require_subcommand(1);
  RunConfig cfg;

  CLI::App* catalog = app.add_subcommand("catalog", "List catalog spaces with multiplicity data");

  CLI::App* decompose_cmd = app.add_subcommand("decompose", "Emit the restricted-root decomposition as JSON");
  Bindings decompose_b;
  decompose_b.add(decompose_cmd, cfg, false);

  CLI::App* check = app.add_subcommand("check", "Run one theorem checker");
  Bindings check_b;
  check_b.opts["theorem"] =
      check->add_option("--theorem", cfg.theorem, "contact, killing, rank1, almost-kahler, normality, tables")
          ->check(CLI::IsMember({"contact", "killing", "rank1", "almost-kahler", "normality", "tables"}));
  check_b.add(check, cfg, true);
  check->add_flag("--json", cfg.json, "Print the JSON report instead of the table");

  CLI::App* report = app.add_subcommand("report", "Run the acceptance suite");
  Bindings report_b;
  report_b.add(report, cfg, true);
  report->add_flag("--all", cfg.all, "Run every check");
  report->add_flag("--serial", cfg.serial, "Run checks on one thread");

  try {
    app.parse(argc, argv);
    if (decompose_cmd->parsed()) decompose_b.merge(cfg);
    if (check->parsed()) {
      check_b.merge(cfg);
      if (cfg.theorem.empty()) throw UsageError("check needs --theorem");
    }
    if (report->parsed()) report_b.merge(cfg);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (catalog->parsed()) return run_catalog();
    if (decompose_cmd->parsed()) return run_decompose(cfg);
    if (check->parsed()) return run_check(cfg);
    return run_report(cfg);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}
