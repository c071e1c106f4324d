#pragma once
// Theorem checkers producing structured pass/fail reports.

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "symlab/frames.hpp"
#include "symlab/qcatalog.hpp"
#include "symlab/symspace.hpp"

namespace symlab {

enum class Verdict { Pass, Fail, ExpectedFailConfirmed };
std::string verdict_name(Verdict v);

/// A residual that must vanish (value <= threshold) or must be detected
/// (value >= threshold, the detection floor).
struct ReportEntry {
  std::string name;
  double value = 0.0;
  bool detect = false;
  double threshold = 0.0;
  bool met() const { return detect ? value >= threshold : value <= threshold; }
};

struct VerificationReport {
  std::string check_id;
  std::string space_id;
  std::map<std::string, std::string> parameters;
  std::vector<ReportEntry> entries;
  std::vector<std::string> discrepancies;
  /// Recorded values that carry no expectation.
  std::map<std::string, double> observations;
  Verdict verdict = Verdict::Fail;
  double seconds = 0.0;  // wall time, never serialized

  void vanish(const std::string& name, double value, double tol);
  void detect(const std::string& name, double value, double floor);
  /// Vanish when expected, detect otherwise.
  void expect(const std::string& name, double value, bool should_vanish, double tol, double floor);
  /// Fail on any unmet entry; otherwise expected-fail-confirmed when the
  /// first (headline) entry is a detection, pass when it must vanish.
  void finalize();
  const ReportEntry* find(const std::string& name) const;
  bool ok() const { return verdict != Verdict::Fail; }
};

struct CheckOptions {
  std::optional<double> tol;   // overrides every vanish tolerance when set
  double floor = 1e-3;
  std::uint64_t seed = 1;
  int samples = 10;
  double trace_coefficient = 0.0;  // <= 0: catalog default

  double tol_or(double pinned) const { return tol ? *tol : pinned; }
};

/// Shared decompositions keyed by (tag, seed, c); safe across threads.
class DecompositionCache {
 public:
  using Loader = std::function<Decomposition(const std::string&, const DecomposeOptions&, double)>;
  /// Without a loader, decompositions are computed in memory.
  explicit DecompositionCache(Loader loader = {}) : loader_(std::move(loader)) {}

  std::shared_ptr<const Decomposition> get(const std::string& tag, std::uint64_t seed = 1,
                                           double trace_coefficient = 0.0);

 private:
  Loader loader_;
  std::mutex mu_;
  std::map<std::string, std::shared_ptr<const Decomposition>> items_;
};

StructureProfile contact_profile(const std::string& q, double radius);
StructureProfile standard_profile(double radius);
/// xi = 2r xi^S, metric g^S / (4 r^2).
StructureProfile rectified_profile(double radius);

VerificationReport check_contact(const std::string& space, const StructureProfile& sp, const CheckOptions& opt,
                                 DecompositionCache& cache);
VerificationReport check_killing(const std::string& space, const StructureProfile& sp, const CheckOptions& opt,
                                 DecompositionCache& cache);
VerificationReport check_rank1_classification(const std::string& space, double kappa,
                                              const std::vector<double>& q_values, double radius,
                                              const CheckOptions& opt, DecompositionCache& cache);
VerificationReport check_almost_kahler(const std::string& space, const ScalarProfile& q, double a0,
                                       const CheckOptions& opt, DecompositionCache& cache);
VerificationReport check_normality(const std::string& space, const StructureProfile& sp, const CheckOptions& opt,
                                   DecompositionCache& cache);
VerificationReport check_catalog_tables(const CheckOptions& opt, DecompositionCache& cache);

struct SuiteCheck {
  std::string id;
  std::function<VerificationReport(DecompositionCache&)> run;
};

/// The full acceptance suite, ordered by check id.
std::vector<SuiteCheck> acceptance_suite(const CheckOptions& opt);
/// Run checks concurrently and return reports in check-id order.
std::vector<VerificationReport> run_checks(const std::vector<SuiteCheck>& checks, DecompositionCache& cache,
                                           bool parallel = true);

}  // namespace symlab
