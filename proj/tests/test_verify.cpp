#include <cmath>
#include <set>

#include "doctest.h"
#include "symlab/serialize.hpp"
#include "symlab/verify.hpp"

using namespace symlab;

namespace {

DecompositionCache& shared_cache() {
  static DecompositionCache c;
  return c;
}

double value(const VerificationReport& r, const std::string& name) {
  const ReportEntry* e = r.find(name);
  REQUIRE_MESSAGE(e != nullptr, name);
  return e->value;
}

}  // namespace

TEST_CASE("verdict semantics") {
  VerificationReport r;
  r.vanish("a", 1e-12, 1e-9);
  r.finalize();
  CHECK(r.verdict == Verdict::Pass);

  VerificationReport e;
  e.detect("headline", 0.5, 1e-3);
  e.vanish("side", 0.0, 1e-9);
  e.finalize();
  CHECK(e.verdict == Verdict::ExpectedFailConfirmed);
  CHECK(e.ok());

  VerificationReport f;
  f.vanish("a", 1e-12, 1e-9);
  f.detect("b", 1e-6, 1e-3);
  f.finalize();
  CHECK(f.verdict == Verdict::Fail);

  VerificationReport n;
  n.vanish("a", std::nan(""), 1e-9);
  n.finalize();
  CHECK(n.verdict == Verdict::Fail);

  VerificationReport x;
  x.expect("c", 0.2, false, 1e-9, 1e-3);
  CHECK(x.entries.front().detect);
  CHECK(x.find("missing") == nullptr);
  CHECK(verdict_name(Verdict::ExpectedFailConfirmed) != verdict_name(Verdict::Pass));
}

TEST_CASE("contact checker on a rank-two space") {
  CheckOptions opt;
  for (double r : {0.5, 2.0}) {
    const VerificationReport rep = check_contact("su_so3", contact_profile("sinh", r), opt, shared_cache());
    CHECK(rep.verdict == Verdict::Pass);
    CHECK(value(rep, "contact_identity") <= 1e-9);
    CHECK(value(rep, "perturbed_alambda") >= 1e-3);
    CHECK(rep.observations.count("perturbed_alambda_absolute") == 1);
  }
}

TEST_CASE("standard and rectified structures on the unit tangent sphere bundle") {
  CheckOptions opt;
  const auto half = check_contact("sphere3", standard_profile(0.5), opt, shared_cache());
  CHECK(half.verdict == Verdict::Pass);
  for (double r : {1.0, 2.0}) {
    const auto s = check_contact("sphere3", standard_profile(r), opt, shared_cache());
    CHECK(s.verdict == Verdict::ExpectedFailConfirmed);
    CHECK(value(s, "contact_identity") >= 1e-3);
    const auto rect = check_contact("cp2", rectified_profile(r), opt, shared_cache());
    CHECK(rect.verdict == Verdict::Pass);
  }
}

TEST_CASE("a non-contact prediction is confirmed when a0 is off") {
  CheckOptions opt;
  StructureProfile sp = contact_profile("tanh", 1.0);
  sp.a0 = A0Recipe::parse("const:0.9");
  const auto rep = check_contact("su_so3", sp, opt, shared_cache());
  CHECK(rep.parameters.at("predicted") == "not-contact");
  CHECK(rep.verdict == Verdict::ExpectedFailConfirmed);
}

TEST_CASE("Killing checker") {
  CheckOptions opt;
  StructureProfile one = contact_profile("id", 1.0);
  one.a0 = A0Recipe::parse("const:1");
  one.q_overrides = {1.0};
  const auto s = check_killing("sphere3", one, opt, shared_cache());
  CHECK(s.verdict == Verdict::Pass);
  CHECK(value(s, "lie_derivative") <= 1e-9);

  const auto su = check_killing("su_so3", contact_profile("tanh", 1.0), opt, shared_cache());
  CHECK(su.verdict == Verdict::ExpectedFailConfirmed);
  CHECK(value(su, "component_y_p") <= 1e-8);

  // Standard structure: Killing on the unit sphere bundle only, never on CP^n.
  const auto s1 = check_killing("sphere3", contact_profile("tanh", 1.0), opt, shared_cache());
  CHECK(s1.parameters.at("standard") == "killing");
  const auto s2 = check_killing("sphere3", contact_profile("tanh", 2.0), opt, shared_cache());
  CHECK(s2.parameters.at("standard") == "not-killing");
  const auto c1 = check_killing("cp2", contact_profile("tanh", 1.0), opt, shared_cache());
  CHECK(c1.parameters.at("standard") == "not-killing");
  CHECK(s2.ok());
  CHECK(c1.ok());
}

TEST_CASE("rank-one classification") {
  CheckOptions opt;
  const auto sas = check_rank1_classification("cp2", 1.0, {1.0}, 1.0, opt, shared_cache());
  CHECK(sas.parameters.at("classification") == "sasakian");
  CHECK(sas.verdict == Verdict::Pass);
  const auto gen = check_rank1_classification("hp2", 0.5, {2.0, 1.5}, 2.0, opt, shared_cache());
  CHECK(gen.parameters.at("classification") == "contact");
  CHECK(gen.ok());
  CHECK(value(gen, "h_eigenvalues") <= 1e-8);
  CHECK(value(gen, "nabla_xi_structure") <= 1e-8);
  CHECK_THROWS_AS(check_rank1_classification("su_so3", 1.0, {1.0}, 1.0, opt, shared_cache()), Error);
}

TEST_CASE("almost-Kaehler checker") {
  CheckOptions opt;
  const auto t = check_almost_kahler("su_so3", ScalarProfile::parse("tanh"), 1.0, opt, shared_cache());
  CHECK(t.verdict == Verdict::Pass);
  CHECK(t.parameters.at("kahler") == "yes");
  CHECK(value(t, "omega_vs_dtheta") <= 1e-10);
  CHECK(value(t, "nijenhuis") <= 1e-8);

  const auto c = check_almost_kahler("cp2", ScalarProfile::parse("coth"), 1.0, opt, shared_cache());
  CHECK(c.ok());
  CHECK(c.parameters.at("riccati") == "yes");
  CHECK(c.parameters.at("extension") == "infeasible");
  CHECK(value(c, "riccati") <= 1e-12);

  for (const char* q : {"id", "sinh"}) {
    const auto r = check_almost_kahler("grass2_3", ScalarProfile::parse(q), 2.0, opt, shared_cache());
    CHECK(r.ok());
    CHECK(r.parameters.at("kahler") == "no");
    CHECK(value(r, "nijenhuis_closed_form") <= 1e-8);
    CHECK(value(r, "nijenhuis") >= 1e-3);
  }
}

TEST_CASE("normality grid booleans agree with the Killing checker") {
  CheckOptions opt;
  for (const char* tag : {"sphere3", "cp2", "su_so3"})
    for (double qv : {1.0, 2.0})
      for (double r : {0.5, 1.0}) {
        CAPTURE(tag);
        CAPTURE(qv);
        StructureProfile sp = contact_profile("id", r);
        const auto d = shared_cache().get(tag);
        sp.q_overrides.assign(d->roots.positive_roots.size(), qv);
        const auto n = check_normality(tag, sp, opt, shared_cache());
        CHECK(n.ok());
        CHECK(value(n, "boolean_disagreements") == 0.0);
        const bool expect = d->roots.rank() == 1 && qv == 1.0;
        CHECK(n.parameters.at("killing") == (expect ? "true" : "false"));
        CHECK(n.parameters.at("normal") == n.parameters.at("killing"));
        const auto k = check_killing(tag, sp, opt, shared_cache());
        CHECK(k.ok());
        CHECK((k.verdict == Verdict::Pass) == expect);
      }
}

TEST_CASE("catalog tables") {
  CheckOptions opt;
  const auto t = check_catalog_tables(opt, shared_cache());
  CHECK(t.verdict == Verdict::Pass);
  CHECK(t.parameters.at("table.cp3") == "1,4");
  CHECK(t.parameters.at("table.hp2") == "3,4");
  CHECK(t.parameters.at("table.sphere5") == "4,0");
  CHECK(value(t, "su_so3.alignment_deficit") <= 1e-8);
  CHECK(!t.discrepancies.empty());
}

TEST_CASE("tolerance overrides and an impossible tolerance") {
  CheckOptions strict;
  strict.tol = 0.0;
  const auto r = check_contact("su_so3", contact_profile("tanh", 1.0), strict, shared_cache());
  CHECK(r.verdict == Verdict::Fail);
  CheckOptions loose;
  loose.floor = 1e6;
  const auto s = check_contact("su_so3", contact_profile("tanh", 1.0), loose, shared_cache());
  CHECK(s.verdict == Verdict::Fail);
}

TEST_CASE("suite structure and determinism") {
  CheckOptions opt;
  const auto suite = acceptance_suite(opt);
  std::set<std::string> ids;
  for (const SuiteCheck& c : suite) {
    CHECK(!c.id.empty());
    ids.insert(c.id);
  }
  CHECK(ids.size() == suite.size());
  CHECK(ids.count("tables") == 1);

  std::vector<SuiteCheck> subset;
  for (const SuiteCheck& c : suite)
    if (c.id.rfind("almost-kahler/su_so3", 0) == 0 || c.id.rfind("normality/cp2", 0) == 0) subset.push_back(c);
  REQUIRE(subset.size() == 11);
  DecompositionCache a, b;
  const std::string serial = suite_to_json(run_checks(subset, a, false)).dump();
  const std::string parallel = suite_to_json(run_checks(subset, b, true)).dump();
  CHECK(serial == parallel);
  for (const auto& rep : run_checks(subset, a)) CHECK(rep.ok());
}

TEST_CASE("verdicts do not depend on the inner-product scale") {
  CheckOptions base, scaled;
  scaled.trace_coefficient = 2.0;
  DecompositionCache cache;
  const auto suite_a = acceptance_suite(base);
  const auto suite_b = acceptance_suite(scaled);
  for (std::size_t i = 0; i < suite_a.size(); ++i) {
    if (suite_a[i].id.rfind("contact/su_so3", 0) != 0 && suite_a[i].id.rfind("rank1/hp2", 0) != 0) continue;
    CAPTURE(suite_a[i].id);
    const auto ra = suite_a[i].run(cache);
    const auto rb = suite_b[i].run(cache);
    CHECK(ra.verdict == rb.verdict);
    CHECK(rb.ok());
  }
}
