#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include "doctest.h"
#include "json.hpp"

namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
};

Run run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + SYMLAB_CLI_PATH + " " + args + " 2>&1";
  FILE* p = popen(cmd.c_str(), "r");
  REQUIRE(p != nullptr);
  std::string out;
  char buf[4096];
  while (std::size_t n = std::fread(buf, 1, sizeof buf, p)) out.append(buf, n);
  const int status = pclose(p);
  return {WIFEXITED(status) ? WEXITSTATUS(status) : -1, out};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path tmp(const std::string& name) {
  const fs::path dir = fs::path(SYMLAB_TEST_TMP) / "cli";
  fs::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("catalog and decompose") {
  const Run c = run("catalog");
  CHECK(c.code == 0);
  CHECK(c.out.find("su_so3") != std::string::npos);
  CHECK(c.out.find("hp3") != std::string::npos);

  const Run d = run("decompose --space su_so3");
  REQUIRE(d.code == 0);
  const auto j = nlohmann::json::parse(d.out);
  CHECK(j.at("schema") == 1);
  CHECK(j.at("roots").at("positive_roots").size() == 3);
}

TEST_CASE("exit codes") {
  CHECK(run("check --theorem contact --space su_so3 --q tanh --radius 2").code == 0);
  CHECK(run("check --theorem contact --space sphere3 --q id --a0 const:1 --alambda explicit:1 --radius 1").code == 0);
  CHECK(run("check --theorem contact --space su_so3 --q tanh --floor 1e6").code == 1);
  CHECK(run("check --theorem contact --space su_so3 --tol 1e-300").code == 1);
  CHECK(run("check --theorem bogus --space su_so3").code == 2);
  CHECK(run("check --theorem contact --space nowhere").code == 2);
  CHECK(run("check --theorem contact --space cp2 --q sinh+").code == 2);
  CHECK(run("check --theorem contact --space cp2 --radius -1").code == 2);
  CHECK(run("").code == 2);
}

TEST_CASE("check --json emits a report") {
  const Run r = run("check --theorem almost-kahler --space cp2 --q coth --json");
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out).at("report");
  CHECK(j.at("parameters").at("extension") == "infeasible");
  CHECK(j.at("residuals").at("riccati").at("met") == true);
}

TEST_CASE("config files") {
  const fs::path cfg = tmp("good.cfg");
  std::ofstream(cfg) << "# contact setup\nspace = su_so3\nq = tanh\nradius = 0.5\nfloor = 1e6\n";
  // The config floor makes the perturbation check unreachable; the flag wins.
  CHECK(run("check --theorem contact --config " + cfg.string()).code == 1);
  CHECK(run("check --theorem contact --config " + cfg.string() + " --floor 1e-3").code == 0);

  const fs::path bad = tmp("bad.cfg");
  std::ofstream(bad) << "space = cp2\n\nfrobnicate = 3\n";
  const Run b = run("check --theorem contact --config " + bad.string());
  CHECK(b.code == 2);
  CHECK(b.out.find(bad.string() + ":3: unknown key 'frobnicate'") != std::string::npos);

  const fs::path val = tmp("value.cfg");
  std::ofstream(val) << "radius = wide\n";
  const Run v = run("check --theorem contact --space cp2 --config " + val.string());
  CHECK(v.code == 2);
  CHECK(v.out.find(val.string() + ":1:") != std::string::npos);
}

TEST_CASE("output file and cache directory") {
  const fs::path cache = tmp("cache");
  fs::remove_all(cache);
  const fs::path out = tmp("decomp.json");
  REQUIRE(run("decompose --space cp2 -o " + out.string(), "SYMLAB_CACHE_DIR=" + cache.string()).code == 0);
  CHECK(nlohmann::json::parse(slurp(out)).at("space") == "cp2");
  CHECK(fs::exists(cache));
  CHECK(!fs::is_empty(cache));
  const fs::path flag_cache = tmp("cache2");
  fs::remove_all(flag_cache);
  CHECK(run("check --theorem tables --cache-dir " + flag_cache.string()).code == 0);
  CHECK(!fs::is_empty(flag_cache));
}
