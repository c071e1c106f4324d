#include <bit>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "doctest.h"
#include "symlab/frames.hpp"
#include "symlab/serialize.hpp"

using namespace symlab;
namespace fs = std::filesystem;

namespace {

std::uint64_t bits(double x) { return std::bit_cast<std::uint64_t>(x); }

fs::path fresh_dir(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("symlab-test-" + name + "-" + std::to_string(::getpid()));
  fs::remove_all(p);
  return p;
}

}  // namespace

TEST_CASE("matrix and vector round-trip") {
  Mat m(2, 3);
  m << 0.1, -1e-300, 1.0 / 3.0, 7e200, -0.0, std::nextafter(1.0, 2.0);
  const Mat back = matrix_from_json(Json::parse(matrix_to_json(m).dump()));
  for (Eigen::Index i = 0; i < m.size(); ++i) CHECK(bits(back.data()[i]) == bits(m.data()[i]));
  Vec v(3);
  v << 1.0 / 7.0, -2.5, 1e-17;
  CHECK(vector_from_json(vector_to_json(v)) == v);
  CHECK(matrix_from_json(matrix_to_json(Mat(0, 4))).cols() == 4);
  Json bad = matrix_to_json(m);
  bad["rows"] = 3;
  CHECK_THROWS_AS(matrix_from_json(bad), Error);
}

TEST_CASE("decomposition round-trip is exact") {
  for (const char* tag : {"su_so3", "hp2", "grass2_3", "rp3"}) {
    CAPTURE(tag);
    const Decomposition d = decompose(tag);
    const std::string first = decomposition_to_json(d).dump();
    const Decomposition back = decomposition_from_json(Json::parse(first));
    const auto& f0 = d.pair.algebra.structure_constants();
    const auto& f1 = back.pair.algebra.structure_constants();
    REQUIRE(f0.size() == f1.size());
    std::size_t ulps = 0;
    for (std::size_t i = 0; i < f0.size(); ++i) ulps += bits(f0[i]) != bits(f1[i]);
    CHECK(ulps == 0);
    CHECK(decomposition_to_json(back).dump() == first);
    CHECK(back.roots.rank() == d.roots.rank());
    CHECK(back.pair.space.tag == d.pair.space.tag);
    // The restored data drives the frame calculus unchanged.
    const FrameContext a(d.pair, d.roots), b(back.pair, back.roots);
    CHECK(a.bracket_tensor() == b.bracket_tensor());
  }
}

TEST_CASE("schema guard") {
  Json j = decomposition_to_json(decompose("sphere2"));
  j["schema"] = 99;
  CHECK_THROWS_AS(decomposition_from_json(j), Error);
  Json k = decomposition_to_json(decompose("sphere2"));
  k["pair"]["involution_kind"] = "other";
  CHECK_THROWS_AS(decomposition_from_json(k), Error);
}

TEST_CASE("report JSON") {
  VerificationReport r;
  r.check_id = "x";
  r.space_id = "cp2";
  r.parameters["q"] = "tanh";
  r.vanish("a", 1e-13, 1e-9);
  r.detect("b", 0.25, 1e-3);
  r.observations["o"] = 0.5;
  r.seconds = 12.0;
  r.finalize();
  const Json j = report_to_json(r);
  CHECK(j.at("verdict") == "pass");
  CHECK(j.at("residuals").at("b").at("kind") == "must_detect");
  CHECK(j.at("residuals").at("a").at("met") == true);
  CHECK(j.at("observations").at("o") == 0.5);
  CHECK(!j.contains("seconds"));
  const Json s = suite_to_json({r, r});
  CHECK(s.at("schema") == kSchemaVersion);
  CHECK(s.at("summary").at("total") == 2);
  CHECK(s.at("summary").at("pass") == 2);
}

TEST_CASE("on-disk decomposition cache") {
  const fs::path dir = fresh_dir("cache");
  const Decomposition a = load_or_decompose("cp2", {}, 0.0, dir);
  std::size_t files = 0;
  fs::path entry;
  for (const auto& e : fs::directory_iterator(dir)) {
    ++files;
    entry = e.path();
  }
  REQUIRE(files == 1);
  CHECK(entry.filename().string().rfind("cp2-s1-c", 0) == 0);
  const Decomposition b = load_or_decompose("cp2", {}, 0.0, dir);
  CHECK(decomposition_to_json(a).dump() == decomposition_to_json(b).dump());

  // A corrupt entry is rebuilt.
  std::ofstream(entry) << "{not json";
  const Decomposition c = load_or_decompose("cp2", {}, 0.0, dir);
  CHECK(decomposition_to_json(c).dump() == decomposition_to_json(a).dump());
  std::ifstream in(entry);
  CHECK(Json::parse(in).at("space") == "cp2");

  // Distinct scales use distinct files.
  (void)load_or_decompose("cp2", {}, 2.0, dir);
  files = 0;
  for (const auto& e : fs::directory_iterator(dir)) files += e.path().extension() == ".json";
  CHECK(files == 2);

  CHECK(load_or_decompose("cp2", {}, 0.0, std::nullopt).roots.rank() == 1);
  fs::remove_all(dir);
}

TEST_CASE("cache directory from the environment") {
  ::unsetenv("SYMLAB_CACHE_DIR");
  CHECK(!cache_dir_from_env());
  ::setenv("SYMLAB_CACHE_DIR", "/tmp/somewhere", 1);
  CHECK(cache_dir_from_env() == fs::path("/tmp/somewhere"));
  ::setenv("SYMLAB_CACHE_DIR", "", 1);
  CHECK(!cache_dir_from_env());
  ::unsetenv("SYMLAB_CACHE_DIR");
}
