#pragma once
// JSON schemas for decompositions and verification reports, plus the
// on-disk decomposition cache.

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "symlab/symspace.hpp"
#include "symlab/verify.hpp"

namespace symlab {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

Json matrix_to_json(const Mat& m);
Mat matrix_from_json(const Json& j);
Json vector_to_json(const Vec& v);
Vec vector_from_json(const Json& j);

Json decomposition_to_json(const Decomposition& d);
/// Inverse of decomposition_to_json; structure constants and Gram are taken
/// verbatim, nothing is recomputed.
Decomposition decomposition_from_json(const Json& j);

Json report_to_json(const VerificationReport& r);
/// {"schema":1, "reports":[...], "summary":{...}} in the given order.
Json suite_to_json(const std::vector<VerificationReport>& reports);

/// SYMLAB_CACHE_DIR when set, otherwise nullopt.
std::optional<std::filesystem::path> cache_dir_from_env();

/// Load <dir>/<tag>-s<seed>-c<c>.json when present, otherwise decompose and
/// store it. An empty dir disables the cache.
Decomposition load_or_decompose(const std::string& tag, const DecomposeOptions& opt, double trace_coefficient,
                                const std::optional<std::filesystem::path>& dir);

}  // namespace symlab
