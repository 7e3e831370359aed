#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "walklab/ball.hpp"
#include "walklab/monotone.hpp"

namespace walklab {

inline constexpr const char* kVersion = "walklab 1.0.0";

std::uint64_t fnv1a(std::string_view bytes);
std::uint64_t fnv1a_file(const std::filesystem::path& path);
std::string hex64(std::uint64_t x);
/// 17 significant digits; the only float format used in CSV output.
std::string format_double(double x);

/// Keywords "z:phi", "z:lambda", "lamplighter:phi-upper",
/// "lamplighter:lambda-lower", or objects {"power_log": {"a","p","q"}},
/// {"table": path, "quantity": "phi"|"lambda", "side": "upper"|"lower",
/// "interp": "step"|"loglog"}, {"increasing_power_log": {"a","p","q"}}.
/// Table files are hashed into `inputs`. CONFIG_INVALID names `pointer`.
MonotoneFunction model_from_json(const nlohmann::json& spec, const std::string& pointer,
                                 std::map<std::string, std::string>* inputs = nullptr);

/// Parses every field without running anything. Throws CONFIG_INVALID whose
/// message starts with the JSON pointer of the offending field.
void validate_config(const nlohmann::json& config);

struct RunResult {
  int exit_code = 0;  // 0 clean, 2 soft flags
  std::vector<std::string> flags;
  std::vector<std::filesystem::path> outputs;
  nlohmann::json manifest;
};

/// Runs one experiment and writes its outputs plus manifest.json into
/// `out_dir`. `primary_name` renames the main output file.
RunResult run_experiment(const nlohmann::json& config, const std::filesystem::path& out_dir, int workers,
                         const std::string& primary_name = "");

/// Ball of the given radius, loaded from WALKLAB_CACHE_DIR when a cached copy
/// exists and stored there otherwise.
CayleyBall obtain_ball(const Group& group, int radius, bool need_index, std::size_t memory_cap_bytes);

struct ReportResult {
  std::filesystem::path report_csv;
  std::vector<std::filesystem::path> series;
  std::size_t rows = 0;
};

/// Tidy CSV (source, series, x, y, kind) over every known output in
/// `results_dir` and its subdirectories (earlier report/ folders skipped),
/// plus one x,y,kind file per series under report/series. Sources are paths
/// relative to `results_dir`.
/// MISSING_INPUT when the directory holds no known outputs.
ReportResult build_report(const std::filesystem::path& results_dir);

}  // namespace walklab
