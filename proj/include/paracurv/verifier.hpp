#pragma once

// Manifest ingestion, orchestration and report persistence behind the
// `paracurv` command-line tool.
//
// Manifest (schema "paracurv.manifest/1"):
//   manifold   {"builtin": {name, n}}
//            | {"custom": {coords, g, phi, xi, eta, box?, guard?, signature?}}
//            | {"embedded": {n, coords, immersion, box?, guard?}}
//   transform  {"alpha": a}                     optional D-homothety
//   sampling   {"seed", "count", "box"}         defaults 0, 200, [-0.8, 0.8]
//   tolerance  number                           default 1e-8
//   checks     ["all"] or group names           default ["all"]
//   overrides  {"metric_scale", "phi_perturb": {row, col, amount}}
//   expect     {constant or verdict name: value}
// A box is either one [lo, hi] pair applied to every coordinate or one pair
// per coordinate.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "paracurv/analysis.hpp"
#include "paracurv/geometry.hpp"

namespace paracurv {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr const char* kManifestSchema = "paracurv.manifest/1";
inline constexpr const char* kReportSchema = "paracurv.report/1";

struct Manifest {
  enum class Kind { builtin, custom, embedded };

  nlohmann::json raw;
  std::string digest;  // SHA-256 of the manifest bytes, hex

  Kind kind = Kind::builtin;
  std::string builtin_name;
  int n = 0;
  ExpressionTables tables;             // custom
  std::vector<std::string> immersion;  // embedded
  std::vector<Interval> chart_box;     // custom / embedded
  std::string guard;                   // custom / embedded, empty = none
  std::optional<Signature> signature;  // custom

  std::optional<double> alpha;
  std::uint64_t seed = 0;
  int count = 200;
  std::vector<Interval> sample_box;  // empty = structure box
  double tolerance = 1e-8;
  std::set<std::string> checks;
  StructureOverrides overrides;
  std::map<std::string, double> expect_constants;
  std::map<std::string, bool> expect_verdicts;
};

/// ManifestError (naming the JSON field) for anything malformed, including
/// unparseable expressions and an asymmetric custom metric.
Manifest parse_manifest(std::string_view text);
Manifest load_manifest(const std::filesystem::path& path);

/// Base structure, then overrides, then the D-homothety.
CharteredStructure build_structure(const Manifest& m);

struct RunOptions {
  std::optional<double> tolerance;
  std::optional<std::uint64_t> seed;
  bool timing = false;
};

struct RunResult {
  CheckReport report;
  std::string structure;
  int dim = 0;
  double tolerance = 0.0;
  double wall_seconds = 0.0;
};

RunResult run_manifest(const Manifest& m, const RunOptions& opt = {});

/// Byte-stable report text: sorted keys, doubles with 17 significant digits.
std::string report_json(const RunResult& r, const Manifest& m, const RunOptions& opt);
/// Report written when a run ends with an error; never marked pass.
std::string error_report_json(const std::string& kind, const std::string& message, const std::string& digest);

/// D-homothetic image of a manifest: custom tables are rewritten, builtin and
/// embedded manifests record the composed alpha. InvalidAlpha for alpha <= 0.
nlohmann::json transform_manifest(const Manifest& m, double alpha);

/// Human-readable curvature summary at one point.
std::string curvature_summary(const Manifest& m, std::span<const double> point, bool christoffel = false);

/// Stable serializer used for every file the tool writes.
std::string dump_stable(const nlohmann::json& j);
std::string sha256_hex(std::string_view bytes);

/// Parses "c1,...,cd"; ManifestError("--point", ...) on malformed input.
std::vector<double> parse_point(std::string_view text);

}  // namespace paracurv
