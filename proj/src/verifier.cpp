#include "paracurv/verifier.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "paracurv/errors.hpp"
#include "paracurv/expr.hpp"

namespace paracurv {

using nlohmann::json;

namespace {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string index_path(const std::string& base, std::size_t i) { return base + "[" + std::to_string(i) + "]"; }

const json& require(const json& obj, const std::string& key, const std::string& path) {
  if (!obj.is_object() || !obj.contains(key)) throw ManifestError(path + "." + key, "missing required field");
  return obj.at(key);
}

double as_number(const json& v, const std::string& path) {
  if (!v.is_number()) throw ManifestError(path, "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ManifestError(path, "expected a finite number");
  return x;
}

int as_int(const json& v, const std::string& path, int min_value) {
  if (!v.is_number_integer()) throw ManifestError(path, "expected an integer");
  const auto x = v.get<long long>();
  if (x < min_value || x > 1'000'000'000) {
    throw ManifestError(path, "expected an integer >= " + std::to_string(min_value) + ", got " + std::to_string(x));
  }
  return static_cast<int>(x);
}

std::uint64_t as_seed(const json& v, const std::string& path) {
  if (v.is_number_unsigned()) return v.get<std::uint64_t>();
  if (v.is_number_integer()) {
    if (v.get<long long>() < 0) throw ManifestError(path, "seed must be non-negative");
    return static_cast<std::uint64_t>(v.get<long long>());
  }
  if (v.is_string()) {
    // Decimal string form for seeds beyond 2^53 in tools that read JSON
    // numbers as doubles.
    const std::string s = v.get<std::string>();
    std::uint64_t out = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc() || p != s.data() + s.size()) throw ManifestError(path, "not an unsigned 64-bit integer");
    return out;
  }
  throw ManifestError(path, "expected an unsigned integer");
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) throw ManifestError(path, "expected a string");
  return v.get<std::string>();
}

/// Expression entries may be strings or plain numbers.
std::string as_expression(const json& v, const std::string& path) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number()) return fmt17(as_number(v, path));
  throw ManifestError(path, "expected an expression string or number");
}

std::vector<std::string> expression_list(const json& v, const std::string& path, std::size_t expected) {
  if (!v.is_array()) throw ManifestError(path, "expected an array");
  if (v.size() != expected) {
    throw ManifestError(path, "expected " + std::to_string(expected) + " entries, got " + std::to_string(v.size()));
  }
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(as_expression(v[i], index_path(path, i)));
  return out;
}

std::vector<std::vector<std::string>> expression_matrix(const json& v, const std::string& path, std::size_t d) {
  if (!v.is_array()) throw ManifestError(path, "expected an array of rows");
  if (v.size() != d) {
    throw ManifestError(path, "row count " + std::to_string(v.size()) + " does not match dimension " +
                                  std::to_string(d));
  }
  std::vector<std::vector<std::string>> out;
  for (std::size_t i = 0; i < d; ++i) out.push_back(expression_list(v[i], index_path(path, i), d));
  return out;
}

std::vector<Interval> parse_box(const json& v, const std::string& path, std::size_t d) {
  auto pair = [&](const json& p, const std::string& where) {
    if (!p.is_array() || p.size() != 2) throw ManifestError(where, "expected [lo, hi]");
    Interval iv{as_number(p[0], where + "[0]"), as_number(p[1], where + "[1]")};
    if (!(iv.lo < iv.hi)) throw ManifestError(where, "empty interval");
    return iv;
  };
  if (!v.is_array() || v.empty()) throw ManifestError(path, "expected [lo, hi] or one pair per coordinate");
  if (v[0].is_number()) return std::vector<Interval>(d, pair(v, path));
  if (v.size() != d) {
    throw ManifestError(path, "expected " + std::to_string(d) + " intervals, got " + std::to_string(v.size()));
  }
  std::vector<Interval> out;
  for (std::size_t i = 0; i < d; ++i) out.push_back(pair(v[i], index_path(path, i)));
  return out;
}

std::vector<std::string> coordinate_list(const json& v, const std::string& path) {
  if (!v.is_array() || v.empty()) throw ManifestError(path, "expected a non-empty array of names");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    std::string name = as_string(v[i], index_path(path, i));
    const bool ident = !name.empty() && (std::isalpha(static_cast<unsigned char>(name[0])) || name[0] == '_') &&
                       std::all_of(name.begin(), name.end(), [](char c) {
                         return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
                       });
    if (!ident) throw ManifestError(index_path(path, i), "'" + name + "' is not an identifier");
    if (std::find(out.begin(), out.end(), name) != out.end()) {
      throw ManifestError(index_path(path, i), "duplicate coordinate '" + name + "'");
    }
    out.push_back(std::move(name));
  }
  return out;
}

/// Parses an expression and rethrows failures with the field path and span.
std::optional<ExprAst> checked_parse(const std::string& text, const std::vector<std::string>& coords,
                                     const std::string& path) {
  if (text.empty()) return std::nullopt;
  try {
    return parse(text, coords);
  } catch (const ParseError& e) {
    throw ManifestError(path, std::string(e.what()) + " in \"" + text + "\"");
  } catch (const UnknownCoordinate& e) {
    throw ManifestError(path, std::string(e.what()) + " in \"" + text + "\"");
  }
}

std::vector<double> box_centre(const std::vector<Interval>& box) {
  std::vector<double> c;
  for (const auto& iv : box) c.push_back(0.5 * (iv.lo + iv.hi));
  return c;
}

/// g[i][j] and g[j][i] must agree: same text, same tree, or the same values at
/// a few fixed points of the chart box.
void check_symmetric(const ExpressionTables& t, const std::vector<Interval>& box) {
  const std::size_t d = t.coords.size();
  std::vector<std::vector<double>> probes{box_centre(box)};
  for (double f : {0.21, 0.67, 0.93}) {
    std::vector<double> p;
    for (std::size_t k = 0; k < d; ++k) {
      const double frac = std::fmod(f * static_cast<double>(k + 1) * 1.618, 1.0);
      p.push_back(box[k].lo + frac * (box[k].hi - box[k].lo));
    }
    probes.push_back(std::move(p));
  }
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = i + 1; j < d; ++j) {
      const std::string path = "manifold.custom.g[" + std::to_string(j) + "][" + std::to_string(i) + "]";
      const auto& a = t.g[i][j];
      const auto& b = t.g[j][i];
      if (a == b) continue;
      auto ea = checked_parse(a, t.coords, "manifold.custom.g[" + std::to_string(i) + "][" + std::to_string(j) + "]");
      auto eb = checked_parse(b, t.coords, path);
      if (ea && eb && structurally_equal(*ea, *eb)) continue;
      for (const auto& p : probes) {
        double va = 0.0, vb = 0.0;
        try {
          va = ea ? evaluate(*ea, p) : 0.0;
          vb = eb ? evaluate(*eb, p) : 0.0;
        } catch (const DomainError&) {
          continue;
        }
        if (std::abs(va - vb) > 1e-12 * (1.0 + std::abs(va) + std::abs(vb))) {
          throw ManifestError(path, "metric is not symmetric: g[" + std::to_string(i) + "][" + std::to_string(j) +
                                        "] = " + fmt17(va) + " but g[" + std::to_string(j) + "][" +
                                        std::to_string(i) + "] = " + fmt17(vb));
        }
      }
    }
  }
}

std::function<double(std::span<const double>)> guard_function(const std::string& text,
                                                              const std::vector<std::string>& coords,
                                                              const std::string& path) {
  auto ast = checked_parse(text, coords, path);
  if (!ast) return {};
  return [ast = *ast](std::span<const double> p) {
    try {
      return evaluate(ast, p);
    } catch (const DomainError&) {
      return -1.0;
    }
  };
}

std::set<std::string> parse_checks(const json& v, const std::string& path) {
  std::set<std::string> out;
  if (!v.is_array() || v.empty()) throw ManifestError(path, "expected a non-empty array of check groups");
  for (std::size_t i = 0; i < v.size(); ++i) {
    const std::string g = as_string(v[i], index_path(path, i));
    if (g == "all") {
      out.insert(suite_groups().begin(), suite_groups().end());
      continue;
    }
    if (std::find(suite_groups().begin(), suite_groups().end(), g) == suite_groups().end()) {
      std::string known;
      for (const auto& k : suite_groups()) known += (known.empty() ? "" : ", ") + k;
      throw ManifestError(index_path(path, i), "unknown check group '" + g + "' (known: all, " + known + ")");
    }
    out.insert(g);
  }
  return out;
}

// Constants a manifest may pin, mapped to report constants.
const std::map<std::string, std::string>& expectable_constants() {
  static const std::map<std::string, std::string> m = {
      {"k_hat", "k_hat"},         {"a", "a"},
      {"b", "b"},                 {"kappa_B", "kappa_B"},
      {"scalar", "scalar_mean"},  {"scalar_tilde", "scalar_tilde_mean"},
      {"phsc", "phsc_mean"},      {"xi_sectional", "xi_sectional_mean"}};
  return m;
}

const std::set<std::string>& expectable_verdicts() {
  static const std::set<std::string> s = {"paracontact_metric", "paraSasakian", "para_CR",
                                          "constant_phsc",      "eta_einstein", "bochner_flat"};
  return s;
}

void parse_manifold(const json& man, Manifest& m) {
  const std::string path = "manifold";
  if (!man.is_object() || man.size() != 1) {
    throw ManifestError(path, "expected exactly one of builtin, custom, embedded");
  }
  if (man.contains("builtin")) {
    const json& b = man.at("builtin");
    m.kind = Manifest::Kind::builtin;
    m.builtin_name = as_string(require(b, "name", path + ".builtin"), path + ".builtin.name");
    const auto names = builtin_names();
    if (std::find(names.begin(), names.end(), m.builtin_name) == names.end()) {
      throw ManifestError(path + ".builtin.name", "unknown builtin '" + m.builtin_name + "'");
    }
    m.n = as_int(require(b, "n", path + ".builtin"), path + ".builtin.n", 1);
    return;
  }
  if (man.contains("custom")) {
    const std::string p = path + ".custom";
    const json& c = man.at("custom");
    m.kind = Manifest::Kind::custom;
    auto& t = m.tables;
    t.coords = coordinate_list(require(c, "coords", p), p + ".coords");
    const std::size_t d = t.coords.size();
    if (c.contains("dim") && as_int(c.at("dim"), p + ".dim", 1) != static_cast<int>(d)) {
      throw ManifestError(p + ".dim", "does not match the number of coordinates (" + std::to_string(d) + ")");
    }
    if (d % 2 == 0) throw ManifestError(p + ".coords", "a paracontact manifold needs odd dimension, got " + std::to_string(d));
    t.g = expression_matrix(require(c, "g", p), p + ".g", d);
    t.phi = expression_matrix(require(c, "phi", p), p + ".phi", d);
    t.xi = expression_list(require(c, "xi", p), p + ".xi", d);
    t.eta = expression_list(require(c, "eta", p), p + ".eta", d);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        checked_parse(t.g[i][j], t.coords, p + ".g[" + std::to_string(i) + "][" + std::to_string(j) + "]");
        checked_parse(t.phi[i][j], t.coords, p + ".phi[" + std::to_string(i) + "][" + std::to_string(j) + "]");
      }
      checked_parse(t.xi[i], t.coords, index_path(p + ".xi", i));
      checked_parse(t.eta[i], t.coords, index_path(p + ".eta", i));
    }
    m.chart_box = c.contains("box") ? parse_box(c.at("box"), p + ".box", d) : std::vector<Interval>(d, Interval{});
    if (c.contains("guard")) {
      m.guard = as_string(c.at("guard"), p + ".guard");
      checked_parse(m.guard, t.coords, p + ".guard");
    }
    if (c.contains("signature")) {
      const json& s = c.at("signature");
      if (!s.is_array() || s.size() != 2) throw ManifestError(p + ".signature", "expected [positive, negative]");
      m.signature = Signature{as_int(s[0], p + ".signature[0]", 0), as_int(s[1], p + ".signature[1]", 0), 0};
    }
    check_symmetric(t, m.chart_box);
    return;
  }
  if (man.contains("embedded")) {
    const std::string p = path + ".embedded";
    const json& e = man.at("embedded");
    m.kind = Manifest::Kind::embedded;
    m.n = as_int(require(e, "n", p), p + ".n", 1);
    m.tables.coords = coordinate_list(require(e, "coords", p), p + ".coords");
    const std::size_t d = m.tables.coords.size();
    if (d != static_cast<std::size_t>(2 * m.n + 1)) {
      throw ManifestError(p + ".coords", "expected 2n+1 = " + std::to_string(2 * m.n + 1) + " coordinates");
    }
    m.immersion = expression_list(require(e, "immersion", p), p + ".immersion", d + 1);
    for (std::size_t i = 0; i < m.immersion.size(); ++i) {
      if (!checked_parse(m.immersion[i], m.tables.coords, index_path(p + ".immersion", i))) {
        m.immersion[i] = "0";
      }
    }
    m.chart_box = e.contains("box") ? parse_box(e.at("box"), p + ".box", d) : std::vector<Interval>(d, Interval{});
    if (e.contains("guard")) {
      m.guard = as_string(e.at("guard"), p + ".guard");
      checked_parse(m.guard, m.tables.coords, p + ".guard");
    }
    return;
  }
  throw ManifestError(path, "expected exactly one of builtin, custom, embedded");
}

int manifold_dim(const Manifest& m) {
  if (m.kind == Manifest::Kind::builtin) return 2 * m.n + 1;
  return static_cast<int>(m.tables.coords.size());
}

}  // namespace

Manifest parse_manifest(std::string_view text) {
  Manifest m;
  try {
    m.raw = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ManifestError("(document)", std::string("invalid JSON: ") + e.what());
  }
  m.digest = sha256_hex(text);
  const json& j = m.raw;
  if (!j.is_object()) throw ManifestError("(document)", "expected a JSON object");

  static const std::set<std::string> known = {"schema",   "manifold", "transform", "sampling", "tolerance",
                                              "checks",   "overrides", "expect",    "description"};
  for (const auto& [key, _] : j.items()) {
    if (!known.count(key)) throw ManifestError(key, "unknown field");
  }
  if (j.contains("schema") && as_string(j.at("schema"), "schema") != kManifestSchema) {
    throw ManifestError("schema", "unsupported schema '" + j.at("schema").get<std::string>() + "', expected " +
                                      kManifestSchema);
  }
  parse_manifold(require(j, "manifold", "(document)"), m);
  const std::size_t d = static_cast<std::size_t>(manifold_dim(m));

  if (j.contains("transform")) {
    const json& t = j.at("transform");
    const double a = as_number(require(t, "alpha", "transform"), "transform.alpha");
    if (!(a > 0.0)) throw ManifestError("transform.alpha", "alpha must be > 0, got " + fmt17(a));
    m.alpha = a;
  }
  if (j.contains("sampling")) {
    const json& s = j.at("sampling");
    if (!s.is_object()) throw ManifestError("sampling", "expected an object");
    if (s.contains("seed")) m.seed = as_seed(s.at("seed"), "sampling.seed");
    if (s.contains("count")) m.count = as_int(s.at("count"), "sampling.count", 1);
    if (s.contains("box")) m.sample_box = parse_box(s.at("box"), "sampling.box", d);
  }
  if (j.contains("tolerance")) {
    m.tolerance = as_number(j.at("tolerance"), "tolerance");
    if (!(m.tolerance > 0.0)) throw ManifestError("tolerance", "must be > 0");
  }
  m.checks = j.contains("checks") ? parse_checks(j.at("checks"), "checks")
                                  : std::set<std::string>(suite_groups().begin(), suite_groups().end());
  if (j.contains("overrides")) {
    const json& o = j.at("overrides");
    if (!o.is_object()) throw ManifestError("overrides", "expected an object");
    if (o.contains("metric_scale")) {
      m.overrides.metric_scale = as_number(o.at("metric_scale"), "overrides.metric_scale");
      if (!(m.overrides.metric_scale > 0.0)) throw ManifestError("overrides.metric_scale", "must be > 0");
    }
    if (o.contains("phi_perturb")) {
      const json& p = o.at("phi_perturb");
      StructureOverrides::PhiPerturbation pp;
      pp.row = as_int(require(p, "row", "overrides.phi_perturb"), "overrides.phi_perturb.row", 0);
      pp.col = as_int(require(p, "col", "overrides.phi_perturb"), "overrides.phi_perturb.col", 0);
      pp.amount = as_number(require(p, "amount", "overrides.phi_perturb"), "overrides.phi_perturb.amount");
      if (pp.row >= static_cast<int>(d)) throw ManifestError("overrides.phi_perturb.row", "index out of range");
      if (pp.col >= static_cast<int>(d)) throw ManifestError("overrides.phi_perturb.col", "index out of range");
      m.overrides.phi_perturb = pp;
    }
  }
  if (j.contains("expect")) {
    const json& e = j.at("expect");
    if (!e.is_object()) throw ManifestError("expect", "expected an object");
    for (const auto& [key, v] : e.items()) {
      const std::string path = "expect." + key;
      if (expectable_constants().count(key)) {
        m.expect_constants[key] = as_number(v, path);
      } else if (expectable_verdicts().count(key)) {
        if (!v.is_boolean()) throw ManifestError(path, "expected true or false");
        m.expect_verdicts[key] = v.get<bool>();
      } else {
        throw ManifestError(path, "not an expectable constant or verdict");
      }
    }
  }
  return m;
}

Manifest load_manifest(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ManifestError(path.string(), "cannot read file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_manifest(ss.str());
}

CharteredStructure build_structure(const Manifest& m) {
  std::optional<CharteredStructure> base;
  switch (m.kind) {
    case Manifest::Kind::builtin:
      base = builtin_by_name(m.builtin_name, m.n);
      break;
    case Manifest::Kind::custom: {
      Domain dom;
      dom.box = m.chart_box;
      dom.guard = guard_function(m.guard, m.tables.coords, "manifold.custom.guard");
      dom.guard_description = m.guard;
      base.emplace("custom(dim=" + std::to_string(m.tables.coords.size()) + ")", m.tables.coords, expression_source(m.tables), std::move(dom), m.signature);
      break;
    }
    case Manifest::Kind::embedded: {
      std::vector<ExprAst> imm;
      for (const auto& text : m.immersion) imm.push_back(parse(text, m.tables.coords));
      auto emb = std::make_shared<const Embedding>(AmbientParaKaehler(m.n + 1), m.tables.coords, std::move(imm));
      Domain dom;
      dom.box = m.chart_box;
      dom.guard = guard_function(m.guard, m.tables.coords, "manifold.embedded.guard");
      dom.guard_description = m.guard;
      base.emplace("embedded(n=" + std::to_string(m.n) + ")", m.tables.coords, embedding_source(emb), std::move(dom));
      break;
    }
  }
  CharteredStructure s = with_overrides(*base, m.overrides);
  if (m.alpha) s = d_homothetic(s, *m.alpha);
  return s;
}

RunResult run_manifest(const Manifest& m, const RunOptions& opt) {
  const auto t0 = std::chrono::steady_clock::now();
  const CharteredStructure s = build_structure(m);
  SuiteOptions so;
  so.groups = m.checks;
  so.tol = opt.tolerance.value_or(m.tolerance);
  so.seed = opt.seed.value_or(m.seed);
  const auto points = sample_points(s, so.seed, m.count, m.sample_box);

  RunResult r;
  r.structure = s.name();
  r.dim = s.dim();
  r.tolerance = so.tol;
  r.report = run_suite(s, points, so);
  for (const auto& [key, want] : m.expect_constants) {
    const std::string& name = expectable_constants().at(key);
    auto it = r.report.constants.find(name);
    if (it == r.report.constants.end()) {
      throw ManifestError("expect." + key, "no selected check group produces this constant");
    }
    r.report.add("expect_" + key, std::abs(it->second - want), so.tol);
  }
  for (const auto& [key, want] : m.expect_verdicts) {
    auto it = r.report.verdicts.find(key);
    if (it == r.report.verdicts.end()) {
      throw ManifestError("expect." + key, "no selected check group produces this verdict");
    }
    r.report.add("expect_" + key, it->second == want ? 0.0 : 1.0, so.tol);
  }
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

std::string report_json(const RunResult& r, const Manifest& m, const RunOptions& opt) {
  json j;
  j["schema"] = kReportSchema;
  j["tool"] = {{"name", "paracurv"}, {"version", kToolVersion}};
  j["manifest_digest"] = "sha256:" + m.digest;
  j["structure"] = r.structure;
  j["dimension"] = r.dim;
  j["seed"] = r.report.seed;
  j["point_count"] = r.report.point_count;
  j["tolerance"] = r.tolerance;
  json checks = json::array();
  for (const auto& e : r.report.entries) {
    checks.push_back({{"name", e.name}, {"residual_max", e.residual}, {"threshold", e.threshold}, {"pass", e.pass}});
  }
  j["checks"] = std::move(checks);
  j["constants"] = r.report.constants;
  j["verdicts"] = r.report.verdicts;
  j["failing"] = r.report.failing();
  j["pass"] = r.report.pass();
  if (opt.timing) j["wall_time_seconds"] = r.wall_seconds;
  return dump_stable(j);
}

std::string error_report_json(const std::string& kind, const std::string& message, const std::string& digest) {
  json j;
  j["schema"] = kReportSchema;
  j["tool"] = {{"name", "paracurv"}, {"version", kToolVersion}};
  if (!digest.empty()) j["manifest_digest"] = "sha256:" + digest;
  j["error"] = {{"kind", kind}, {"message", message}};
  j["pass"] = false;
  return dump_stable(j);
}

json transform_manifest(const Manifest& m, double alpha) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw InvalidAlpha("alpha must be > 0, got " + fmt17(alpha));
  json out = m.raw;
  out["schema"] = kManifestSchema;
  const double total = alpha * m.alpha.value_or(1.0);
  const bool rewrite = m.kind == Manifest::Kind::custom && m.overrides.metric_scale == 1.0 && !m.overrides.phi_perturb;
  if (!rewrite) {
    if (total == 1.0) {
      out.erase("transform");
    } else {
      out["transform"] = {{"alpha", total}};
    }
    return out;
  }
  // ḡ = αg + (α²−α)η⊗η, ξ̄ = ξ/α, η̄ = αη; φ is unchanged.
  out.erase("transform");
  if (total == 1.0) return out;
  const auto& t = m.tables;
  const std::size_t d = t.coords.size();
  const std::string a = fmt17(total);
  const std::string a2 = fmt17(total * total - total);
  auto paren = [](const std::string& e) { return "(" + e + ")"; };
  json& c = out["manifold"]["custom"];
  for (std::size_t i = 0; i < d; ++i) {
    for (std::size_t j = 0; j < d; ++j) {
      std::string e;
      if (!t.g[i][j].empty()) e = a + "*" + paren(t.g[i][j]);
      if (!t.eta[i].empty() && !t.eta[j].empty()) {
        e += (e.empty() ? "" : " + ") + paren(a2) + "*" + paren(t.eta[i]) + "*" + paren(t.eta[j]);
      }
      c["g"][i][j] = e;
    }
    c["xi"][i] = t.xi[i].empty() ? std::string() : paren(t.xi[i]) + "/" + a;
    c["eta"][i] = t.eta[i].empty() ? std::string() : a + "*" + paren(t.eta[i]);
  }
  return out;
}

namespace {

void print_matrix(std::ostringstream& os, const TensorValue& t) {
  const int d = t.dim();
  for (int i = 0; i < d; ++i) {
    os << "  [";
    for (int j = 0; j < d; ++j) {
      char buf[40];
      std::snprintf(buf, sizeof buf, "%s%14.8g", j ? " " : "", t.at({i, j}));
      os << buf;
    }
    os << " ]\n";
  }
}

}  // namespace

std::string curvature_summary(const Manifest& m, std::span<const double> point, bool christoffel) {
  const CharteredStructure s = build_structure(m);
  if (static_cast<int>(point.size()) != s.dim()) {
    throw ManifestError("--point", "expected " + std::to_string(s.dim()) + " coordinates, got " +
                                       std::to_string(point.size()));
  }
  PointGeometry geo(s, point);
  const PointCurvature pc = point_curvature(geo);
  std::ostringstream os;
  os << "structure: " << s.name() << " (dim " << s.dim() << ", n = " << s.n() << ")\n";
  os << "point:";
  for (std::size_t i = 0; i < point.size(); ++i) os << " " << s.coordinates()[i] << "=" << fmt17(point[i]);
  os << "\nmetric g:\n";
  print_matrix(os, pc.g);
  if (christoffel) {
    const TensorValue gam = geo.levi_civita().values();
    os << "christoffel symbols (nonzero):\n";
    const int d = s.dim();
    for (int l = 0; l < d; ++l)
      for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
          const double v = gam.at({l, i, j});
          if (std::abs(v) > 1e-14) os << "  Gamma^" << l << "_" << i << j << " = " << fmt17(v) << "\n";
        }
  }
  os << "ricci r:\n";
  print_matrix(os, pc.ricci);
  os << "scalar curvature s: " << fmt17(pc.scalar) << "\n";
  os << "|R|_inf: " << fmt17(max_abs(pc.riem_down)) << "\n";
  const SpaceFormFit fit = space_form_fit(std::span<const PointCurvature>(&pc, 1));
  os << "phsc fit at point: k = " << fmt17(fit.k_hat) << " (model residual " << fmt17(fit.residual_max) << ")\n";
  // Default u: the horizontal part of the first coordinate direction that is
  // not null.
  for (int a = 0; a < s.dim(); ++a) {
    Vec u(static_cast<std::size_t>(s.dim()), 0.0);
    u[static_cast<std::size_t>(a)] = 1.0;
    const double e = pairing(pc.eta, u);
    for (int i = 0; i < s.dim(); ++i) u[static_cast<std::size_t>(i)] -= e * pc.xi.at({i});
    if (std::abs(bilinear(pc.g, u, u)) < 1e-6) continue;
    os << "xi-sectional K(xi, u), u = horizontal part of d/d" << s.coordinates()[static_cast<std::size_t>(a)] << ": "
       << fmt17(xi_sectional(geo, u)) << "\n";
    break;
  }
  const BochnerData b = pc_bochner(pc);
  os << "kappa_B: " << fmt17(b.kappa_B) << "\n";
  os << "|B|_inf: " << fmt17(max_abs(b.B)) << "\n";
  os << "scalar curvature (canonical) s~: " << fmt17(pc.scalar_tilde) << "\n";
  return os.str();
}

namespace {

void dump_value(std::string& out, const json& j, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  const std::string close(static_cast<std::size_t>(indent), ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      // json objects are std::map-backed, so iteration is already key-sorted.
      for (const auto& [k, v] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad + json(k).dump() + ": ";
        dump_value(out, v, indent + 2);
      }
      out += "\n" + close + "}";
      return;
    }
    case json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      out += "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ",\n";
        out += pad;
        dump_value(out, j[i], indent + 2);
      }
      out += "\n" + close + "]";
      return;
    }
    case json::value_t::number_float: {
      const double v = j.get<double>();
      if (!std::isfinite(v)) {
        out += "null";
        return;
      }
      std::string s = fmt17(v);
      // Keep floats recognizable as floats when read back.
      if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
      out += s;
      return;
    }
    default:
      out += j.dump();
  }
}

}  // namespace

std::string dump_stable(const json& j) {
  std::string out;
  dump_value(out, j, 0);
  out += "\n";
  return out;
}

std::string sha256_hex(std::string_view bytes) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw Error("SHA-256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[md[i] >> 4];
    out += hex[md[i] & 15];
  }
  return out;
}

std::vector<double> parse_point(std::string_view text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (true) {
    const std::size_t comma = text.find(',', pos);
    std::string item(text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    double v = 0.0;
    auto [p, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
    if (item.empty() || ec != std::errc() || p != item.data() + item.size() || !std::isfinite(v)) {
      throw ManifestError("--point", "'" + item + "' is not a number");
    }
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    pos = comma + 1;
  }
  return out;
}

}  // namespace paracurv
