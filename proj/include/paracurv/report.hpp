#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace paracurv {

struct CheckEntry {
  std::string name;
  double residual = 0.0;
  double threshold = 0.0;
  bool pass = false;
};

/// Named residuals with verdicts, fitted constants and sampling provenance.
/// A residual that is NaN never passes.
struct CheckReport {
  std::vector<CheckEntry> entries;
  std::map<std::string, double> constants;
  std::map<std::string, bool> verdicts;
  std::uint64_t seed = 0;
  int point_count = 0;

  void add(const std::string& name, double residual, double threshold) {
    entries.push_back({name, residual, threshold, residual <= threshold});
  }
  void merge(const CheckReport& other) {
    entries.insert(entries.end(), other.entries.begin(), other.entries.end());
    for (const auto& [k, v] : other.constants) constants[k] = v;
    for (const auto& [k, v] : other.verdicts) verdicts[k] = v;
  }
  bool pass() const {
    for (const auto& e : entries)
      if (!e.pass) return false;
    return true;
  }
  const CheckEntry* find(const std::string& name) const {
    for (const auto& e : entries)
      if (e.name == name) return &e;
    return nullptr;
  }
  std::vector<std::string> failing() const {
    std::vector<std::string> out;
    for (const auto& e : entries)
      if (!e.pass) out.push_back(e.name);
    return out;
  }
};

}  // namespace paracurv
