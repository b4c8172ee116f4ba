#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "pacs/numerics.hpp"

namespace pacs {

/// Flat key-value configuration read from TOML-style text: `[section]`
/// headers, `key = value` lines and `#` comments. Keys are addressed as
/// `section.key`. Values are numbers, booleans, quoted strings or flat
/// arrays `[a, b, ...]`.
class Config {
 public:
  static Config parse(const std::string& text, const std::string& origin = "<string>");
  static Config load(const std::string& path);

  /// Applies `section.key=value`; the key must already exist unless
  /// `allowed` lists it.
  void set(const std::string& assignment, const std::set<std::string>& allowed = {});

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  std::string get_string(const std::string& key, const std::optional<std::string>& fallback = std::nullopt) const;
  std::int64_t get_int(const std::string& key, const std::optional<std::int64_t>& fallback = std::nullopt) const;
  Real get_real(const std::string& key, const std::optional<Real>& fallback = std::nullopt) const;
  bool get_bool(const std::string& key, const std::optional<bool>& fallback = std::nullopt) const;
  std::vector<Real> get_real_list(const std::string& key) const;
  std::vector<std::int64_t> get_int_list(const std::string& key) const;

  /// Throws InputError naming every key outside `known`.
  void reject_unknown(const std::set<std::string>& known) const;

  const std::map<std::string, std::string>& raw() const { return values_; }
  /// Canonical text form (sorted sections and keys).
  std::string dump() const;

 private:
  std::map<std::string, std::string> values_;
  std::string origin_;

  const std::string& lookup(const std::string& key) const;
};

}  // namespace pacs
