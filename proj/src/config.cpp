#include "pacs/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "pacs/errors.hpp"

namespace pacs {

namespace {

std::string trim(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

// Drops a trailing comment, ignoring '#' inside quotes.
std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

bool valid_key(const std::string& key) {
  if (key.empty()) return false;
  for (char c : key)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.')) return false;
  return true;
}

std::vector<std::string> split_list(const std::string& value, const std::string& key) {
  if (value.size() < 2 || value.front() != '[' || value.back() != ']') throw InputError(key + ": expected an array");
  std::vector<std::string> items;
  const std::string body = trim(value.substr(1, value.size() - 2));
  if (body.empty()) return items;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) items.push_back(trim(item));
  return items;
}

Real to_real(const std::string& text, const std::string& key) {
  Real out = 0.0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) throw InputError(key + ": expected a number, got '" + text + "'");
  return out;
}

std::int64_t to_int(const std::string& text, const std::string& key) {
  std::int64_t out = 0;
  const auto* first = text.data();
  const auto* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, out);
  if (ec != std::errc() || ptr != last) throw InputError(key + ": expected an integer, got '" + text + "'");
  return out;
}

}  // namespace

Config Config::parse(const std::string& text, const std::string& origin) {
  Config cfg;
  cfg.origin_ = origin;
  std::string section;
  std::stringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    const std::string where = origin + ":" + std::to_string(lineno);
    if (body.front() == '[') {
      if (body.back() != ']') throw InputError(where + ": malformed section header");
      section = trim(body.substr(1, body.size() - 2));
      if (!valid_key(section)) throw InputError(where + ": bad section name");
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw InputError(where + ": expected key = value");
    const std::string key = trim(body.substr(0, eq));
    const std::string value = trim(body.substr(eq + 1));
    if (!valid_key(key) || value.empty()) throw InputError(where + ": malformed assignment");
    const std::string full = section.empty() ? key : section + "." + key;
    if (cfg.values_.count(full)) throw InputError(where + ": duplicate key " + full);
    cfg.values_[full] = value;
  }
  return cfg;
}

Config Config::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot read config " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

void Config::set(const std::string& assignment, const std::set<std::string>& allowed) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw InputError("override '" + assignment + "' is not key=value");
  const std::string key = trim(assignment.substr(0, eq));
  const std::string value = trim(assignment.substr(eq + 1));
  if (!valid_key(key) || value.empty()) throw InputError("malformed override '" + assignment + "'");
  if (!values_.count(key) && !allowed.count(key)) throw InputError("unknown config key: " + key);
  values_[key] = value;
}

const std::string& Config::lookup(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw InputError(origin_ + ": missing key " + key);
  return it->second;
}

std::string Config::get_string(const std::string& key, const std::optional<std::string>& fallback) const {
  if (!has(key)) {
    if (fallback) return *fallback;
    lookup(key);
  }
  const std::string& v = lookup(key);
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
  return v;
}

std::int64_t Config::get_int(const std::string& key, const std::optional<std::int64_t>& fallback) const {
  if (!has(key) && fallback) return *fallback;
  return to_int(lookup(key), key);
}

Real Config::get_real(const std::string& key, const std::optional<Real>& fallback) const {
  if (!has(key) && fallback) return *fallback;
  return to_real(lookup(key), key);
}

bool Config::get_bool(const std::string& key, const std::optional<bool>& fallback) const {
  if (!has(key) && fallback) return *fallback;
  const std::string& v = lookup(key);
  if (v == "true") return true;
  if (v == "false") return false;
  throw InputError(key + ": expected true or false");
}

std::vector<Real> Config::get_real_list(const std::string& key) const {
  std::vector<Real> out;
  for (const auto& item : split_list(lookup(key), key)) out.push_back(to_real(item, key));
  return out;
}

std::vector<std::int64_t> Config::get_int_list(const std::string& key) const {
  std::vector<std::int64_t> out;
  for (const auto& item : split_list(lookup(key), key)) out.push_back(to_int(item, key));
  return out;
}

void Config::reject_unknown(const std::set<std::string>& known) const {
  std::string unknown;
  for (const auto& [key, value] : values_)
    if (!known.count(key)) unknown += (unknown.empty() ? "" : ", ") + key;
  if (!unknown.empty()) throw InputError(origin_ + ": unknown config keys: " + unknown);
}

std::string Config::dump() const {
  std::map<std::string, std::vector<std::pair<std::string, std::string>>> sections;
  for (const auto& [key, value] : values_) {
    const auto dot = key.find('.');
    if (dot == std::string::npos) sections[""].push_back({key, value});
    else sections[key.substr(0, dot)].push_back({key.substr(dot + 1), value});
  }
  std::ostringstream out;
  bool first = true;
  for (const auto& [name, entries] : sections) {
    if (!name.empty()) {
      if (!first) out << '\n';
      out << '[' << name << "]\n";
    }
    for (const auto& [k, v] : entries) out << k << " = " << v << '\n';
    first = false;
  }
  return out.str();
}

}  // namespace pacs
