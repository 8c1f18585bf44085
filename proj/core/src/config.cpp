#include "synthlearn/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "synthlearn/common.hpp"

namespace synthlearn {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == ',') {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur.push_back(c);
    }
  }
  out.push_back(trim(cur));
  return out;
}

}  // namespace

Config Config::parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_string(buf.str(), path);
}

Config Config::parse_string(const std::string& text, const std::string& origin) {
  Config cfg;
  cfg.origin_ = origin;
  std::istringstream in(text);
  std::string line;
  std::string section;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']')
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (section.empty())
        throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty section name");
      cfg.sections_[section];
      continue;
    }
    if (section.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) +
                        ": key before any [section] header");
    std::size_t eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": expected key = value");
    std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty())
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": empty key");
    auto& sec = cfg.sections_[section];
    if (sec.count(key))
      throw ConfigError(origin + ":" + std::to_string(lineno) + ": duplicate key '" + key +
                        "' in section [" + section + "]");
    sec[key] = value;
  }
  return cfg;
}

bool Config::has(const std::string& section, const std::string& key) const {
  auto sit = sections_.find(section);
  if (sit == sections_.end()) return false;
  return sit->second.count(key) != 0;
}

std::string Config::raw(const std::string& section, const std::string& key) const {
  consumed_[section + "." + key] = true;
  auto sit = sections_.find(section);
  if (sit == sections_.end()) throw ConfigError("missing config section [" + section + "]");
  auto kit = sit->second.find(key);
  if (kit == sit->second.end())
    throw ConfigError("missing config key '" + key + "' in section [" + section + "]");
  return kit->second;
}

std::string Config::get_string(const std::string& section, const std::string& key,
                               const std::string& fallback) const {
  consumed_[section + "." + key] = true;
  if (!has(section, key)) return fallback;
  return raw(section, key);
}

std::string Config::get_string(const std::string& section, const std::string& key) const {
  return raw(section, key);
}

double Config::get_double(const std::string& section, const std::string& key,
                          double fallback) const {
  consumed_[section + "." + key] = true;
  if (!has(section, key)) return fallback;
  return parse_double_strict(raw(section, key), section + "." + key);
}

std::int64_t Config::get_int(const std::string& section, const std::string& key,
                             std::int64_t fallback) const {
  consumed_[section + "." + key] = true;
  if (!has(section, key)) return fallback;
  return parse_int_strict(raw(section, key), section + "." + key);
}

bool Config::get_bool(const std::string& section, const std::string& key, bool fallback) const {
  consumed_[section + "." + key] = true;
  if (!has(section, key)) return fallback;
  std::string v = raw(section, key);
  if (v == "true") return true;
  if (v == "false") return false;
  throw ConfigError("config key " + section + "." + key + ": expected true or false, got '" + v +
                    "'");
}

std::vector<double> Config::get_double_list(const std::string& section, const std::string& key,
                                            const std::vector<double>& fallback) const {
  consumed_[section + "." + key] = true;
  if (!has(section, key)) return fallback;
  std::vector<double> out;
  for (const auto& tok : split_list(raw(section, key)))
    out.push_back(parse_double_strict(tok, section + "." + key));
  return out;
}

std::vector<std::size_t> Config::get_size_list(const std::string& section, const std::string& key,
                                               const std::vector<std::size_t>& fallback) const {
  consumed_[section + "." + key] = true;
  if (!has(section, key)) return fallback;
  std::vector<std::size_t> out;
  for (const auto& tok : split_list(raw(section, key))) {
    std::int64_t v = parse_int_strict(tok, section + "." + key);
    if (v < 0) throw ConfigError("config key " + section + "." + key + ": negative entry");
    out.push_back(static_cast<std::size_t>(v));
  }
  return out;
}

void Config::set(const std::string& section, const std::string& key, const std::string& value) {
  sections_[section][key] = value;
}

void Config::require_all_consumed() const {
  std::vector<std::string> unknown;
  for (const auto& [section, entries] : sections_)
    for (const auto& [key, value] : entries) {
      (void)value;
      if (!consumed_.count(section + "." + key)) unknown.push_back("[" + section + "] " + key);
    }
  if (unknown.empty()) return;
  std::string msg = origin_ + ": unknown config keys:";
  for (std::size_t i = 0; i < unknown.size(); ++i)
    msg += (i ? ", " : " ") + unknown[i];
  throw ConfigError(msg);
}

std::string Config::render() const {
  std::ostringstream out;
  bool first = true;
  for (const auto& [section, entries] : sections_) {
    if (!first) out << "\n";
    first = false;
    out << "[" << section << "]\n";
    for (const auto& [key, value] : entries) out << key << " = " << value << "\n";
  }
  return out.str();
}

double parse_double_strict(const std::string& s, const std::string& what) {
  std::string t = trim(s);
  std::size_t slash = t.find('/');
  if (slash != std::string::npos) {
    double num = parse_double_strict(t.substr(0, slash), what);
    double den = parse_double_strict(t.substr(slash + 1), what);
    if (den == 0.0) throw ConfigError(what + ": division by zero");
    return num / den;
  }
  if (t.empty()) throw ConfigError(what + ": empty number");
  char* end = nullptr;
  double v = std::strtod(t.c_str(), &end);
  if (end != t.c_str() + t.size()) throw ConfigError(what + ": invalid number '" + t + "'");
  return v;
}

std::int64_t parse_int_strict(const std::string& s, const std::string& what) {
  std::string t = trim(s);
  if (t.empty()) throw ConfigError(what + ": empty integer");
  char* end = nullptr;
  long long v = std::strtoll(t.c_str(), &end, 10);
  if (end != t.c_str() + t.size()) throw ConfigError(what + ": invalid integer '" + t + "'");
  return static_cast<std::int64_t>(v);
}

std::vector<double> expand_grid(const std::string& text) {
  std::vector<std::string> toks = split_list(text);
  std::vector<double> grid;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (toks[i] == "...") {
      if (grid.size() < 2 || i + 1 >= toks.size())
        throw ConfigError("grid ellipsis needs two entries before and a bound after: " + text);
      double step = grid[grid.size() - 1] - grid[grid.size() - 2];
      if (step <= 0.0) throw ConfigError("grid ellipsis requires an increasing step: " + text);
      double bound = parse_double_strict(toks[i + 1], "grid bound");
      double tol = step * 1e-6;
      double next = grid.back() + step;
      while (next < bound - tol) {
        grid.push_back(next);
        next = grid.back() + step;
      }
      grid.push_back(bound);
      ++i;
    } else {
      grid.push_back(parse_double_strict(toks[i], "grid entry"));
    }
  }
  return grid;
}

double parse_delta(const std::string& text) {
  std::string t = trim(text);
  if (t.rfind("auto:", 0) == 0) {
    std::int64_t n = parse_int_strict(t.substr(5), "delta dataset size");
    if (n <= 0) throw ConfigError("delta dataset size must be positive");
    return 1.0 / static_cast<double>(n);
  }
  double v = parse_double_strict(t, "delta");
  if (!(v > 0.0) || !(v < 1.0)) throw ConfigError("delta must lie in (0, 1)");
  return v;
}

}  // namespace synthlearn
