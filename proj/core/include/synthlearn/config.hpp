#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace synthlearn {

// Sectioned key=value configuration ([section] headers, '#' comments).
// Typed getters mark keys as consumed; require_all_consumed() rejects any
// key no reader asked about, so misspelled options fail loudly.
class Config {
public:
  static Config parse_file(const std::string& path);
  static Config parse_string(const std::string& text, const std::string& origin = "<string>");

  bool has(const std::string& section, const std::string& key) const;

  std::string get_string(const std::string& section, const std::string& key,
                         const std::string& fallback) const;
  std::string get_string(const std::string& section, const std::string& key) const;
  double get_double(const std::string& section, const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& section, const std::string& key,
                       std::int64_t fallback) const;
  bool get_bool(const std::string& section, const std::string& key, bool fallback) const;
  std::vector<double> get_double_list(const std::string& section, const std::string& key,
                                      const std::vector<double>& fallback) const;
  std::vector<std::size_t> get_size_list(const std::string& section, const std::string& key,
                                         const std::vector<std::size_t>& fallback) const;

  // Overrides an entry (used to fold CLI flags into the resolved config).
  void set(const std::string& section, const std::string& key, const std::string& value);

  void require_all_consumed() const;

  // Canonical deterministic rendering: sections and keys sorted.
  std::string render() const;

private:
  std::string raw(const std::string& section, const std::string& key) const;

  std::map<std::string, std::map<std::string, std::string>> sections_;
  mutable std::map<std::string, bool> consumed_;  // "section.key" -> touched
  std::string origin_;
};

double parse_double_strict(const std::string& s, const std::string& what);
std::int64_t parse_int_strict(const std::string& s, const std::string& what);

// Numeric grid with ellipsis expansion: "0.1,0.2,...,0.5" continues with the
// step set by the previous two entries until the bound after the ellipsis is
// reached (inclusive, within a small tolerance). Also accepts "p/q" fractions.
std::vector<double> expand_grid(const std::string& text);

// "0.00026504...", "1/3773" and "auto:3773" (reciprocal dataset size) forms.
double parse_delta(const std::string& text);

}  // namespace synthlearn
