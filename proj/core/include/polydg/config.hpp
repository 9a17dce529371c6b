#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace polydg {

using ConfigValue = std::variant<bool, double, std::string, std::vector<double>>;

/// Flat key/value view of a TOML-like file: `[section]` headers, `key = value` lines, `#` comments.
/// Values: numbers, true/false, "strings" and [number, ...] arrays. Keys are stored as "section.key".
class ConfigDoc {
public:
  static ConfigDoc parse(std::string_view text);

  bool has(const std::string& key) const { return values_.count(key) > 0; }
  const std::map<std::string, ConfigValue>& values() const { return values_; }

  double number(const std::string& key) const;
  int integer(const std::string& key) const;
  bool boolean(const std::string& key) const;
  const std::string& string(const std::string& key) const;
  const std::vector<double>& array(const std::string& key) const;

  /// Throws ConfigError listing every key outside `allowed`.
  void require_known(const std::set<std::string>& allowed) const;

private:
  std::map<std::string, ConfigValue> values_;
  std::map<std::string, int> lines_;
};

}  // namespace polydg
