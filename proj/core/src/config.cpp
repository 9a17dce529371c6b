#include "polydg/config.hpp"

#include "polydg/error.hpp"

#include <fmt/format.h>

#include <charconv>
#include <cmath>

namespace polydg {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

/// Drops a trailing comment outside string literals.
std::string_view strip_comment(std::string_view s) {
  bool in_str = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') in_str = !in_str;
    if (s[i] == '#' && !in_str) return s.substr(0, i);
  }
  return s;
}

bool parse_number(std::string_view s, double& out) {
  s = trim(s);
  if (s.empty()) return false;
  std::string buf(s);
  std::erase(buf, '_');
  const char* b = buf.data();
  if (*b == '+') ++b;
  const auto [p, ec] = std::from_chars(b, buf.data() + buf.size(), out);
  return ec == std::errc() && p == buf.data() + buf.size();
}

ConfigValue parse_value(std::string_view s, int line) {
  s = trim(s);
  POLYDG_THROW_IF(s.empty(), ConfigError, fmt::format("line {}: missing value", line));
  if (s == "true") return true;
  if (s == "false") return false;
  if (s.front() == '"') {
    POLYDG_THROW_IF(s.size() < 2 || s.back() != '"', ConfigError, fmt::format("line {}: unterminated string", line));
    return std::string(s.substr(1, s.size() - 2));
  }
  if (s.front() == '[') {
    POLYDG_THROW_IF(s.back() != ']', ConfigError, fmt::format("line {}: unterminated array", line));
    std::vector<double> out;
    std::string_view body = trim(s.substr(1, s.size() - 2));
    while (!body.empty()) {
      const auto comma = body.find(',');
      const auto item = trim(body.substr(0, comma));
      if (!item.empty()) {
        double v = 0.0;
        POLYDG_THROW_IF(!parse_number(item, v), ConfigError, fmt::format("line {}: array items must be numbers", line));
        out.push_back(v);
      }
      if (comma == std::string_view::npos) break;
      body = body.substr(comma + 1);
    }
    return out;
  }
  double v = 0.0;
  POLYDG_THROW_IF(!parse_number(s, v), ConfigError, fmt::format("line {}: cannot parse value '{}'", line, s));
  return v;
}

const char* type_name(const ConfigValue& v) {
  switch (v.index()) {
    case 0: return "boolean";
    case 1: return "number";
    case 2: return "string";
    default: return "array";
  }
}

}  // namespace

ConfigDoc ConfigDoc::parse(std::string_view text) {
  ConfigDoc doc;
  std::string section;
  int line_no = 0;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      POLYDG_THROW_IF(line.back() != ']', ConfigError, fmt::format("line {}: malformed section header", line_no));
      section = std::string(trim(line.substr(1, line.size() - 2)));
      POLYDG_THROW_IF(section.empty(), ConfigError, fmt::format("line {}: empty section name", line_no));
      continue;
    }
    const auto eq = line.find('=');
    POLYDG_THROW_IF(eq == std::string_view::npos, ConfigError, fmt::format("line {}: expected key = value", line_no));
    const auto key = trim(line.substr(0, eq));
    POLYDG_THROW_IF(key.empty(), ConfigError, fmt::format("line {}: empty key", line_no));
    const std::string full = section.empty() ? std::string(key) : section + "." + std::string(key);
    POLYDG_THROW_IF(doc.values_.count(full), ConfigError, fmt::format("line {}: duplicate key '{}'", line_no, full));
    doc.values_[full] = parse_value(line.substr(eq + 1), line_no);
    doc.lines_[full] = line_no;
  }
  return doc;
}

namespace {

template <class T>
const T& get_typed(const std::map<std::string, ConfigValue>& values, const std::string& key, const char* want) {
  const auto it = values.find(key);
  POLYDG_THROW_IF(it == values.end(), ConfigError, fmt::format("missing key '{}'", key));
  const T* p = std::get_if<T>(&it->second);
  POLYDG_THROW_IF(!p, ConfigError, fmt::format("key '{}' must be a {}, got a {}", key, want, type_name(it->second)));
  return *p;
}

}  // namespace

double ConfigDoc::number(const std::string& key) const { return get_typed<double>(values_, key, "number"); }

int ConfigDoc::integer(const std::string& key) const {
  const double v = number(key);
  POLYDG_THROW_IF(v != std::floor(v) || std::abs(v) > 1e9, ConfigError, fmt::format("key '{}' must be an integer", key));
  return static_cast<int>(v);
}

bool ConfigDoc::boolean(const std::string& key) const { return get_typed<bool>(values_, key, "boolean"); }
const std::string& ConfigDoc::string(const std::string& key) const { return get_typed<std::string>(values_, key, "string"); }
const std::vector<double>& ConfigDoc::array(const std::string& key) const {
  return get_typed<std::vector<double>>(values_, key, "array");
}

void ConfigDoc::require_known(const std::set<std::string>& allowed) const {
  std::vector<std::string> bad;
  for (const auto& [k, v] : values_)
    if (!allowed.count(k)) bad.push_back(fmt::format("{} (line {})", k, lines_.at(k)));
  POLYDG_THROW_IF(!bad.empty(), ConfigError, fmt::format("unknown configuration keys: {}", fmt::join(bad, ", ")));
}

}  // namespace polydg
