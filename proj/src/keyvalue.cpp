#include "spdc/keyvalue.hpp"

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <limits>
#include <sstream>

#include "spdc/errors.hpp"

namespace spdc {

namespace {

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string strip_comment(std::string_view line) {
  auto pos = line.find_first_of("#;");
  return trim(line.substr(0, pos));
}

}  // namespace

KeyValueDocument KeyValueDocument::parse(std::string_view text) {
  KeyValueDocument doc;
  std::string current;
  doc.sections_[current].line = 0;
  int line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    ++line_no;
    const std::string line = strip_comment(text.substr(start, end - start));
    start = end + 1;
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError("unterminated section header '" + line + "'", line_no);
      current = trim(std::string_view(line).substr(1, line.size() - 2));
      if (current.empty()) throw ConfigError("empty section name", line_no);
      if (doc.sections_.count(current) && doc.sections_[current].line > 0)
        throw ConfigError("duplicate section [" + current + "]", line_no);
      doc.sections_[current].line = line_no;
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("expected 'key = value', got '" + line + "'", line_no);
    std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    if (key.empty()) throw ConfigError("missing key before '='", line_no);
    auto& entries = doc.sections_[current].entries;
    if (entries.count(key)) throw ConfigError("duplicate key '" + key + "'", line_no);
    entries.emplace(key, KeyValueEntry{value, line_no, false});
  }
  return doc;
}

KeyValueDocument KeyValueDocument::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse(buffer.str());
}

bool KeyValueDocument::has_section(const std::string& section) const {
  auto it = sections_.find(section);
  return it != sections_.end() && (it->second.line > 0 || !it->second.entries.empty());
}

bool KeyValueDocument::has(const std::string& section, const std::string& key) const {
  auto it = sections_.find(section);
  return it != sections_.end() && it->second.entries.count(key) > 0;
}

const KeyValueEntry& KeyValueDocument::entry(const std::string& section, const std::string& key) const {
  auto it = sections_.find(section);
  if (it == sections_.end()) throw ConfigError("missing section [" + section + "]");
  auto e = it->second.entries.find(key);
  if (e == it->second.entries.end())
    throw ConfigError("missing key '" + key + "' in section [" + section + "]", it->second.line);
  e->second.used = true;
  return e->second;
}

std::string KeyValueDocument::get_string(const std::string& section, const std::string& key) const {
  return entry(section, key).value;
}

std::optional<std::string> KeyValueDocument::find_string(const std::string& section,
                                                         const std::string& key) const {
  if (!has(section, key)) return std::nullopt;
  return get_string(section, key);
}

double KeyValueDocument::get_quantity(const std::string& section, const std::string& key, Dimension dim) const {
  const auto& e = entry(section, key);
  try {
    return parse_quantity(e.value, dim);
  } catch (const ConfigError& err) {
    throw ConfigError("[" + section + "] " + key + ": " + err.what(), e.line);
  }
}

double KeyValueDocument::get_quantity_or(const std::string& section, const std::string& key, Dimension dim,
                                         double fallback) const {
  return has(section, key) ? get_quantity(section, key, dim) : fallback;
}

std::vector<double> KeyValueDocument::get_list(const std::string& section, const std::string& key,
                                               Dimension dim) const {
  const auto& e = entry(section, key);
  std::vector<double> out;
  std::size_t start = 0;
  while (start <= e.value.size()) {
    auto comma = e.value.find(',', start);
    if (comma == std::string::npos) comma = e.value.size();
    const std::string item = trim(std::string_view(e.value).substr(start, comma - start));
    start = comma + 1;
    if (item.empty()) throw ConfigError("[" + section + "] " + key + ": empty list item", e.line);
    try {
      out.push_back(parse_quantity(item, dim));
    } catch (const ConfigError& err) {
      throw ConfigError("[" + section + "] " + key + ": " + err.what(), e.line);
    }
  }
  return out;
}

long long KeyValueDocument::get_integer(const std::string& section, const std::string& key) const {
  const auto& e = entry(section, key);
  long long v = 0;
  auto [ptr, ec] = std::from_chars(e.value.data(), e.value.data() + e.value.size(), v);
  if (ec != std::errc() || ptr != e.value.data() + e.value.size())
    throw ConfigError("[" + section + "] " + key + ": expected an integer, got '" + e.value + "'", e.line);
  return v;
}

long long KeyValueDocument::get_integer_or(const std::string& section, const std::string& key,
                                           long long fallback) const {
  return has(section, key) ? get_integer(section, key) : fallback;
}

void KeyValueDocument::reject_unused(const std::vector<std::string>& known_sections) const {
  for (const auto& [name, section] : sections_) {
    if (name.empty() && section.entries.empty()) continue;
    const bool known = std::find(known_sections.begin(), known_sections.end(), name) != known_sections.end();
    if (!known) throw ConfigError("unknown section [" + name + "]", section.line);
    for (const auto& [key, e] : section.entries)
      if (!e.used) throw ConfigError("unknown key '" + key + "' in section [" + name + "]", e.line);
  }
}

void KeyValueDocument::reject_unknown(const std::map<std::string, std::vector<std::string>>& schema) const {
  int first_line = std::numeric_limits<int>::max();
  std::string message;
  auto consider = [&](int line, std::string text) {
    if (line < first_line) {
      first_line = line;
      message = std::move(text);
    }
  };
  for (const auto& [name, section] : sections_) {
    if (name.empty() && section.entries.empty()) continue;
    const auto known = schema.find(name);
    if (known == schema.end()) {
      consider(section.line, "unknown section [" + name + "]");
      continue;
    }
    for (const auto& [key, e] : section.entries)
      if (std::find(known->second.begin(), known->second.end(), key) == known->second.end())
        consider(e.line, "unknown key '" + key + "' in section [" + name + "]");
  }
  if (!message.empty()) throw ConfigError(message, first_line);
}

std::string KeyValueDocument::canonical() const {
  std::string out;
  for (const auto& [name, section] : sections_)
    for (const auto& [key, e] : section.entries) out += name + "." + key + "=" + e.value + "\n";
  return out;
}

std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  char buf[17];
  static constexpr char kHex[] = "0123456789abcdef";
  for (int i = 15; i >= 0; --i) {
    buf[i] = kHex[h & 0xF];
    h >>= 4;
  }
  buf[16] = '\0';
  return buf;
}

}  // namespace spdc
