#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "spdc/units.hpp"

namespace spdc {

/// One `key = value` entry with the line it came from.
struct KeyValueEntry {
  std::string value;
  int line = 0;
  mutable bool used = false;
};

/// INI-style document: `[section]` headers, `key = value` lines, `#` or `;`
/// comments. Keys outside any section live in section "".
///
/// Lookups mark entries as used so that `reject_unused()` can flag unknown
/// keys after a schema has consumed everything it understands.
class KeyValueDocument {
 public:
  static KeyValueDocument parse(std::string_view text);
  static KeyValueDocument load(const std::string& path);

  bool has_section(const std::string& section) const;
  bool has(const std::string& section, const std::string& key) const;

  const KeyValueEntry& entry(const std::string& section, const std::string& key) const;
  std::string get_string(const std::string& section, const std::string& key) const;
  std::optional<std::string> find_string(const std::string& section, const std::string& key) const;

  double get_quantity(const std::string& section, const std::string& key, Dimension dim) const;
  double get_quantity_or(const std::string& section, const std::string& key, Dimension dim,
                         double fallback) const;
  std::vector<double> get_list(const std::string& section, const std::string& key, Dimension dim) const;
  long long get_integer(const std::string& section, const std::string& key) const;
  long long get_integer_or(const std::string& section, const std::string& key, long long fallback) const;

  /// Throws ConfigError on the first section or key never looked up.
  void reject_unused(const std::vector<std::string>& known_sections) const;

  /// Throws ConfigError on the first section or key absent from `schema`
  /// (section name -> accepted keys), in document order.
  void reject_unknown(const std::map<std::string, std::vector<std::string>>& schema) const;

  /// Canonical `section.key=value` lines, sorted, used for config hashing.
  std::string canonical() const;

 private:
  struct Section {
    int line = 0;
    std::map<std::string, KeyValueEntry> entries;
  };
  std::map<std::string, Section> sections_;
};

/// FNV-1a 64-bit hash rendered as 16 hex digits.
std::string fnv1a_hex(std::string_view data);

}  // namespace spdc
