#pragma once

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pvf {

/// One `[name]` block of a config file. Values are kept as written and parsed
/// on access, so type errors name the offending key.
class ConfigSection {
 public:
  ConfigSection() = default;
  explicit ConfigSection(std::string name) : name_(std::move(name)) {}

  const std::string& name() const { return name_; }
  bool has(const std::string& key) const { return values_.contains(key); }
  void set(const std::string& key, std::string raw);

  /// Throws ValidationError naming the first key not in `allowed`.
  void require_known(std::initializer_list<std::string_view> allowed) const;

  double get_double(const std::string& key, double fallback) const;
  std::int64_t get_int(const std::string& key, std::int64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::string get_string(const std::string& key, const std::string& fallback) const;
  std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
  std::vector<std::int64_t> get_ints(const std::string& key, const std::vector<std::int64_t>& fallback) const;
  std::vector<std::string> get_strings(const std::string& key, const std::vector<std::string>& fallback) const;

 private:
  const std::string* find(const std::string& key) const;

  std::string name_;
  std::map<std::string, std::string> values_;
};

/// Minimal TOML subset: `[section]` headers, `key = value` pairs, `#` comments,
/// numbers, booleans, double-quoted strings and single-line arrays.
class Config {
 public:
  static Config parse(std::string_view text);
  static Config load(const std::filesystem::path& path);

  bool has(const std::string& section) const { return sections_.contains(section); }
  /// Missing sections read as empty, so every key falls back to its default.
  const ConfigSection& section(const std::string& name) const;
  void require_sections(std::initializer_list<std::string_view> allowed) const;

 private:
  std::map<std::string, ConfigSection> sections_;
};

}  // namespace pvf
