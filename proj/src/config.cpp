#include "pvf/config.hpp"

#include "pvf/error.hpp"
#include "pvf/io.hpp"

#include <algorithm>

namespace pvf {

namespace {

std::string strip_comment(std::string_view line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) quoted = !quoted;
    if (line[i] == '#' && !quoted) return std::string(line.substr(0, i));
  }
  return std::string(line);
}

std::string unquote(std::string_view raw, const std::string& key) {
  raw = trim(raw);
  if (raw.size() < 2 || raw.front() != '"' || raw.back() != '"') {
    throw ValidationError("config key '" + key + "' expects a quoted string");
  }
  std::string out;
  for (std::size_t i = 1; i + 1 < raw.size(); ++i) {
    if (raw[i] == '\\' && i + 2 < raw.size()) ++i;
    out.push_back(raw[i]);
  }
  return out;
}

std::vector<std::string> array_items(std::string_view raw, const std::string& key) {
  raw = trim(raw);
  if (raw.size() < 2 || raw.front() != '[' || raw.back() != ']') {
    throw ValidationError("config key '" + key + "' expects an array");
  }
  raw = trim(raw.substr(1, raw.size() - 2));
  std::vector<std::string> items;
  if (raw.empty()) return items;
  bool quoted = false;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= raw.size(); ++i) {
    if (i < raw.size() && raw[i] == '"' && (i == 0 || raw[i - 1] != '\\')) quoted = !quoted;
    if (i == raw.size() || (raw[i] == ',' && !quoted)) {
      const auto item = trim(raw.substr(start, i - start));
      if (!item.empty()) items.emplace_back(item);
      start = i + 1;
    }
  }
  return items;
}

double to_double(std::string_view raw, const std::string& key) {
  double value = 0;
  if (!parse_double(raw, value)) throw ValidationError("config key '" + key + "' expects a number");
  return value;
}

std::int64_t to_int(std::string_view raw, const std::string& key) {
  const double value = to_double(raw, key);
  const auto whole = static_cast<std::int64_t>(value);
  if (static_cast<double>(whole) != value) throw ValidationError("config key '" + key + "' expects an integer");
  return whole;
}

}  // namespace

void ConfigSection::set(const std::string& key, std::string raw) {
  if (!values_.emplace(key, std::move(raw)).second) {
    throw ValidationError("duplicate config key '" + key + "' in [" + name_ + "]");
  }
}

void ConfigSection::require_known(std::initializer_list<std::string_view> allowed) const {
  for (const auto& [key, value] : values_) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ValidationError("unknown config key '" + key + "' in [" + name_ + "]");
    }
  }
}

const std::string* ConfigSection::find(const std::string& key) const {
  const auto it = values_.find(key);
  return it == values_.end() ? nullptr : &it->second;
}

double ConfigSection::get_double(const std::string& key, double fallback) const {
  const auto* raw = find(key);
  return raw ? to_double(*raw, key) : fallback;
}

std::int64_t ConfigSection::get_int(const std::string& key, std::int64_t fallback) const {
  const auto* raw = find(key);
  return raw ? to_int(*raw, key) : fallback;
}

bool ConfigSection::get_bool(const std::string& key, bool fallback) const {
  const auto* raw = find(key);
  if (!raw) return fallback;
  if (*raw == "true") return true;
  if (*raw == "false") return false;
  throw ValidationError("config key '" + key + "' expects true or false");
}

std::string ConfigSection::get_string(const std::string& key, const std::string& fallback) const {
  const auto* raw = find(key);
  return raw ? unquote(*raw, key) : fallback;
}

std::vector<double> ConfigSection::get_doubles(const std::string& key,
                                               const std::vector<double>& fallback) const {
  const auto* raw = find(key);
  if (!raw) return fallback;
  std::vector<double> out;
  for (const auto& item : array_items(*raw, key)) out.push_back(to_double(item, key));
  return out;
}

std::vector<std::int64_t> ConfigSection::get_ints(const std::string& key,
                                                  const std::vector<std::int64_t>& fallback) const {
  const auto* raw = find(key);
  if (!raw) return fallback;
  std::vector<std::int64_t> out;
  for (const auto& item : array_items(*raw, key)) out.push_back(to_int(item, key));
  return out;
}

std::vector<std::string> ConfigSection::get_strings(const std::string& key,
                                                    const std::vector<std::string>& fallback) const {
  const auto* raw = find(key);
  if (!raw) return fallback;
  std::vector<std::string> out;
  for (const auto& item : array_items(*raw, key)) out.push_back(unquote(item, key));
  return out;
}

Config Config::parse(std::string_view text) {
  Config config;
  std::string current;
  config.sections_.emplace(current, ConfigSection(current));
  std::size_t line_no = 0;
  while (!text.empty()) {
    const auto end = text.find('\n');
    const auto line = text.substr(0, end);
    text = end == std::string_view::npos ? std::string_view{} : text.substr(end + 1);
    ++line_no;
    const std::string stripped = strip_comment(line);
    const auto body = trim(stripped);
    if (body.empty()) continue;
    if (body.front() == '[' && body.back() == ']') {
      current = std::string(trim(body.substr(1, body.size() - 2)));
      if (current.empty()) throw ValidationError("empty section name at line " + std::to_string(line_no));
      config.sections_.try_emplace(current, ConfigSection(current));
      continue;
    }
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw ValidationError("malformed config line " + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = trim(body.substr(0, eq));
    const auto value = trim(body.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ValidationError("malformed config line " + std::to_string(line_no));
    }
    if (current.empty()) {
      throw ValidationError("config line " + std::to_string(line_no) + " sets a key outside any [section]");
    }
    config.sections_.at(current).set(std::string(key), std::string(value));
  }
  return config;
}

Config Config::load(const std::filesystem::path& path) { return parse(read_file(path)); }

const ConfigSection& Config::section(const std::string& name) const {
  static const ConfigSection empty;
  const auto it = sections_.find(name);
  return it == sections_.end() ? empty : it->second;
}

void Config::require_sections(std::initializer_list<std::string_view> allowed) const {
  for (const auto& [name, section] : sections_) {
    if (name.empty()) {
      section.require_known({});
      continue;
    }
    if (std::find(allowed.begin(), allowed.end(), name) == allowed.end()) {
      throw ValidationError("unknown config section [" + name + "]");
    }
  }
}

}  // namespace pvf
