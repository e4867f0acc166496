#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace ahcrf {

/// Plain-text `key=value` settings with `#` comments. Every typed read
/// marks the key as used so callers can reject misspelled keys.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::string_view text, const std::string& source = "<config>");
  static KeyValueConfig load(const std::string& path);

  void set(const std::string& key, const std::string& value);
  void erase(const std::string& key);
  bool contains(const std::string& key) const;

  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  std::size_t get_size(const std::string& key, std::size_t fallback) const;
  std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;
  std::vector<double> get_doubles(const std::string& key) const;

  std::vector<std::string> unused_keys() const;
  const std::map<std::string, std::string>& entries() const noexcept { return entries_; }

 private:
  std::optional<std::string> lookup(const std::string& key) const;

  std::map<std::string, std::string> entries_;
  mutable std::set<std::string> used_;
};

}  // namespace ahcrf
