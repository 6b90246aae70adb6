#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace lasm {

/// 64-bit FNV-1a of `data` as 16 lowercase hex digits.
std::string fnv1a_hex(std::string_view data);

/// Whole file; std::runtime_error when it cannot be opened.
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view data);

/// Comma-separated reals, scientific notation allowed. Throws ParseError.
std::vector<double> parse_real_list(std::string_view text);
/// Comma-separated positive integers. Throws ParseError.
std::vector<int> parse_int_list(std::string_view text);
/// "color:value" with a 1-based color; returns the 0-based color. Throws ParseError.
std::pair<int, double> parse_m_override(std::string_view text);
/// "axis=value" with a 1-based axis; returns the 0-based axis. Throws ParseError.
std::pair<int, int> parse_slice(std::string_view text);

/// Ordered key:value lines. Keys may repeat (e.g. "output").
class RunManifest {
 public:
  void add(std::string key, std::string value);
  void add(std::string key, double value);
  /// First value stored under `key`, or nullptr.
  const std::string* get(std::string_view key) const;
  std::vector<std::string> all(std::string_view key) const;
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

  std::string str() const;
  static RunManifest parse(std::string_view text);

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace lasm
