#include "lasm/io.hpp"

#include "lasm/lattice.hpp"

#include <cerrno>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace lasm {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  for (std::size_t start = 0;;) {
    std::size_t pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

double parse_real(std::string_view token) {
  const std::string s(token);
  if (s.empty()) throw ParseError("expected a number");
  char* end = nullptr;
  errno = 0;
  double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE) throw ParseError("not a finite number: \"" + s + "\"");
  return v;
}

long parse_integer(std::string_view token) {
  const std::string s(token);
  if (s.empty()) throw ParseError("expected an integer");
  char* end = nullptr;
  errno = 0;
  long v = std::strtol(s.c_str(), &end, 10);
  if (end != s.c_str() + s.size() || errno == ERANGE) throw ParseError("not an integer: \"" + s + "\"");
  return v;
}

}  // namespace

std::string fnv1a_hex(std::string_view data) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, std::string_view data) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path);
  f << data;
  if (!f) throw std::runtime_error("write failed: " + path);
}

std::vector<double> parse_real_list(std::string_view text) {
  std::vector<double> out;
  for (auto tok : split(text, ',')) out.push_back(parse_real(tok));
  return out;
}

std::vector<int> parse_int_list(std::string_view text) {
  std::vector<int> out;
  for (auto tok : split(text, ',')) {
    long v = parse_integer(tok);
    if (v <= 0 || v > 1'000'000'000) throw ParseError("expected a positive integer: \"" + std::string(tok) + "\"");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

std::pair<int, double> parse_m_override(std::string_view text) {
  auto parts = split(text, ':');
  if (parts.size() != 2) throw ParseError("expected color:value, got \"" + std::string(text) + "\"");
  long c = parse_integer(parts[0]);
  if (c < 1) throw ParseError("colors are numbered from 1");
  return {static_cast<int>(c - 1), parse_real(parts[1])};
}

std::pair<int, int> parse_slice(std::string_view text) {
  auto parts = split(text, '=');
  if (parts.size() != 2) throw ParseError("expected axis=value, got \"" + std::string(text) + "\"");
  long a = parse_integer(parts[0]);
  if (a < 1) throw ParseError("axes are numbered from 1");
  return {static_cast<int>(a - 1), static_cast<int>(parse_integer(parts[1]))};
}

void RunManifest::add(std::string key, std::string value) {
  if (key.find(':') != std::string::npos || key.find('\n') != std::string::npos || value.find('\n') != std::string::npos)
    throw ValidationError("manifest keys and values must be single-line, keys without ':'");
  entries_.emplace_back(std::move(key), std::move(value));
}

void RunManifest::add(std::string key, double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  add(std::move(key), std::string(buf));
}

const std::string* RunManifest::get(std::string_view key) const {
  for (const auto& [k, v] : entries_)
    if (k == key) return &v;
  return nullptr;
}

std::vector<std::string> RunManifest::all(std::string_view key) const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries_)
    if (k == key) out.push_back(v);
  return out;
}

std::string RunManifest::str() const {
  std::string out;
  for (const auto& [k, v] : entries_) out += k + ": " + v + "\n";
  return out;
}

RunManifest RunManifest::parse(std::string_view text) {
  RunManifest m;
  for (auto line : split(text, '\n')) {
    if (line.empty()) continue;
    auto pos = line.find(':');
    if (pos == std::string_view::npos) throw ParseError("manifest line without ':'");
    m.entries_.emplace_back(std::string(trim(line.substr(0, pos))), std::string(trim(line.substr(pos + 1))));
  }
  return m;
}

}  // namespace lasm
