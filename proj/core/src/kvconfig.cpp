// Copyright 2026 The agentee Authors
// SPDX-License-Identifier: Apache-2.0

#include "agentee/kvconfig.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "agentee/errors.hpp"

namespace agentee {

namespace {

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

KvConfig KvConfig::parse(const std::string& text) {
  KvConfig cfg;
  std::istringstream in(text);
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    size_t eq = t.find('=');
    if (eq == std::string::npos)
      raise(Errc::config, "line " + std::to_string(lineno) + ": missing '='");
    std::string key = trim(t.substr(0, eq));
    std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      raise(Errc::config, "line " + std::to_string(lineno) + ": empty key");
    cfg.entries_.emplace_back(std::move(key), std::move(value));
  }
  return cfg;
}

KvConfig KvConfig::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::io, "cannot open config: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

bool KvConfig::has(const std::string& key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return true;
  }
  return false;
}

const std::string& KvConfig::get(const std::string& key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return v;
  }
  raise(Errc::config, "missing key: " + key);
}

std::string KvConfig::get_or(const std::string& key,
                             const std::string& fallback) const {
  return has(key) ? get(key) : fallback;
}

int64_t KvConfig::get_int(const std::string& key) const {
  const std::string& v = get(key);
  char* end = nullptr;
  long long n = std::strtoll(v.c_str(), &end, 10);
  if (end == v.c_str() || *end != '\0')
    raise(Errc::config, "key " + key + ": not an integer: " + v);
  return n;
}

int64_t KvConfig::get_int_or(const std::string& key, int64_t fallback) const {
  return has(key) ? get_int(key) : fallback;
}

double KvConfig::get_double(const std::string& key) const {
  const std::string& v = get(key);
  char* end = nullptr;
  double d = std::strtod(v.c_str(), &end);
  if (end == v.c_str() || *end != '\0')
    raise(Errc::config, "key " + key + ": not a number: " + v);
  return d;
}

std::vector<std::string> KvConfig::get_all(const std::string& key) const {
  std::vector<std::string> out;
  for (const auto& [k, v] : entries_) {
    if (k == key) out.push_back(v);
  }
  return out;
}

void KvConfig::set(const std::string& key, const std::string& value) {
  entries_.emplace_back(key, value);
}

std::string KvConfig::serialize() const {
  std::ostringstream out;
  for (const auto& [k, v] : entries_) out << k << " = " << v << "\n";
  return out.str();
}

}  // namespace agentee
