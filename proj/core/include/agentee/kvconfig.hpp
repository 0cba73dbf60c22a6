// Copyright 2026 The agentee Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace agentee {

// Flat key-value config file:
//   key = value
// '#' starts a comment line; blank lines ignored; repeated keys allowed
// and preserved in file order (used for peer blocks and scripted replies).
class KvConfig {
 public:
  static KvConfig parse(const std::string& text);
  static KvConfig load(const std::string& path);  // throws Errc::io

  bool has(const std::string& key) const;
  // First value for key; throws Errc::config if absent.
  const std::string& get(const std::string& key) const;
  std::string get_or(const std::string& key, const std::string& fallback) const;
  int64_t get_int(const std::string& key) const;
  int64_t get_int_or(const std::string& key, int64_t fallback) const;
  double get_double(const std::string& key) const;
  // All values for key, file order.
  std::vector<std::string> get_all(const std::string& key) const;

  const std::vector<std::pair<std::string, std::string>>& entries() const {
    return entries_;
  }

  void set(const std::string& key, const std::string& value);
  std::string serialize() const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
};

}  // namespace agentee
