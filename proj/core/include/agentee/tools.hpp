// Copyright 2026 The agentee Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "agentee/toolcall.hpp"

namespace agentee {

// Currency conversion table: (from, to) -> rate. File format is one
// "FROM<TAB>TO<TAB>RATE" triple per line, '#' comments allowed.
using RateTable = std::map<std::pair<std::string, std::string>, double>;

RateTable parse_rates(const std::string& text);   // throws Errc::config
RateTable load_rates(const std::string& path);    // throws Errc::io

// Tool service core: a fixed set of built-in tools behind deny-by-default
// dispatch. Tools that act on behalf of the owner (currency, weather)
// refuse to run without the provisioned credential.
class ToolRegistry {
 public:
  ToolRegistry() = default;

  void set_credential(std::string credential);
  void set_rates(RateTable rates);

  // Names of the built-in tools: echo-args, currency-mock, weather-mock.
  static std::vector<std::string> builtin_names();

  // Dispatches one call. Throws Errc::unknown_tool, Errc::tool_denied,
  // Errc::bad_arguments.
  std::string call(const ToolCall& call);

  // Successful dispatches so far.
  uint64_t calls_served() const { return calls_served_; }

 private:
  std::string run_echo_args(const ToolCall& call);
  std::string run_currency(const ToolCall& call);
  std::string run_weather(const ToolCall& call);
  void require_credential(const std::string& tool);

  std::string credential_;
  RateTable rates_;
  uint64_t calls_served_ = 0;
};

}  // namespace agentee
