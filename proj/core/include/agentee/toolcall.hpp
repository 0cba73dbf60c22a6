// Copyright 2026 The agentee Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "agentee/bytes.hpp"

namespace agentee {

// A model asks for a tool with a single directive line:
//   TOOL:<name>:{key:value,key:value}
// Names are [a-z0-9-]+, keys [a-z0-9_]+, values any run without ',' or '}'.
// Whitespace around keys and values is trimmed; {} passes no arguments.
struct ToolCall {
  std::string name;
  std::vector<std::pair<std::string, std::string>> args;

  bool operator==(const ToolCall&) const = default;
};

// Parses one directive line (without trailing newline).
// Throws Errc::bad_arguments on malformed syntax.
ToolCall parse_tool_directive(const std::string& line);

// Scans model output for the first line starting with "TOOL:". Returns
// nullopt when no directive is present; malformed directives throw.
std::optional<ToolCall> find_tool_directive(const std::string& output);

// Channel encoding of a call request:
//   ["CALL", name, key, value, key, value, ...]
Bytes encode_tool_request(const ToolCall& call);
ToolCall decode_tool_request(ByteView body);  // throws Errc::protocol

}  // namespace agentee
