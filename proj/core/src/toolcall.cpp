// Copyright 2026 The agentee Authors
// SPDX-License-Identifier: Apache-2.0

#include "agentee/toolcall.hpp"

#include <cctype>

#include "agentee/errors.hpp"

namespace agentee {

namespace {

constexpr std::string_view kPrefix = "TOOL:";

bool name_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-';
}

bool key_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
}

std::string trim(const std::string& s) {
  size_t b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  size_t e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

}  // namespace

ToolCall parse_tool_directive(const std::string& line) {
  if (line.rfind(kPrefix, 0) != 0)
    raise(Errc::bad_arguments, "directive must start with TOOL:");
  size_t pos = kPrefix.size();
  size_t name_end = pos;
  while (name_end < line.size() && name_char(line[name_end])) ++name_end;
  if (name_end == pos)
    raise(Errc::bad_arguments, "directive has no tool name");
  ToolCall call;
  call.name = line.substr(pos, name_end - pos);
  if (name_end >= line.size() || line[name_end] != ':')
    raise(Errc::bad_arguments, "directive missing ':' after tool name");
  size_t body = name_end + 1;
  if (body >= line.size() || line[body] != '{' || line.back() != '}')
    raise(Errc::bad_arguments, "directive arguments must be {...}");
  std::string inner = line.substr(body + 1, line.size() - body - 2);
  if (trim(inner).empty()) return call;

  size_t start = 0;
  for (;;) {
    size_t comma = inner.find(',', start);
    std::string pair = inner.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start);
    size_t colon = pair.find(':');
    if (colon == std::string::npos)
      raise(Errc::bad_arguments, "argument missing ':': " + pair);
    std::string key = trim(pair.substr(0, colon));
    std::string value = trim(pair.substr(colon + 1));
    if (key.empty())
      raise(Errc::bad_arguments, "argument has empty key");
    for (char c : key)
      if (!key_char(c))
        raise(Errc::bad_arguments, "bad argument key: " + key);
    call.args.emplace_back(std::move(key), std::move(value));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return call;
}

std::optional<ToolCall> find_tool_directive(const std::string& output) {
  size_t start = 0;
  while (start <= output.size()) {
    size_t nl = output.find('\n', start);
    std::string line = output.substr(
        start, nl == std::string::npos ? std::string::npos : nl - start);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind(kPrefix, 0) == 0) return parse_tool_directive(line);
    if (nl == std::string::npos) break;
    start = nl + 1;
  }
  return std::nullopt;
}

Bytes encode_tool_request(const ToolCall& call) {
  std::vector<Bytes> fields;
  fields.reserve(2 + call.args.size() * 2);
  fields.push_back(to_bytes("CALL"));
  fields.push_back(to_bytes(call.name));
  for (const auto& [k, v] : call.args) {
    fields.push_back(to_bytes(k));
    fields.push_back(to_bytes(v));
  }
  return encode_fields(fields);
}

ToolCall decode_tool_request(ByteView body) {
  std::vector<Bytes> fields = decode_fields(body);
  if (fields.size() < 2 || field_tag(fields) != "CALL" ||
      (fields.size() - 2) % 2 != 0)
    raise(Errc::protocol, "malformed tool request");
  ToolCall call;
  call.name = to_string(fields[1]);
  for (size_t i = 2; i + 1 < fields.size(); i += 2)
    call.args.emplace_back(to_string(fields[i]), to_string(fields[i + 1]));
  return call;
}

}  // namespace agentee
