// Copyright 2026 The agentee Authors
// SPDX-License-Identifier: Apache-2.0

#include "agentee/prompt.hpp"

#include <regex>
#include <sstream>

#include "agentee/errors.hpp"

namespace agentee {

namespace {

// Matches lines that would read as a role label, with any number of
// existing '>' quotes in front.
const std::regex& label_line_re() {
  static const std::regex re(
      R"(^(>*)[ \t]*(system|user|assistant|tool|role)[ \t]*:)",
      std::regex::icase | std::regex::optimize);
  return re;
}

template <typename Fn>
std::string map_lines(const std::string& text, Fn&& fn) {
  std::string out;
  out.reserve(text.size() + 8);
  size_t start = 0;
  for (;;) {
    size_t nl = text.find('\n', start);
    std::string line = text.substr(
        start, nl == std::string::npos ? std::string::npos : nl - start);
    out += fn(line);
    if (nl == std::string::npos) break;
    out += '\n';
    start = nl + 1;
  }
  return out;
}

}  // namespace

const char* msg_role_name(MsgRole role) {
  switch (role) {
    case MsgRole::system:
      return "system";
    case MsgRole::user:
      return "user";
    case MsgRole::assistant:
      return "assistant";
    case MsgRole::tool:
      return "tool";
  }
  return "unknown";
}

Bytes encode_prompt(const LabeledPrompt& prompt) {
  std::vector<Bytes> fields;
  fields.reserve(prompt.messages.size());
  for (const PromptMessage& m : prompt.messages) {
    Bytes f;
    f.reserve(1 + m.content.size());
    f.push_back(static_cast<uint8_t>(m.role));
    f.insert(f.end(), m.content.begin(), m.content.end());
    fields.push_back(std::move(f));
  }
  return encode_fields(fields);
}

LabeledPrompt decode_prompt(ByteView bytes) {
  std::vector<Bytes> fields = decode_fields(bytes);
  LabeledPrompt prompt;
  prompt.messages.reserve(fields.size());
  for (const Bytes& f : fields) {
    if (f.empty()) raise(Errc::corrupt_frame, "empty prompt message");
    if (f[0] > static_cast<uint8_t>(MsgRole::tool))
      raise(Errc::corrupt_frame,
            "bad prompt role byte: " + std::to_string(f[0]));
    PromptMessage m;
    m.role = static_cast<MsgRole>(f[0]);
    m.content.assign(f.begin() + 1, f.end());
    prompt.messages.push_back(std::move(m));
  }
  return prompt;
}

std::string escape_content(const std::string& content) {
  return map_lines(content, [](const std::string& line) {
    return std::regex_search(line, label_line_re()) ? ">" + line : line;
  });
}

std::string unescape_content(const std::string& content) {
  return map_lines(content, [](const std::string& line) {
    if (!line.empty() && line[0] == '>' &&
        std::regex_search(line.substr(1), label_line_re()))
      return line.substr(1);
    return line;
  });
}

std::string render_prompt(const LabeledPrompt& prompt) {
  std::ostringstream out;
  for (const PromptMessage& m : prompt.messages)
    out << msg_role_name(m.role) << ": " << escape_content(m.content) << "\n";
  return out.str();
}

}  // namespace agentee
