// Copyright 2026 The agentee Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "agentee/bytes.hpp"

namespace agentee {

// Role labels are structural: they travel as a byte next to the content,
// never inside it, so no content can rewrite who said what.
enum class MsgRole : uint8_t { system = 0, user = 1, assistant = 2, tool = 3 };

const char* msg_role_name(MsgRole role);

struct PromptMessage {
  MsgRole role = MsgRole::user;
  std::string content;

  bool operator==(const PromptMessage&) const = default;
};

struct LabeledPrompt {
  std::vector<PromptMessage> messages;

  bool operator==(const LabeledPrompt&) const = default;
};

// Canonical wire encoding: field list where each field is
//   role:u8 || content bytes
// This is also the hashing preimage for deterministic mock inference.
Bytes encode_prompt(const LabeledPrompt& prompt);
LabeledPrompt decode_prompt(ByteView bytes);  // throws Errc::corrupt_frame

// Content escaping for text renderings: any line that could read as a role
// label ("system:", "user:", assistant/tool/role variants, optionally
// already quoted) gains one leading '>'. unescape_content removes exactly
// one, so escape/unescape round-trip losslessly.
std::string escape_content(const std::string& content);
std::string unescape_content(const std::string& content);

// Human-readable rendering with escaped content, one "role: ..." block per
// message. Safe to parse back by label because escaping keeps content
// lines from ever starting with a bare label.
std::string render_prompt(const LabeledPrompt& prompt);

}  // namespace agentee
