// Copyright 2026 The agentee Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "agentee/errors.hpp"
#include "agentee/inference.hpp"
#include "agentee/kvconfig.hpp"
#include "agentee/prompt.hpp"
#include "agentee/toolcall.hpp"

namespace agentee {

// Inference request over a model channel:
//   ["INFR", canonical prompt bytes, max_tokens:u32be]
// answered by
//   ["IRES", output utf8, decode_micros:u64be]   or
//   ["IERR", error name, message]
struct InferRequest {
  Bytes prompt;
  int max_tokens = 0;
};

Bytes encode_infer_request(ByteView prompt_bytes, int max_tokens);
InferRequest decode_infer_request(ByteView body);
Bytes encode_infer_response(const std::string& output, double seconds);
// Throws the carried error for ["IERR", ...] replies.
InferOutput decode_infer_response(ByteView body);

// Tool replies: ["TRES", output] or ["TERR", error name, message].
Bytes encode_tool_response(const std::string& output);
std::string decode_tool_response(ByteView body);  // throws carried error

// Generic error reply body under the given tag.
Bytes encode_error_reply(const std::string& tag, Errc code,
                         const std::string& message);

// How the agent reaches its model / tool realm. Implementations differ by
// isolation mode: direct call, plain ring frames, or sealed ring frames.
class ModelPort {
 public:
  virtual ~ModelPort() = default;
  virtual InferOutput infer(ByteView prompt_bytes, int max_tokens) = 0;
};

class ToolPort {
 public:
  virtual ~ToolPort() = default;
  virtual std::string call(const ToolCall& call) = 0;
};

enum class AgentKind { chatbot, itinerary };

AgentKind agent_kind_from_name(const std::string& name);  // Errc::config
const char* agent_kind_name(AgentKind kind);

// Per-agent limits, provisioned alongside the system prompt:
//   max_tokens   reply budget per model call
//   tool         permitted tool name, repeatable
struct AgentPolicy {
  int max_tokens = 32;
  std::vector<std::string> tools;

  static AgentPolicy parse(const std::string& text);
  bool allows_tool(const std::string& name) const;
};

// Itinerary requests arrive as one pipe-separated row:
//   destination|days|budget|interests|constraints
// Throws Errc::validation on a malformed row. The returned block renders
// the request as fixed-order labeled lines.
std::string build_itinerary_request(const std::string& row);

struct TurnResult {
  std::string reply;
  double inference_seconds = 0.0;  // sum of backend-reported decode spans
  int model_calls = 0;
  int tool_calls = 0;
};

// The agent runtime proper: prompt assembly, bounded history, directive
// handling and tool dispatch policy. Transport-free; everything effectful
// goes through the injected ports.
class AgentCore {
 public:
  AgentCore(AgentKind kind, std::string system_prompt, AgentPolicy policy,
            ModelPort& model, ToolPort* tool);

  // One user turn. Chatbot: single model call with rolling history.
  // Itinerary: structured request, at most one tool directive honored via
  // a second model call; tool exchanges are not persisted.
  // Throws Errc::validation, Errc::unknown_tool, Errc::model_channel_down,
  // Errc::tool_channel_down, Errc::inference_error, tool errors.
  TurnResult run_turn(const std::string& user_input);

  void reset_history() { history_.clear(); }
  const std::vector<PromptMessage>& history() const { return history_; }

  static constexpr size_t kHistoryLimit = 16;

 private:
  InferOutput call_model(const LabeledPrompt& prompt, TurnResult& result);
  TurnResult run_chat_turn(const std::string& user_input);
  TurnResult run_itinerary_turn(const std::string& user_input);

  AgentKind kind_;
  std::string system_prompt_;
  AgentPolicy policy_;
  ModelPort& model_;
  ToolPort* tool_;
  std::vector<PromptMessage> history_;
};

}  // namespace agentee
