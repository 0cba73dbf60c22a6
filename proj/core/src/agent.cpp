// Copyright 2026 The agentee Authors
// SPDX-License-Identifier: Apache-2.0

#include "agentee/agent.hpp"

#include <algorithm>
#include <cstdlib>
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

Bytes encode_infer_request(ByteView prompt_bytes, int max_tokens) {
  Bytes mt;
  put_be32(mt, static_cast<uint32_t>(max_tokens));
  return encode_fields(
      {to_bytes("INFR"), Bytes(prompt_bytes.begin(), prompt_bytes.end()), mt});
}

InferRequest decode_infer_request(ByteView body) {
  std::vector<Bytes> f = decode_fields(body);
  if (f.size() != 3 || field_tag(f) != "INFR" || f[2].size() != 4)
    raise(Errc::protocol, "malformed inference request");
  InferRequest req;
  req.prompt = f[1];
  req.max_tokens = static_cast<int>(get_be32(f[2].data()));
  return req;
}

Bytes encode_infer_response(const std::string& output, double seconds) {
  Bytes us;
  put_be64(us, static_cast<uint64_t>(seconds * 1e6));
  return encode_fields({to_bytes("IRES"), to_bytes(output), us});
}

Bytes encode_error_reply(const std::string& tag, Errc code,
                         const std::string& message) {
  return encode_fields(
      {to_bytes(tag), to_bytes(errc_name(code)), to_bytes(message)});
}

InferOutput decode_infer_response(ByteView body) {
  std::vector<Bytes> f = decode_fields(body);
  std::string tag = field_tag(f);
  if (tag == "IERR" && f.size() == 3)
    throw Error(errc_from_name(to_string(f[1])), to_string(f[2]));
  if (tag != "IRES" || f.size() != 3 || f[2].size() != 8)
    raise(Errc::protocol, "malformed inference response");
  InferOutput out;
  out.output = to_string(f[1]);
  out.seconds = static_cast<double>(get_be64(f[2].data())) / 1e6;
  return out;
}

Bytes encode_tool_response(const std::string& output) {
  return encode_fields({to_bytes("TRES"), to_bytes(output)});
}

std::string decode_tool_response(ByteView body) {
  std::vector<Bytes> f = decode_fields(body);
  std::string tag = field_tag(f);
  if (tag == "TERR" && f.size() == 3)
    throw Error(errc_from_name(to_string(f[1])), to_string(f[2]));
  if (tag != "TRES" || f.size() != 2)
    raise(Errc::protocol, "malformed tool response");
  return to_string(f[1]);
}

AgentKind agent_kind_from_name(const std::string& name) {
  if (name == "chatbot") return AgentKind::chatbot;
  if (name == "itinerary") return AgentKind::itinerary;
  raise(Errc::config, "unknown agent kind: " + name);
}

const char* agent_kind_name(AgentKind kind) {
  return kind == AgentKind::chatbot ? "chatbot" : "itinerary";
}

AgentPolicy AgentPolicy::parse(const std::string& text) {
  KvConfig kv = KvConfig::parse(text);
  AgentPolicy policy;
  policy.max_tokens = static_cast<int>(kv.get_int_or("max_tokens", 32));
  if (policy.max_tokens < 1)
    raise(Errc::config, "max_tokens must be positive");
  policy.tools = kv.get_all("tool");
  return policy;
}

bool AgentPolicy::allows_tool(const std::string& name) const {
  return std::find(tools.begin(), tools.end(), name) != tools.end();
}

std::string build_itinerary_request(const std::string& row) {
  std::vector<std::string> parts;
  size_t start = 0;
  for (;;) {
    size_t bar = row.find('|', start);
    parts.push_back(trim(row.substr(
        start, bar == std::string::npos ? std::string::npos : bar - start)));
    if (bar == std::string::npos) break;
    start = bar + 1;
  }
  if (parts.size() != 5)
    raise(Errc::validation,
          "itinerary request needs destination|days|budget|interests|"
          "constraints, got " +
              std::to_string(parts.size()) + " fields");
  if (parts[0].empty())
    raise(Errc::validation, "itinerary destination must not be empty");
  char* end = nullptr;
  long days = std::strtol(parts[1].c_str(), &end, 10);
  if (end == parts[1].c_str() || *end != '\0' || days < 1)
    raise(Errc::validation, "itinerary days must be a positive integer");

  std::ostringstream out;
  out << "Destination: " << parts[0] << "\n"
      << "Days: " << parts[1] << "\n"
      << "Budget: " << parts[2] << "\n"
      << "Interests: " << parts[3] << "\n"
      << "Constraints: " << parts[4];
  return out.str();
}

AgentCore::AgentCore(AgentKind kind, std::string system_prompt,
                     AgentPolicy policy, ModelPort& model, ToolPort* tool)
    : kind_(kind),
      system_prompt_(std::move(system_prompt)),
      policy_(std::move(policy)),
      model_(model),
      tool_(tool) {}

InferOutput AgentCore::call_model(const LabeledPrompt& prompt,
                                  TurnResult& result) {
  Bytes canonical = encode_prompt(prompt);
  try {
    InferOutput out = model_.infer(canonical, policy_.max_tokens);
    result.inference_seconds += out.seconds;
    ++result.model_calls;
    return out;
  } catch (const Error& e) {
    switch (e.code()) {
      case Errc::peer_closed:
      case Errc::timeout:
        raise(Errc::model_channel_down,
              std::string("model unreachable: ") + e.what());
      case Errc::backend_failure:
      case Errc::engine_unreachable:
      case Errc::engine_error:
        raise(Errc::inference_error, e.what());
      default:
        throw;
    }
  }
}

TurnResult AgentCore::run_turn(const std::string& user_input) {
  if (trim(user_input).empty())
    raise(Errc::validation, "empty user input");
  return kind_ == AgentKind::chatbot ? run_chat_turn(user_input)
                                     : run_itinerary_turn(user_input);
}

TurnResult AgentCore::run_chat_turn(const std::string& user_input) {
  TurnResult result;
  LabeledPrompt prompt;
  prompt.messages.push_back({MsgRole::system, system_prompt_});
  prompt.messages.insert(prompt.messages.end(), history_.begin(),
                         history_.end());
  prompt.messages.push_back({MsgRole::user, user_input});

  InferOutput out = call_model(prompt, result);
  result.reply = out.output;

  history_.push_back({MsgRole::user, user_input});
  history_.push_back({MsgRole::assistant, out.output});
  if (history_.size() > kHistoryLimit)
    history_.erase(history_.begin(),
                   history_.begin() + (history_.size() - kHistoryLimit));
  return result;
}

TurnResult AgentCore::run_itinerary_turn(const std::string& user_input) {
  TurnResult result;
  std::string request = build_itinerary_request(user_input);

  LabeledPrompt prompt;
  prompt.messages.push_back({MsgRole::system, system_prompt_});
  prompt.messages.push_back({MsgRole::user, request});

  InferOutput first = call_model(prompt, result);
  std::optional<ToolCall> directive = find_tool_directive(first.output);
  if (!directive) {
    result.reply = first.output;
    return result;
  }

  // Policy gate before anything reaches the tool realm.
  if (!policy_.allows_tool(directive->name))
    raise(Errc::unknown_tool,
          "tool not registered for this agent: " + directive->name);
  if (tool_ == nullptr)
    raise(Errc::tool_channel_down, "no tool realm attached");

  std::string tool_output;
  try {
    tool_output = tool_->call(*directive);
  } catch (const Error& e) {
    if (e.code() == Errc::peer_closed || e.code() == Errc::timeout)
      raise(Errc::tool_channel_down,
            std::string("tool unreachable: ") + e.what());
    throw;
  }
  ++result.tool_calls;

  prompt.messages.push_back({MsgRole::assistant, first.output});
  prompt.messages.push_back({MsgRole::tool, tool_output});
  InferOutput second = call_model(prompt, result);
  result.reply = second.output;
  return result;
}

}  // namespace agentee
