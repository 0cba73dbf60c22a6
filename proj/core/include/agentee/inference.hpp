// Copyright 2026 The agentee Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>
#include <vector>

#include "agentee/bytes.hpp"
#include "agentee/kvconfig.hpp"

namespace agentee {

// Model worker configuration (provisioned secret in attested mode):
//   backend           mock | timed-mock | external
//   model_name        label used in benchmark records
//   per_token_delay_ms   timed-mock decode cost per token
//   engine_endpoint   unix socket path of an external engine
//   reply             scripted output, repeatable; consumed in request order
struct ModelConfig {
  std::string backend = "mock";
  std::string model_name = "mock";
  double per_token_delay_ms = 0.0;
  std::string engine_endpoint;
  std::vector<std::string> scripted;

  static ModelConfig parse(const std::string& text);
  static ModelConfig from_kv(const KvConfig& kv);
};

struct InferOutput {
  std::string output;
  double seconds = 0.0;  // decode span, measured inside the backend
};

// Deterministic stand-in for a decoder: token i is the first six hex chars
// of sha256(prompt_bytes || i:u64be); output joins min(max_tokens, 32)
// tokens with single spaces. Identical prompts give identical outputs.
std::string mock_generate(ByteView prompt_bytes, int max_tokens);

class InferenceBackend {
 public:
  virtual ~InferenceBackend() = default;
  // Throws Errc::backend_failure / Errc::engine_unreachable /
  // Errc::engine_error.
  virtual InferOutput generate(ByteView prompt_bytes, int max_tokens) = 0;
  virtual const std::string& model_name() const = 0;
};

// Throws Errc::config for an unknown backend string,
// Errc::engine_unreachable when an external engine cannot be reached.
std::unique_ptr<InferenceBackend> make_backend(const ModelConfig& config);

}  // namespace agentee
