// Copyright 2026 The agentee Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <stdexcept>
#include <string>

namespace agentee {

// Every failure the framework can report, one code per distinguishable
// condition. Error codes double as wire strings (see errc_name).
enum class Errc {
  config,
  io,
  protocol,

  // realm host
  spawn_failure,
  region_allocation_failure,
  dead_realm,
  timeout,
  realm_crashed,

  // shared-memory transport
  layout_overflow,
  header_version_mismatch,
  peer_closed,
  oversized_message,
  corrupt_frame,

  // attestation & provisioning
  bad_nonce_length,
  bad_signature,
  measurement_mismatch,
  nonce_mismatch,
  role_asset_mismatch,
  session_not_verified,
  ack_digest_mismatch,

  // secure session
  peer_token_invalid,
  key_confirm_failed,
  handshake_timeout,
  auth_failed,
  replay_or_reorder,
  session_absent,

  // agent runtime
  not_provisioned,
  validation,
  model_channel_down,
  inference_error,
  unknown_tool,
  tool_channel_down,
  tool_denied,
  bad_arguments,

  // inference worker
  backend_failure,
  engine_unreachable,
  engine_error,

  // bench / cli
  pipeline_launch_failure,
  nonpositive_baseline,
  empty_list,
  insufficient_configs,
  region_unmappable,
  pipeline_not_ready,
};

// Stable kebab-case name, e.g. Errc::peer_closed -> "peer-closed".
const char* errc_name(Errc code);

// Reverse lookup; throws Error(Errc::protocol) for unknown names.
Errc errc_from_name(const std::string& name);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what);
  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] void raise(Errc code, const std::string& what);

}  // namespace agentee
