// Copyright 2026 The agentee Authors
// SPDX-License-Identifier: Apache-2.0

#include "agentee/errors.hpp"

#include <array>
#include <utility>

namespace agentee {

namespace {

constexpr std::array<std::pair<Errc, const char*>, 43> kNames{{
    {Errc::config, "config"},
    {Errc::io, "io"},
    {Errc::protocol, "protocol"},
    {Errc::spawn_failure, "spawn-failure"},
    {Errc::region_allocation_failure, "region-allocation-failure"},
    {Errc::dead_realm, "dead-realm"},
    {Errc::timeout, "timeout"},
    {Errc::realm_crashed, "realm-crashed"},
    {Errc::layout_overflow, "layout-overflow"},
    {Errc::header_version_mismatch, "header-version-mismatch"},
    {Errc::peer_closed, "peer-closed"},
    {Errc::oversized_message, "oversized-message"},
    {Errc::corrupt_frame, "corrupt-frame"},
    {Errc::bad_nonce_length, "bad-nonce-length"},
    {Errc::bad_signature, "bad-signature"},
    {Errc::measurement_mismatch, "measurement-mismatch"},
    {Errc::nonce_mismatch, "nonce-mismatch"},
    {Errc::role_asset_mismatch, "role-asset-mismatch"},
    {Errc::session_not_verified, "session-not-verified"},
    {Errc::ack_digest_mismatch, "ack-digest-mismatch"},
    {Errc::peer_token_invalid, "peer-token-invalid"},
    {Errc::key_confirm_failed, "key-confirm-failed"},
    {Errc::handshake_timeout, "handshake-timeout"},
    {Errc::auth_failed, "auth-failed"},
    {Errc::replay_or_reorder, "replay-or-reorder"},
    {Errc::session_absent, "session-absent"},
    {Errc::not_provisioned, "not-provisioned"},
    {Errc::validation, "validation"},
    {Errc::model_channel_down, "model-channel-down"},
    {Errc::inference_error, "inference-error"},
    {Errc::unknown_tool, "unknown-tool"},
    {Errc::tool_channel_down, "tool-channel-down"},
    {Errc::tool_denied, "tool-denied"},
    {Errc::bad_arguments, "bad-arguments"},
    {Errc::backend_failure, "backend-failure"},
    {Errc::engine_unreachable, "engine-unreachable"},
    {Errc::engine_error, "engine-error"},
    {Errc::pipeline_launch_failure, "pipeline-launch-failure"},
    {Errc::nonpositive_baseline, "nonpositive-baseline"},
    {Errc::empty_list, "empty-list"},
    {Errc::insufficient_configs, "insufficient-configs"},
    {Errc::region_unmappable, "region-unmappable"},
    {Errc::pipeline_not_ready, "pipeline-not-ready"},
}};

}  // namespace

const char* errc_name(Errc code) {
  for (const auto& [c, name] : kNames) {
    if (c == code) return name;
  }
  return "unknown";
}

Errc errc_from_name(const std::string& name) {
  for (const auto& [c, n] : kNames) {
    if (name == n) return c;
  }
  throw Error(Errc::protocol, "unknown error name: " + name);
}

Error::Error(Errc code, const std::string& what)
    : std::runtime_error(std::string(errc_name(code)) + ": " + what),
      code_(code) {}

void raise(Errc code, const std::string& what) { throw Error(code, what); }

}  // namespace agentee
