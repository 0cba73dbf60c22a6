// Copyright 2026 The agentee Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>

#include "agentee/bytes.hpp"
#include "agentee/measurement.hpp"
#include "agentee/stream.hpp"

namespace agentee {

// Secrets a realm refuses to start without. Each kind may only be placed
// into the realm role that consumes it.
enum class AssetKind : uint8_t {
  system_prompt = 1,   // agent
  model_config = 2,    // model
  tool_credential = 3, // tool
  agent_policy = 4,    // agent
};

const char* asset_kind_name(AssetKind kind);
bool asset_allowed_for_role(AssetKind kind, RealmRole role);

// Owner provisioning over a unix stream socket, length-framed messages.
//
//   M1  owner->realm  ["POV1", nonce16, epk_o, sig]
//         sig = ed25519(owner_sk, "agentee/prov/m1" || nonce || epk_o)
//   M2  realm->owner  ["POV2", epk_r, token]     token nonce = owner nonce
//   M3  owner->realm  ["POV3", hmac(confirm_key, transcript)]
//
// The realm only talks to a holder of the pinned owner signing key; the
// owner only delivers to a realm whose token carries the expected
// measurement and answers the fresh challenge. With
//   transcript = sha256(m1 || m2)
//   okm = hkdf-sha256(x25519 shared, salt=transcript,
//                     info="agentee/prov/v1", 96)
// records after M3 travel sealed under okm[0..32) (owner->realm) or
// okm[32..64) (realm->owner): message body = chacha20-poly1305 ciphertext,
// nonce = 0:u32 || counter:u64be per direction, associated data = transcript.
//
// Sealed plaintext records:
//   ["ASET", kind:u8, body]   ->  ["ACK", kind:u8, sha256(body)]
//   ["DONE"]                  ->  ["DFIN"]

struct OwnerConfig {
  Bytes owner_sign_sk;
  Bytes owner_sign_pk;
  Bytes platform_verify_pk;
  Bytes expected_measurement;  // of the realm being provisioned
  RealmRole role = RealmRole::agent;
  int64_t timeout_ms = 5000;
};

class OwnerSession {
 public:
  // Runs M1..M3. Throws Errc::bad_signature / Errc::measurement_mismatch /
  // Errc::nonce_mismatch / Errc::peer_token_invalid per check,
  // Errc::handshake_timeout when the realm stalls.
  static OwnerSession attach(MessageStream& stream, const OwnerConfig& cfg);

  // Sends one sealed asset and waits for its digest ack.
  // Throws Errc::role_asset_mismatch before anything leaves the owner,
  // Errc::ack_digest_mismatch when the realm acknowledges different bytes.
  void send_asset(AssetKind kind, ByteView body);

  // Sends DONE and waits for DFIN.
  void finish();

 private:
  OwnerSession(MessageStream* stream, RealmRole role, Bytes key_send,
               Bytes key_recv, Bytes transcript, int64_t timeout_ms)
      : stream_(stream),
        role_(role),
        key_send_(std::move(key_send)),
        key_recv_(std::move(key_recv)),
        transcript_(std::move(transcript)),
        timeout_ms_(timeout_ms) {}

  Bytes sealed_roundtrip(const std::vector<Bytes>& fields);

  MessageStream* stream_;
  RealmRole role_;
  Bytes key_send_;
  Bytes key_recv_;
  Bytes transcript_;
  uint64_t send_counter_ = 0;
  uint64_t recv_counter_ = 0;
  int64_t timeout_ms_;
};

struct RealmProvisionConfig {
  Bytes owner_verify_pk;
  Bytes platform_sign_sk;
  Bytes platform_sign_pk;
  Bytes own_measurement;
  RealmRole role = RealmRole::agent;
  int64_t timeout_ms = 5000;
};

struct ProvisionedAssets {
  std::map<AssetKind, Bytes> by_kind;

  bool has(AssetKind kind) const { return by_kind.count(kind) != 0; }
  // Throws Errc::not_provisioned when absent.
  const Bytes& get(AssetKind kind) const;
};

// Realm side: answers one owner connection until DONE and returns the
// delivered assets. Throws Errc::session_not_verified when a record
// arrives before the handshake completes, Errc::role_asset_mismatch when
// an asset kind does not belong in this role.
ProvisionedAssets provision_serve(MessageStream& stream,
                                  const RealmProvisionConfig& cfg);

}  // namespace agentee
