// Copyright 2026 The agentee Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>

#include "agentee/bytes.hpp"
#include "agentee/crypto.hpp"

namespace agentee {

// Attestation token, 152 bytes on the wire:
//   0    measurement digest   32
//   32   session public key   32  (ephemeral X25519 key being bound)
//   64   nonce                16  (verifier challenge)
//   80   platform id           8  (first 8 bytes of SHA-256(platform pk))
//   88   signature            64  (Ed25519 over bytes 0..87)
//
// The platform signing key stands in for the hardware attestation root;
// each realm process receives the signing half at launch, verifiers hold
// the public half plus the expected measurement.

inline constexpr size_t kTokenSize = 152;
inline constexpr size_t kTokenNonceSize = 16;
inline constexpr size_t kTokenSignedSize = 88;
inline constexpr size_t kPlatformIdSize = 8;

struct AttestationToken {
  Bytes measurement;  // 32
  Bytes session_pk;   // 32
  Bytes nonce;        // 16
  Bytes platform_id;  // 8
  Bytes signature;    // 64
};

Bytes platform_id_of(ByteView platform_pk);

// Signs a token. Throws Errc::bad_nonce_length when the nonce is not 16
// bytes, Errc::config on bad key/field sizes.
Bytes token_issue(ByteView platform_sk, ByteView platform_pk,
                  ByteView measurement, ByteView session_pk, ByteView nonce);

// Parses without verifying. Throws Errc::peer_token_invalid on bad size.
AttestationToken token_parse(ByteView token);

// Full verification, failures distinguishable in this order:
//   signature      -> Errc::bad_signature
//   measurement    -> Errc::measurement_mismatch
//   nonce          -> Errc::nonce_mismatch
void token_verify(ByteView token, ByteView platform_pk,
                  ByteView expected_measurement, ByteView expected_nonce);

}  // namespace agentee
