// Copyright 2026 The agentee Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "agentee/bytes.hpp"

namespace agentee::crypto {

inline constexpr size_t kHashSize = 32;       // SHA-256
inline constexpr size_t kSignPkSize = 32;     // Ed25519 public key
inline constexpr size_t kSignSkSize = 64;     // Ed25519 secret key
inline constexpr size_t kSignatureSize = 64;  // Ed25519 signature
inline constexpr size_t kKxKeySize = 32;      // X25519 keys & shared secret
inline constexpr size_t kAeadKeySize = 32;    // ChaCha20-Poly1305-IETF
inline constexpr size_t kAeadNonceSize = 12;
inline constexpr size_t kAeadTagSize = 16;
inline constexpr size_t kMacSize = 32;  // HMAC-SHA256

using Hash = std::array<uint8_t, kHashSize>;

// Must be called once per process before any other function here.
void init();

Hash sha256(ByteView data);

Bytes hmac_sha256(ByteView key, ByteView data);

// HKDF-SHA256 (extract + expand). Output length up to 255*32 bytes.
Bytes hkdf_sha256(ByteView ikm, ByteView salt, ByteView info, size_t out_len);

struct SignKeypair {
  Bytes pk;  // kSignPkSize
  Bytes sk;  // kSignSkSize
};

SignKeypair sign_keygen();
// Deterministic keypair from a 32-byte seed (fixtures, reproducible runs).
SignKeypair sign_keygen_seed(ByteView seed32);
Bytes sign_detached(ByteView sk, ByteView msg);
bool sign_verify(ByteView pk, ByteView msg, ByteView sig);

struct KxKeypair {
  Bytes pk;  // kKxKeySize
  Bytes sk;  // kKxKeySize
};

KxKeypair kx_keygen();
// Raw X25519: scalarmult(own_sk, peer_pk). Throws Errc::key_confirm_failed
// on a degenerate shared secret.
Bytes kx_shared(ByteView own_sk, ByteView peer_pk);

// ChaCha20-Poly1305-IETF. Ciphertext carries the 16-byte tag appended.
Bytes aead_seal(ByteView key, ByteView nonce, ByteView ad, ByteView plaintext);
// Throws Errc::auth_failed when the tag does not verify.
Bytes aead_open(ByteView key, ByteView nonce, ByteView ad, ByteView ciphertext);

Bytes random_bytes(size_t n);

bool constant_time_equal(ByteView a, ByteView b);

}  // namespace agentee::crypto
