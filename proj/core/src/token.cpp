// Copyright 2026 The agentee Authors
// SPDX-License-Identifier: Apache-2.0

#include "agentee/token.hpp"

#include "agentee/errors.hpp"

namespace agentee {

Bytes platform_id_of(ByteView platform_pk) {
  crypto::Hash h = crypto::sha256(platform_pk);
  return Bytes(h.begin(), h.begin() + kPlatformIdSize);
}

Bytes token_issue(ByteView platform_sk, ByteView platform_pk,
                  ByteView measurement, ByteView session_pk, ByteView nonce) {
  if (nonce.size() != kTokenNonceSize)
    raise(Errc::bad_nonce_length,
          "token nonce must be 16 bytes, got " + std::to_string(nonce.size()));
  if (measurement.size() != crypto::kHashSize)
    raise(Errc::config, "measurement must be 32 bytes");
  if (session_pk.size() != crypto::kKxKeySize)
    raise(Errc::config, "session key must be 32 bytes");

  Bytes token;
  token.reserve(kTokenSize);
  token.insert(token.end(), measurement.begin(), measurement.end());
  token.insert(token.end(), session_pk.begin(), session_pk.end());
  token.insert(token.end(), nonce.begin(), nonce.end());
  Bytes pid = platform_id_of(platform_pk);
  token.insert(token.end(), pid.begin(), pid.end());

  Bytes sig = crypto::sign_detached(
      platform_sk, ByteView(token.data(), kTokenSignedSize));
  token.insert(token.end(), sig.begin(), sig.end());
  return token;
}

AttestationToken token_parse(ByteView token) {
  if (token.size() != kTokenSize)
    raise(Errc::peer_token_invalid,
          "token must be 152 bytes, got " + std::to_string(token.size()));
  AttestationToken t;
  t.measurement.assign(token.begin(), token.begin() + 32);
  t.session_pk.assign(token.begin() + 32, token.begin() + 64);
  t.nonce.assign(token.begin() + 64, token.begin() + 80);
  t.platform_id.assign(token.begin() + 80, token.begin() + 88);
  t.signature.assign(token.begin() + 88, token.begin() + 152);
  return t;
}

void token_verify(ByteView token, ByteView platform_pk,
                  ByteView expected_measurement, ByteView expected_nonce) {
  if (expected_nonce.size() != kTokenNonceSize)
    raise(Errc::bad_nonce_length, "expected nonce must be 16 bytes");
  AttestationToken t = token_parse(token);

  if (!crypto::sign_verify(platform_pk,
                           ByteView(token.data(), kTokenSignedSize),
                           t.signature))
    raise(Errc::bad_signature, "token signature does not verify");
  Bytes pid = platform_id_of(platform_pk);
  if (!crypto::constant_time_equal(t.platform_id, pid))
    raise(Errc::bad_signature, "token names a different platform");
  if (!crypto::constant_time_equal(t.measurement, expected_measurement))
    raise(Errc::measurement_mismatch,
          "realm measurement differs from expected value");
  if (!crypto::constant_time_equal(t.nonce, expected_nonce))
    raise(Errc::nonce_mismatch, "token nonce does not match challenge");
}

}  // namespace agentee
