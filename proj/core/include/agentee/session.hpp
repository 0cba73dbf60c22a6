// Copyright 2026 The agentee Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>

#include "agentee/bytes.hpp"
#include "agentee/csm.hpp"
#include "agentee/token.hpp"

namespace agentee {

// Bidirectional message path built from one send and one recv ring.
// Channels 0 and 1 of every region form the bootstrap pair that carries
// the handshake; data channels start at 2.
struct MsgChannel {
  SendEndpoint tx;
  RecvEndpoint rx;

  void send(ByteView payload, Deadline deadline, uint8_t flags = 0) {
    tx.send(payload, deadline, flags);
  }
  RecvFrame recv(Deadline deadline) { return rx.recv(deadline); }
};

struct SessionConfig {
  Bytes platform_verify_pk;           // verifies the peer's token
  Bytes platform_sign_sk;             // issues this realm's token
  Bytes platform_sign_pk;             // public half of the signer
  Bytes own_measurement;              // 32 bytes
  Bytes expected_peer_measurement;    // 32 bytes
  int64_t timeout_ms = 5000;
};

// Mutually attested channel protection.
//
// Handshake over the bootstrap pair, three field-list messages:
//   M1  A->B  ["HS1", epk_a, token_a]   token nonce = sha256(epk_a)[0..16)
//   M2  B->A  ["HS2", epk_b, token_b]   token nonce = sha256(epk_a||epk_b)[0..16)
//   M3  A->B  ["HS3", hmac(confirm_key, transcript)]
// Each side verifies the peer token against the expected measurement and
// checks that the token binds the ephemeral key it arrived with. With
//   transcript = sha256(m1 || m2)
//   okm = hkdf-sha256(x25519(esk, peer_epk), salt=transcript,
//                     info="agentee/session/v1", 96)
// the session keys are okm[0..32) for A->B, okm[32..64) for B->A and
// okm[64..96) confirms the handshake in M3.
//
// Sealed frames use ChaCha20-Poly1305 with
//   nonce = channel:u32be || seq:u64be
//   associated data = the 20-byte frame header
// so a frame moved, replayed or re-ordered fails authentication.
class SecureSession {
 public:
  // Side A drives the handshake. Throws Errc::handshake_timeout,
  // Errc::peer_token_invalid, Errc::bad_signature,
  // Errc::measurement_mismatch, Errc::nonce_mismatch,
  // Errc::key_confirm_failed.
  static SecureSession initiate(MsgChannel& boot, const SessionConfig& cfg);
  static SecureSession respond(MsgChannel& boot, const SessionConfig& cfg);

  // Seals with this side's sending key and the frame's own header as AD.
  void seal_send(SendEndpoint& out, ByteView plaintext, Deadline deadline);

  // Receives one sealed frame, enforces the expected per-channel sequence
  // before decrypting. Throws Errc::replay_or_reorder, Errc::auth_failed.
  Bytes open_recv(RecvEndpoint& in, Deadline deadline);

  const Bytes& transcript() const { return transcript_; }

  // Frame-level helpers, shared with tests that exercise tampering without
  // a live ring.
  static Bytes seal_frame(ByteView key, uint16_t channel, uint64_t seq,
                          ByteView plaintext, Bytes* header_out);
  static Bytes open_frame(ByteView key, ByteView header,
                          ByteView ciphertext, uint64_t expected_seq);

  // Derives {key_a2b, key_b2a, confirm} from a shared secret + transcript.
  struct DerivedKeys {
    Bytes a2b;
    Bytes b2a;
    Bytes confirm;
  };
  static DerivedKeys derive_keys(ByteView shared, ByteView transcript);

 private:
  SecureSession(Bytes key_send, Bytes key_recv, Bytes transcript)
      : key_send_(std::move(key_send)),
        key_recv_(std::move(key_recv)),
        transcript_(std::move(transcript)) {}

  Bytes key_send_;
  Bytes key_recv_;
  Bytes transcript_;
  std::map<uint16_t, uint64_t> recv_seq_;
};

}  // namespace agentee
