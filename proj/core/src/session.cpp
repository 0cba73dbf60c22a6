// Copyright 2026 The agentee Authors
// SPDX-License-Identifier: Apache-2.0

#include "agentee/session.hpp"

#include "agentee/crypto.hpp"
#include "agentee/errors.hpp"

namespace agentee {

namespace {

constexpr std::string_view kSessionInfo = "agentee/session/v1";

Bytes nonce16_of(ByteView data) {
  crypto::Hash h = crypto::sha256(data);
  return Bytes(h.begin(), h.begin() + kTokenNonceSize);
}

Bytes concat(ByteView a, ByteView b) {
  Bytes out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

RecvFrame recv_handshake(MsgChannel& boot, Deadline deadline) {
  try {
    return boot.recv(deadline);
  } catch (const Error& e) {
    if (e.code() == Errc::timeout)
      raise(Errc::handshake_timeout, "peer did not answer in time");
    throw;
  }
}

// Verifies the peer token and the ephemeral-key binding.
void check_peer_token(const Bytes& token, const Bytes& epk,
                      const SessionConfig& cfg, const Bytes& nonce) {
  token_verify(token, cfg.platform_verify_pk, cfg.expected_peer_measurement,
               nonce);
  AttestationToken parsed = token_parse(token);
  if (!crypto::constant_time_equal(parsed.session_pk, epk))
    raise(Errc::peer_token_invalid,
          "token does not bind the handshake ephemeral key");
}

Bytes session_nonce(uint16_t channel, uint64_t seq) {
  Bytes nonce;
  nonce.reserve(crypto::kAeadNonceSize);
  put_be32(nonce, channel);
  put_be64(nonce, seq);
  return nonce;
}

}  // namespace

SecureSession::DerivedKeys SecureSession::derive_keys(ByteView shared,
                                                      ByteView transcript) {
  Bytes okm = crypto::hkdf_sha256(
      shared, transcript,
      ByteView(reinterpret_cast<const uint8_t*>(kSessionInfo.data()),
               kSessionInfo.size()),
      96);
  DerivedKeys keys;
  keys.a2b.assign(okm.begin(), okm.begin() + 32);
  keys.b2a.assign(okm.begin() + 32, okm.begin() + 64);
  keys.confirm.assign(okm.begin() + 64, okm.end());
  return keys;
}

SecureSession SecureSession::initiate(MsgChannel& boot,
                                      const SessionConfig& cfg) {
  Deadline deadline = deadline_in(cfg.timeout_ms);
  crypto::KxKeypair eph = crypto::kx_keygen();

  Bytes own_token =
      token_issue(cfg.platform_sign_sk, cfg.platform_sign_pk,
                  cfg.own_measurement, eph.pk, nonce16_of(eph.pk));
  Bytes m1 = encode_fields({to_bytes("HS1"), eph.pk, own_token});
  boot.send(m1, deadline);

  Bytes m2 = recv_handshake(boot, deadline).payload;
  std::vector<Bytes> f2 = decode_fields(m2);
  if (f2.size() != 3 || field_tag(f2) != "HS2")
    raise(Errc::peer_token_invalid, "malformed handshake reply");
  const Bytes& peer_epk = f2[1];
  check_peer_token(f2[2], peer_epk, cfg,
                   nonce16_of(concat(eph.pk, peer_epk)));

  Bytes shared = crypto::kx_shared(eph.sk, peer_epk);
  crypto::Hash th = crypto::sha256(concat(m1, m2));
  Bytes transcript(th.begin(), th.end());
  DerivedKeys keys = derive_keys(shared, transcript);

  Bytes m3 = encode_fields(
      {to_bytes("HS3"), crypto::hmac_sha256(keys.confirm, transcript)});
  boot.send(m3, deadline);

  return SecureSession(std::move(keys.a2b), std::move(keys.b2a),
                       std::move(transcript));
}

SecureSession SecureSession::respond(MsgChannel& boot,
                                     const SessionConfig& cfg) {
  Deadline deadline = deadline_in(cfg.timeout_ms);

  Bytes m1 = recv_handshake(boot, deadline).payload;
  std::vector<Bytes> f1 = decode_fields(m1);
  if (f1.size() != 3 || field_tag(f1) != "HS1")
    raise(Errc::peer_token_invalid, "malformed handshake open");
  const Bytes& peer_epk = f1[1];
  check_peer_token(f1[2], peer_epk, cfg, nonce16_of(peer_epk));

  crypto::KxKeypair eph = crypto::kx_keygen();
  Bytes own_token = token_issue(
      cfg.platform_sign_sk, cfg.platform_sign_pk, cfg.own_measurement,
      eph.pk, nonce16_of(concat(peer_epk, eph.pk)));
  Bytes m2 = encode_fields({to_bytes("HS2"), eph.pk, own_token});
  boot.send(m2, deadline);

  Bytes shared = crypto::kx_shared(eph.sk, peer_epk);
  crypto::Hash th = crypto::sha256(concat(m1, m2));
  Bytes transcript(th.begin(), th.end());
  DerivedKeys keys = derive_keys(shared, transcript);

  Bytes m3 = recv_handshake(boot, deadline).payload;
  std::vector<Bytes> f3 = decode_fields(m3);
  if (f3.size() != 2 || field_tag(f3) != "HS3")
    raise(Errc::key_confirm_failed, "malformed key confirmation");
  Bytes expect = crypto::hmac_sha256(keys.confirm, transcript);
  if (!crypto::constant_time_equal(f3[1], expect))
    raise(Errc::key_confirm_failed, "key confirmation mac mismatch");

  return SecureSession(std::move(keys.b2a), std::move(keys.a2b),
                       std::move(transcript));
}

Bytes SecureSession::seal_frame(ByteView key, uint16_t channel, uint64_t seq,
                                ByteView plaintext, Bytes* header_out) {
  Bytes header = encode_frame_header(
      kFlagSealed, channel, seq,
      static_cast<uint32_t>(plaintext.size() + crypto::kAeadTagSize));
  Bytes ct =
      crypto::aead_seal(key, session_nonce(channel, seq), header, plaintext);
  if (header_out != nullptr) *header_out = std::move(header);
  return ct;
}

Bytes SecureSession::open_frame(ByteView key, ByteView header,
                                ByteView ciphertext, uint64_t expected_seq) {
  FrameHeader h = decode_frame_header(header.data());
  if ((h.flags & kFlagSealed) == 0)
    raise(Errc::protocol, "frame is not sealed");
  if (h.seq != expected_seq)
    raise(Errc::replay_or_reorder,
          "sealed frame seq " + std::to_string(h.seq) + ", expected " +
              std::to_string(expected_seq));
  return crypto::aead_open(key, session_nonce(h.channel, h.seq), header,
                           ciphertext);
}

void SecureSession::seal_send(SendEndpoint& out, ByteView plaintext,
                              Deadline deadline) {
  if (plaintext.size() + crypto::kAeadTagSize > out.max_payload())
    raise(Errc::oversized_message, "plaintext exceeds sealed frame budget");
  Bytes ct = seal_frame(key_send_, out.channel(), out.next_seq(), plaintext,
                        nullptr);
  out.send(ct, deadline, kFlagSealed);
}

Bytes SecureSession::open_recv(RecvEndpoint& in, Deadline deadline) {
  RecvFrame frame = in.recv(deadline);
  uint64_t& expected = recv_seq_[in.channel()];
  Bytes plaintext =
      open_frame(key_recv_, frame.header, frame.payload, expected);
  ++expected;
  return plaintext;
}

}  // namespace agentee
