// Copyright 2026 The agentee Authors
// SPDX-License-Identifier: Apache-2.0

#include "agentee/provision.hpp"

#include "agentee/crypto.hpp"
#include "agentee/errors.hpp"
#include "agentee/session.hpp"
#include "agentee/token.hpp"

namespace agentee {

namespace {

constexpr std::string_view kProvInfo = "agentee/prov/v1";
constexpr std::string_view kM1Context = "agentee/prov/m1";

Bytes m1_signed_payload(ByteView nonce, ByteView epk) {
  Bytes msg(kM1Context.begin(), kM1Context.end());
  msg.insert(msg.end(), nonce.begin(), nonce.end());
  msg.insert(msg.end(), epk.begin(), epk.end());
  return msg;
}

struct ProvKeys {
  Bytes o2r;
  Bytes r2o;
  Bytes confirm;
};

ProvKeys derive_prov_keys(ByteView shared, ByteView transcript) {
  Bytes okm = crypto::hkdf_sha256(
      shared, transcript,
      ByteView(reinterpret_cast<const uint8_t*>(kProvInfo.data()),
               kProvInfo.size()),
      96);
  ProvKeys keys;
  keys.o2r.assign(okm.begin(), okm.begin() + 32);
  keys.r2o.assign(okm.begin() + 32, okm.begin() + 64);
  keys.confirm.assign(okm.begin() + 64, okm.end());
  return keys;
}

Bytes record_nonce(uint64_t counter) {
  Bytes nonce(4, 0);
  put_be64(nonce, counter);
  return nonce;
}

Bytes seal_record(ByteView key, uint64_t counter, ByteView transcript,
                  const std::vector<Bytes>& fields) {
  return crypto::aead_seal(key, record_nonce(counter), transcript,
                           encode_fields(fields));
}

std::vector<Bytes> open_record(ByteView key, uint64_t counter,
                               ByteView transcript, ByteView body) {
  Bytes plain =
      crypto::aead_open(key, record_nonce(counter), transcript, body);
  return decode_fields(plain);
}

Bytes recv_or_timeout(MessageStream& stream, Deadline deadline) {
  try {
    return stream.recv_msg(deadline);
  } catch (const Error& e) {
    if (e.code() == Errc::timeout)
      raise(Errc::handshake_timeout, "provisioning peer stalled");
    throw;
  }
}

Bytes concat(ByteView a, ByteView b) {
  Bytes out;
  out.reserve(a.size() + b.size());
  out.insert(out.end(), a.begin(), a.end());
  out.insert(out.end(), b.begin(), b.end());
  return out;
}

}  // namespace

const char* asset_kind_name(AssetKind kind) {
  switch (kind) {
    case AssetKind::system_prompt:
      return "system-prompt";
    case AssetKind::model_config:
      return "model-config";
    case AssetKind::tool_credential:
      return "tool-credential";
    case AssetKind::agent_policy:
      return "agent-policy";
  }
  return "unknown";
}

bool asset_allowed_for_role(AssetKind kind, RealmRole role) {
  switch (kind) {
    case AssetKind::system_prompt:
    case AssetKind::agent_policy:
      return role == RealmRole::agent;
    case AssetKind::model_config:
      return role == RealmRole::model;
    case AssetKind::tool_credential:
      return role == RealmRole::tool;
  }
  return false;
}

const Bytes& ProvisionedAssets::get(AssetKind kind) const {
  auto it = by_kind.find(kind);
  if (it == by_kind.end())
    raise(Errc::not_provisioned,
          std::string("missing asset: ") + asset_kind_name(kind));
  return it->second;
}

OwnerSession OwnerSession::attach(MessageStream& stream,
                                  const OwnerConfig& cfg) {
  Deadline deadline = deadline_in(cfg.timeout_ms);

  Bytes nonce = crypto::random_bytes(kTokenNonceSize);
  crypto::KxKeypair eph = crypto::kx_keygen();
  Bytes sig = crypto::sign_detached(cfg.owner_sign_sk,
                                    m1_signed_payload(nonce, eph.pk));
  Bytes m1 = encode_fields({to_bytes("POV1"), nonce, eph.pk, sig});
  stream.send_msg(m1, deadline);

  Bytes m2 = recv_or_timeout(stream, deadline);
  std::vector<Bytes> f2 = decode_fields(m2);
  if (f2.size() != 3 || field_tag(f2) != "POV2")
    raise(Errc::peer_token_invalid, "malformed provisioning reply");
  const Bytes& realm_epk = f2[1];
  token_verify(f2[2], cfg.platform_verify_pk, cfg.expected_measurement,
               nonce);
  AttestationToken token = token_parse(f2[2]);
  if (!crypto::constant_time_equal(token.session_pk, realm_epk))
    raise(Errc::peer_token_invalid,
          "token does not bind the provisioning key");

  Bytes shared = crypto::kx_shared(eph.sk, realm_epk);
  crypto::Hash th = crypto::sha256(concat(m1, m2));
  Bytes transcript(th.begin(), th.end());
  ProvKeys keys = derive_prov_keys(shared, transcript);

  Bytes m3 = encode_fields(
      {to_bytes("POV3"), crypto::hmac_sha256(keys.confirm, transcript)});
  stream.send_msg(m3, deadline);

  return OwnerSession(&stream, cfg.role, std::move(keys.o2r),
                      std::move(keys.r2o), std::move(transcript),
                      cfg.timeout_ms);
}

Bytes OwnerSession::sealed_roundtrip(const std::vector<Bytes>& fields) {
  Deadline deadline = deadline_in(timeout_ms_);
  stream_->send_msg(seal_record(key_send_, send_counter_++, transcript_,
                                fields),
                    deadline);
  Bytes reply = recv_or_timeout(*stream_, deadline);
  std::vector<Bytes> opened =
      open_record(key_recv_, recv_counter_++, transcript_, reply);
  return encode_fields(opened);
}

void OwnerSession::send_asset(AssetKind kind, ByteView body) {
  if (!asset_allowed_for_role(kind, role_))
    raise(Errc::role_asset_mismatch,
          std::string(asset_kind_name(kind)) + " does not belong in a " +
              role_name(role_) + " realm");
  Bytes kind_field{static_cast<uint8_t>(kind)};
  Bytes reply = sealed_roundtrip(
      {to_bytes("ASET"), kind_field, Bytes(body.begin(), body.end())});
  std::vector<Bytes> f = decode_fields(reply);
  if (f.size() != 3 || field_tag(f) != "ACK" || f[1] != kind_field)
    raise(Errc::protocol, "unexpected asset acknowledgement");
  crypto::Hash digest = crypto::sha256(body);
  if (!crypto::constant_time_equal(f[2], ByteView(digest.data(),
                                                  digest.size())))
    raise(Errc::ack_digest_mismatch,
          "realm acknowledged different asset bytes");
}

void OwnerSession::finish() {
  Bytes reply = sealed_roundtrip({to_bytes("DONE")});
  std::vector<Bytes> f = decode_fields(reply);
  if (f.size() != 1 || field_tag(f) != "DFIN")
    raise(Errc::protocol, "unexpected provisioning finish reply");
}

ProvisionedAssets provision_serve(MessageStream& stream,
                                  const RealmProvisionConfig& cfg) {
  Deadline deadline = deadline_in(cfg.timeout_ms);

  Bytes m1 = recv_or_timeout(stream, deadline);
  std::vector<Bytes> f1 = decode_fields(m1);
  if (f1.size() != 4 || field_tag(f1) != "POV1")
    raise(Errc::session_not_verified, "expected provisioning open");
  const Bytes& nonce = f1[1];
  const Bytes& owner_epk = f1[2];
  if (nonce.size() != kTokenNonceSize)
    raise(Errc::bad_nonce_length, "owner challenge must be 16 bytes");
  if (!crypto::sign_verify(cfg.owner_verify_pk,
                           m1_signed_payload(nonce, owner_epk), f1[3]))
    raise(Errc::bad_signature, "provisioning open not signed by owner");

  crypto::KxKeypair eph = crypto::kx_keygen();
  Bytes token = token_issue(cfg.platform_sign_sk, cfg.platform_sign_pk,
                            cfg.own_measurement, eph.pk, nonce);
  Bytes m2 = encode_fields({to_bytes("POV2"), eph.pk, token});
  stream.send_msg(m2, deadline);

  Bytes shared = crypto::kx_shared(eph.sk, owner_epk);
  crypto::Hash th = crypto::sha256(concat(m1, m2));
  Bytes transcript(th.begin(), th.end());
  ProvKeys keys = derive_prov_keys(shared, transcript);

  Bytes m3 = recv_or_timeout(stream, deadline);
  {
    std::vector<Bytes> f3;
    try {
      f3 = decode_fields(m3);
    } catch (const Error&) {
      raise(Errc::session_not_verified,
            "record arrived before key confirmation");
    }
    if (f3.size() != 2 || field_tag(f3) != "POV3")
      raise(Errc::session_not_verified,
            "record arrived before key confirmation");
    Bytes expect = crypto::hmac_sha256(keys.confirm, transcript);
    if (!crypto::constant_time_equal(f3[1], expect))
      raise(Errc::key_confirm_failed, "owner key confirmation mac mismatch");
  }

  ProvisionedAssets assets;
  uint64_t recv_counter = 0;
  uint64_t send_counter = 0;
  for (;;) {
    Bytes body = recv_or_timeout(stream, deadline);
    std::vector<Bytes> f =
        open_record(keys.o2r, recv_counter++, transcript, body);
    std::string tag = field_tag(f);
    if (tag == "DONE") {
      stream.send_msg(seal_record(keys.r2o, send_counter++, transcript,
                                  {to_bytes("DFIN")}),
                      deadline);
      return assets;
    }
    if (tag != "ASET" || f.size() != 3 || f[1].size() != 1)
      raise(Errc::protocol, "unexpected provisioning record");
    uint8_t raw_kind = f[1][0];
    if (raw_kind < 1 || raw_kind > 4)
      raise(Errc::protocol, "unknown asset kind");
    AssetKind kind = static_cast<AssetKind>(raw_kind);
    if (!asset_allowed_for_role(kind, cfg.role))
      raise(Errc::role_asset_mismatch,
            std::string(asset_kind_name(kind)) + " refused by " +
                role_name(cfg.role) + " realm");
    assets.by_kind[kind] = f[2];
    crypto::Hash digest = crypto::sha256(f[2]);
    stream.send_msg(
        seal_record(keys.r2o, send_counter++, transcript,
                    {to_bytes("ACK"), f[1],
                     Bytes(digest.begin(), digest.end())}),
        deadline);
  }
}

}  // namespace agentee
