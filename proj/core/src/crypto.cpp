// Copyright 2026 The agentee Authors
// SPDX-License-Identifier: Apache-2.0

#include "agentee/crypto.hpp"

#include <sodium.h>

#include <cstring>
#include <mutex>

#include "agentee/errors.hpp"

namespace agentee::crypto {

void init() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (sodium_init() < 0) raise(Errc::io, "sodium_init failed");
  });
}

Hash sha256(ByteView data) {
  Hash out;
  crypto_hash_sha256(out.data(), data.data(), data.size());
  return out;
}

Bytes hmac_sha256(ByteView key, ByteView data) {
  Bytes out(crypto_auth_hmacsha256_BYTES);
  crypto_auth_hmacsha256_state st;
  crypto_auth_hmacsha256_init(&st, key.data(), key.size());
  crypto_auth_hmacsha256_update(&st, data.data(), data.size());
  crypto_auth_hmacsha256_final(&st, out.data());
  return out;
}

Bytes hkdf_sha256(ByteView ikm, ByteView salt, ByteView info, size_t out_len) {
  // RFC 5869 with HMAC-SHA256.
  if (out_len == 0 || out_len > 255 * kMacSize)
    raise(Errc::config, "hkdf output length out of range");
  Bytes prk = hmac_sha256(salt, ikm);  // extract
  Bytes out;
  out.reserve(out_len);
  Bytes block;  // T(0) = empty
  uint8_t counter = 1;
  while (out.size() < out_len) {
    Bytes input = block;
    input.insert(input.end(), info.begin(), info.end());
    input.push_back(counter++);
    block = hmac_sha256(prk, input);
    size_t take = std::min(block.size(), out_len - out.size());
    out.insert(out.end(), block.begin(), block.begin() + take);
  }
  return out;
}

SignKeypair sign_keygen() {
  SignKeypair kp;
  kp.pk.resize(crypto_sign_PUBLICKEYBYTES);
  kp.sk.resize(crypto_sign_SECRETKEYBYTES);
  crypto_sign_keypair(kp.pk.data(), kp.sk.data());
  return kp;
}

SignKeypair sign_keygen_seed(ByteView seed32) {
  if (seed32.size() != crypto_sign_SEEDBYTES)
    raise(Errc::config, "signing seed must be 32 bytes");
  SignKeypair kp;
  kp.pk.resize(crypto_sign_PUBLICKEYBYTES);
  kp.sk.resize(crypto_sign_SECRETKEYBYTES);
  crypto_sign_seed_keypair(kp.pk.data(), kp.sk.data(), seed32.data());
  return kp;
}

Bytes sign_detached(ByteView sk, ByteView msg) {
  if (sk.size() != crypto_sign_SECRETKEYBYTES)
    raise(Errc::config, "bad signing key size");
  Bytes sig(crypto_sign_BYTES);
  crypto_sign_detached(sig.data(), nullptr, msg.data(), msg.size(), sk.data());
  return sig;
}

bool sign_verify(ByteView pk, ByteView msg, ByteView sig) {
  if (pk.size() != crypto_sign_PUBLICKEYBYTES ||
      sig.size() != crypto_sign_BYTES)
    return false;
  return crypto_sign_verify_detached(sig.data(), msg.data(), msg.size(),
                                     pk.data()) == 0;
}

KxKeypair kx_keygen() {
  KxKeypair kp;
  kp.sk = random_bytes(crypto_scalarmult_SCALARBYTES);
  kp.pk.resize(crypto_scalarmult_BYTES);
  crypto_scalarmult_base(kp.pk.data(), kp.sk.data());
  return kp;
}

Bytes kx_shared(ByteView own_sk, ByteView peer_pk) {
  if (own_sk.size() != crypto_scalarmult_SCALARBYTES ||
      peer_pk.size() != crypto_scalarmult_BYTES)
    raise(Errc::config, "bad key-exchange key size");
  Bytes shared(crypto_scalarmult_BYTES);
  if (crypto_scalarmult(shared.data(), own_sk.data(), peer_pk.data()) != 0)
    raise(Errc::key_confirm_failed, "degenerate shared secret");
  return shared;
}

Bytes aead_seal(ByteView key, ByteView nonce, ByteView ad,
                ByteView plaintext) {
  if (key.size() != kAeadKeySize) raise(Errc::config, "bad aead key size");
  if (nonce.size() != kAeadNonceSize)
    raise(Errc::bad_nonce_length, "aead nonce must be 12 bytes");
  Bytes ct(plaintext.size() + kAeadTagSize);
  unsigned long long ct_len = 0;
  crypto_aead_chacha20poly1305_ietf_encrypt(
      ct.data(), &ct_len, plaintext.data(), plaintext.size(), ad.data(),
      ad.size(), nullptr, nonce.data(), key.data());
  ct.resize(ct_len);
  return ct;
}

Bytes aead_open(ByteView key, ByteView nonce, ByteView ad,
                ByteView ciphertext) {
  if (key.size() != kAeadKeySize) raise(Errc::config, "bad aead key size");
  if (nonce.size() != kAeadNonceSize)
    raise(Errc::bad_nonce_length, "aead nonce must be 12 bytes");
  if (ciphertext.size() < kAeadTagSize)
    raise(Errc::auth_failed, "ciphertext shorter than tag");
  Bytes pt(ciphertext.size() - kAeadTagSize);
  unsigned long long pt_len = 0;
  if (crypto_aead_chacha20poly1305_ietf_decrypt(
          pt.data(), &pt_len, nullptr, ciphertext.data(), ciphertext.size(),
          ad.data(), ad.size(), nonce.data(), key.data()) != 0)
    raise(Errc::auth_failed, "aead tag verification failed");
  pt.resize(pt_len);
  return pt;
}

Bytes random_bytes(size_t n) {
  Bytes out(n);
  randombytes_buf(out.data(), n);
  return out;
}

bool constant_time_equal(ByteView a, ByteView b) {
  if (a.size() != b.size()) return false;
  if (a.empty()) return true;
  return sodium_memcmp(a.data(), b.data(), a.size()) == 0;
}

}  // namespace agentee::crypto
