// Copyright 2026 The agentee Authors
// SPDX-License-Identifier: Apache-2.0

#include "agentee/crypto.hpp"
#include "agentee/errors.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace agentee;
using testutil::thrown_code;

namespace {

Bytes hash_bytes(const crypto::Hash& h) { return Bytes(h.begin(), h.end()); }

}  // namespace

TEST_CASE("sha256 matches published test vectors") {
  CHECK(to_hex(hash_bytes(crypto::sha256(to_bytes("abc")))) ==
        "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  CHECK(to_hex(hash_bytes(crypto::sha256(Bytes{})))  ==
        "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  CHECK(to_hex(hash_bytes(crypto::sha256(
            to_bytes("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnop"
                     "nopq")))) ==
        "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
}

TEST_CASE("hmac-sha256 matches published test vectors") {
  // 20 bytes of 0x0b, "Hi There"
  Bytes key1(20, 0x0b);
  CHECK(to_hex(crypto::hmac_sha256(key1, to_bytes("Hi There"))) ==
        "b0344c61d8db38535ca8afceaf0bf12b881dc200c9833da726e9376c2e32cff7");
  // key "Jefe"
  CHECK(to_hex(crypto::hmac_sha256(
            to_bytes("Jefe"), to_bytes("what do ya want for nothing?"))) ==
        "5bdcc146bf60754e6a042426089575c75a003f089d2739839dec58b964ec3843");
}

TEST_CASE("hkdf-sha256 matches published test vectors") {
  // Basic case: 22-byte IKM, 13-byte salt, 10-byte info, 42-byte output.
  Bytes ikm(22, 0x0b);
  Bytes salt = from_hex("000102030405060708090a0b0c");
  Bytes info = from_hex("f0f1f2f3f4f5f6f7f8f9");
  CHECK(to_hex(crypto::hkdf_sha256(ikm, salt, info, 42)) ==
        "3cb25f25faacd57a90434f64d0362f2a2d2d0a90cf1a5a4c5db02d56ecc4c5bf"
        "34007208d5b887185865");

  // Empty salt and info.
  CHECK(to_hex(crypto::hkdf_sha256(ikm, Bytes{}, Bytes{}, 42)) ==
        "8da4e775a563c18f715f802a063c5a31b8a11f5c5ee1879ec3454e5f3c738d2d"
        "9d201395faa4b61a96c8");

  // Output spans several expand blocks.
  Bytes long_okm = crypto::hkdf_sha256(ikm, salt, info, 100);
  CHECK(long_okm.size() == 100);
  // The first 42 bytes agree with the shorter request (stream property).
  Bytes head(long_okm.begin(), long_okm.begin() + 42);
  CHECK(head == crypto::hkdf_sha256(ikm, salt, info, 42));
}

TEST_CASE("ed25519 signing matches the published test vector") {
  Bytes seed =
      from_hex("9d61b19deffd5a60ba844af492ec2cc44449c5697b326919703bac03"
               "1cae7f60");
  crypto::SignKeypair kp = crypto::sign_keygen_seed(seed);
  CHECK(to_hex(kp.pk) ==
        "d75a980182b10ab7d54bfed3c964073a0ee172f3daa62325af021a68f707511a");
  Bytes sig = crypto::sign_detached(kp.sk, Bytes{});
  CHECK(to_hex(sig) ==
        "e5564300c360ac729086e2cc806e828a84877f1eb8e5d974d873e06522490155"
        "5fb8821590a33bacc61e39701cf9b46bd25bf5f0595bbe24655141438e7a100b");
  CHECK(crypto::sign_verify(kp.pk, Bytes{}, sig));
}

TEST_CASE("ed25519 round-trip and tamper rejection") {
  crypto::SignKeypair kp = crypto::sign_keygen();
  REQUIRE(kp.pk.size() == crypto::kSignPkSize);
  REQUIRE(kp.sk.size() == crypto::kSignSkSize);
  Bytes msg = to_bytes("attestation evidence");
  Bytes sig = crypto::sign_detached(kp.sk, msg);
  REQUIRE(sig.size() == crypto::kSignatureSize);
  CHECK(crypto::sign_verify(kp.pk, msg, sig));

  Bytes bad_sig = sig;
  bad_sig[0] ^= 0x01;
  CHECK(!crypto::sign_verify(kp.pk, msg, bad_sig));

  Bytes bad_msg = msg;
  bad_msg[0] ^= 0x01;
  CHECK(!crypto::sign_verify(kp.pk, bad_msg, sig));

  crypto::SignKeypair other = crypto::sign_keygen();
  CHECK(!crypto::sign_verify(other.pk, msg, sig));
}

TEST_CASE("x25519 agreement matches the published test vector") {
  Bytes sk_a =
      from_hex("77076d0a7318a57d3c16c17251b26645df4c2f87ebc0992ab177fba5"
               "1db92c2a");
  Bytes pk_a =
      from_hex("8520f0098930a754748b7ddcb43ef75a0dbf3a0d26381af4eba4a98e"
               "aa9b4e6a");
  Bytes sk_b =
      from_hex("5dab087e624a8a4b79e17f8b83800ee66f3bb1292618b6fd1c2f8b27"
               "ff88e0eb");
  Bytes pk_b =
      from_hex("de9edb7d7b7dc1b4d35b61c2ece435373f8343c85b78674dadfc7e14"
               "6f882b4f");
  Bytes expected =
      from_hex("4a5d9d5ba4ce2de1728e3bf480350f25e07e21c947d19e3376f09b3c"
               "1e161742");
  CHECK(crypto::kx_shared(sk_a, pk_b) == expected);
  CHECK(crypto::kx_shared(sk_b, pk_a) == expected);
}

TEST_CASE("x25519 keygen produces agreeing fresh pairs") {
  crypto::KxKeypair a = crypto::kx_keygen();
  crypto::KxKeypair b = crypto::kx_keygen();
  CHECK(crypto::kx_shared(a.sk, b.pk) == crypto::kx_shared(b.sk, a.pk));
  // Degenerate peer key (all zeros) must be rejected.
  Bytes zero(crypto::kKxKeySize, 0);
  CHECK(thrown_code([&] { crypto::kx_shared(a.sk, zero); }) ==
        Errc::key_confirm_failed);
}

TEST_CASE("aead matches the published chacha20-poly1305 test vector") {
  Bytes key =
      from_hex("808182838485868788898a8b8c8d8e8f9091929394959697"
               "98999a9b9c9d9e9f");
  Bytes nonce = from_hex("070000004041424344454647");
  Bytes ad = from_hex("50515253c0c1c2c3c4c5c6c7");
  Bytes pt = to_bytes(
      "Ladies and Gentlemen of the class of '99: If I could offer you "
      "only one tip for the future, sunscreen would be it.");
  Bytes ct = crypto::aead_seal(key, nonce, ad, pt);
  CHECK(to_hex(ct) ==
        "d31a8d34648e60db7b86afbc53ef7ec2a4aded51296e08fea9e2b5a736ee62d6"
        "3dbea45e8ca9671282fafb69da92728b1a71de0a9e060b2905d6a5b67ecd3b36"
        "92ddbd7f2d778b8c9803aee328091b58fab324e4fad675945585808b4831d7bc"
        "3ff4def08e4b7a9de576d26586cec64b6116"
        "1ae10b594f09e26a7e902ecbd0600691");
  CHECK(crypto::aead_open(key, nonce, ad, ct) == pt);
}

TEST_CASE("aead rejects any tampering") {
  Bytes key = crypto::random_bytes(crypto::kAeadKeySize);
  Bytes nonce = crypto::random_bytes(crypto::kAeadNonceSize);
  Bytes ad = to_bytes("frame header");
  Bytes pt = to_bytes("secret payload");
  Bytes ct = crypto::aead_seal(key, nonce, ad, pt);
  REQUIRE(ct.size() == pt.size() + crypto::kAeadTagSize);
  CHECK(crypto::aead_open(key, nonce, ad, ct) == pt);

  Bytes bad = ct;
  bad[0] ^= 0x01;
  CHECK(thrown_code([&] { crypto::aead_open(key, nonce, ad, bad); }) ==
        Errc::auth_failed);

  bad = ct;
  bad.back() ^= 0x80;  // tag bit
  CHECK(thrown_code([&] { crypto::aead_open(key, nonce, ad, bad); }) ==
        Errc::auth_failed);

  Bytes other_nonce = nonce;
  other_nonce[0] ^= 1;
  CHECK(thrown_code(
            [&] { crypto::aead_open(key, other_nonce, ad, ct); }) ==
        Errc::auth_failed);

  CHECK(thrown_code(
            [&] { crypto::aead_open(key, nonce, to_bytes("other"), ct); }) ==
        Errc::auth_failed);

  Bytes other_key = crypto::random_bytes(crypto::kAeadKeySize);
  CHECK(thrown_code([&] { crypto::aead_open(other_key, nonce, ad, ct); }) ==
        Errc::auth_failed);

  // Empty plaintext still authenticates the associated data.
  Bytes empty_ct = crypto::aead_seal(key, nonce, ad, Bytes{});
  CHECK(crypto::aead_open(key, nonce, ad, empty_ct).empty());
}

TEST_CASE("random bytes and constant-time comparison behave") {
  Bytes a = crypto::random_bytes(32);
  Bytes b = crypto::random_bytes(32);
  REQUIRE(a.size() == 32);
  CHECK(a != b);  // 2^-256 false-failure probability
  CHECK(crypto::constant_time_equal(a, a));
  CHECK(!crypto::constant_time_equal(a, b));
  CHECK(!crypto::constant_time_equal(a, Bytes(a.begin(), a.begin() + 16)));
  CHECK(crypto::constant_time_equal(Bytes{}, Bytes{}));
  CHECK(crypto::random_bytes(0).empty());
}
