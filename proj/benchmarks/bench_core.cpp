// Copyright 2026 The agentee Authors
// SPDX-License-Identifier: Apache-2.0
//
// Microbenchmarks for the hot primitives: ring transfer, frame sealing,
// token issuance/verification, image measurement, key derivation and the
// deterministic mock decoder.

#include <benchmark/benchmark.h>
#include <unistd.h>

#include <string>

#include "agentee/crypto.hpp"
#include "agentee/csm.hpp"
#include "agentee/inference.hpp"
#include "agentee/measurement.hpp"
#include "agentee/prompt.hpp"
#include "agentee/region.hpp"
#include "agentee/session.hpp"
#include "agentee/token.hpp"

using namespace agentee;

namespace {

std::string unique_region_name() {
  static int counter = 0;
  return "agentee-bench-" + std::to_string(::getpid()) + "-" +
         std::to_string(counter++);
}

Bytes bytes_of(const crypto::Hash& h) { return Bytes(h.begin(), h.end()); }

void BM_RingSendRecv(benchmark::State& state) {
  const std::string name = unique_region_name();
  RegionGeometry geometry;
  geometry.channel_count = 2;
  geometry.capacity = 8192;
  geometry.default_directions();
  ShmRegion created = ShmRegion::create(name, geometry.bytes_needed());
  format_region(created, geometry);
  ChannelSet side_a(std::move(created), RegionSide::a);
  ChannelSet side_b(ShmRegion::open_existing(name), RegionSide::b);
  SendEndpoint tx = side_a.take_send(0);
  RecvEndpoint rx = side_b.take_recv(0);

  Bytes payload(static_cast<size_t>(state.range(0)), 0xAB);
  for (auto _ : state) {
    tx.send(payload, deadline_in(1000));
    RecvFrame frame = rx.recv(deadline_in(1000));
    benchmark::DoNotOptimize(frame.payload.data());
  }
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations()) *
                          state.range(0));
  ShmRegion::unlink(name);
}

void BM_SealOpen(benchmark::State& state) {
  Bytes key = crypto::random_bytes(crypto::kAeadKeySize);
  Bytes plaintext(static_cast<size_t>(state.range(0)), 0x5C);
  uint64_t seq = 0;
  for (auto _ : state) {
    Bytes header;
    Bytes sealed = SecureSession::seal_frame(key, 2, seq, plaintext, &header);
    Bytes opened = SecureSession::open_frame(key, header, sealed, seq);
    benchmark::DoNotOptimize(opened.data());
    ++seq;
  }
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations()) *
                          state.range(0));
}

void BM_TokenIssueVerify(benchmark::State& state) {
  crypto::SignKeypair platform = crypto::sign_keygen();
  Bytes measurement =
      bytes_of(measure_image(RealmRole::model, to_bytes("bench image")));
  crypto::KxKeypair session = crypto::kx_keygen();
  Bytes nonce = crypto::random_bytes(kTokenNonceSize);
  for (auto _ : state) {
    Bytes token = token_issue(platform.sk, platform.pk, measurement,
                              session.pk, nonce);
    token_verify(token, platform.pk, measurement, nonce);
    benchmark::DoNotOptimize(token.data());
  }
}

void BM_MeasureImage(benchmark::State& state) {
  Bytes image(static_cast<size_t>(state.range(0)), 0x42);
  for (auto _ : state) {
    crypto::Hash digest = measure_image(RealmRole::agent, image);
    benchmark::DoNotOptimize(digest.data());
  }
  state.SetBytesProcessed(static_cast<int64_t>(state.iterations()) *
                          state.range(0));
}

void BM_HkdfDerive(benchmark::State& state) {
  Bytes shared = crypto::random_bytes(crypto::kKxKeySize);
  Bytes transcript = crypto::random_bytes(crypto::kHashSize);
  for (auto _ : state) {
    SecureSession::DerivedKeys keys =
        SecureSession::derive_keys(shared, transcript);
    benchmark::DoNotOptimize(keys.confirm.data());
  }
}

void BM_MockGenerate(benchmark::State& state) {
  LabeledPrompt prompt;
  prompt.messages.push_back(
      {MsgRole::system, "You are a concise assistant for benchmarks."});
  prompt.messages.push_back(
      {MsgRole::user, "Describe the water cycle end to end."});
  Bytes prompt_bytes = encode_prompt(prompt);
  for (auto _ : state) {
    std::string output = mock_generate(prompt_bytes, 20);
    benchmark::DoNotOptimize(output.data());
  }
}

}  // namespace

BENCHMARK(BM_RingSendRecv)->Arg(64)->Arg(1024)->Arg(4096);
BENCHMARK(BM_SealOpen)->Arg(64)->Arg(1024)->Arg(4096);
BENCHMARK(BM_TokenIssueVerify);
BENCHMARK(BM_MeasureImage)->Arg(64 * 1024);
BENCHMARK(BM_HkdfDerive);
BENCHMARK(BM_MockGenerate);

int main(int argc, char** argv) {
  agentee::crypto::init();
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv)) return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
