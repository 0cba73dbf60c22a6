// Copyright 2026 The agentee Authors
// SPDX-License-Identifier: Apache-2.0
//
// Acceptance gate. Each test case checks one release criterion end to end
// and prints "[acceptance] criterion N: PASS|FAIL" plus supporting detail,
// so a ctest log shows exactly which guarantees hold. The doctest
// assertion mirrors the printed verdict.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "agentee/bench.hpp"
#include "agentee/crypto.hpp"
#include "agentee/csm.hpp"
#include "agentee/errors.hpp"
#include "agentee/inference.hpp"
#include "agentee/measurement.hpp"
#include "agentee/observer.hpp"
#include "agentee/pipeline.hpp"
#include "agentee/region.hpp"
#include "agentee/token.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace agentee;
using testutil::fixture_path;
using testutil::fork_child;
using testutil::thrown_code;
using testutil::wait_exit;

namespace {

void detail(const char* fmt, ...) {
  std::va_list ap;
  va_start(ap, fmt);
  std::printf("[acceptance]   ");
  std::vprintf(fmt, ap);
  std::printf("\n");
  va_end(ap);
}

void verdict(int criterion, bool ok) {
  std::printf("[acceptance] criterion %d: %s\n", criterion,
              ok ? "PASS" : "FAIL");
  std::fflush(stdout);
}

double now_seconds() {
  return std::chrono::duration<double>(
             std::chrono::steady_clock::now().time_since_epoch())
      .count();
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, '\t')) cells.push_back(cell);
  return cells;
}

Bytes bytes_of(const crypto::Hash& h) { return Bytes(h.begin(), h.end()); }

}  // namespace

TEST_CASE(
    "criterion 1: overhead table cells reproduce from their own latency "
    "medians") {
  // Every row of the reference latency table carries two baselines, the
  // subject median and the two printed overhead percentages. Recomputing
  // each percentage from its own latency pair must agree within +/-0.01.
  std::istringstream table(
      testutil::read_file(fixture_path("reference_latencies.tsv")));
  std::string line;
  int cells = 0;
  int agreeing = 0;
  bool ok = true;
  while (std::getline(table, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cols = split_tabs(line);
    REQUIRE(cols.size() == 8);
    const std::string label = cols[0] + "/" + cols[1] + "/" + cols[2];
    double baseline_process = std::stod(cols[3]);
    double baseline_vm = std::stod(cols[4]);
    double subject = std::stod(cols[5]);
    struct Cell {
      const char* baseline_name;
      double baseline;
      double printed;
    } pair[2] = {
        {"process baseline", baseline_process, std::stod(cols[6])},
        {"vm baseline", baseline_vm, std::stod(cols[7])},
    };
    for (const Cell& cell : pair) {
      ++cells;
      double computed = compute_overhead(subject, cell.baseline);
      if (std::fabs(computed - cell.printed) <= 0.01 + 1e-9) {
        ++agreeing;
      } else {
        ok = false;
        detail("%s vs %s: table prints %.2f but its own latency pair gives "
               "%.2f",
               label.c_str(), cell.baseline_name, cell.printed, computed);
      }
    }
  }
  detail("%d of %d overhead cells agree with their latency pairs within "
         "0.01",
         agreeing, cells);
  verdict(1, ok && cells == 16);
  CHECK(cells == 16);
  CHECK(ok);
}

TEST_CASE(
    "criterion 2: sealed-pipeline latency overhead stays under thresholds") {
  // With a 100 ms/token decode and 20-token replies, inference dominates:
  // the sealed realm configuration must stay within 5% of in-process and
  // 3% of plain shared memory on median end-to-end time, best of three.
  auto queries = load_queries(fixture_path("queries_chatbot.txt"));
  REQUIRE(queries.size() >= 3);
  std::vector<std::string> turns(queries.begin(), queries.begin() + 3);
  PipelineManifest manifest =
      PipelineManifest::load(fixture_path("conf/pipeline_timed.conf"));

  bool ok = false;
  double best_vs_inproc = 1e9;
  double best_vs_shm = 1e9;
  for (int attempt = 1; attempt <= 3 && !ok; ++attempt) {
    std::map<IsolationMode, double> med;
    for (IsolationMode mode : {IsolationMode::in_process,
                               IsolationMode::process_shm,
                               IsolationMode::realm_csm}) {
      manifest.mode = mode;
      Pipeline pipeline = Pipeline::start(manifest);
      std::vector<double> e2e;
      for (const std::string& q : turns)
        e2e.push_back(pipeline.query(q).e2e_seconds);
      pipeline.shutdown();
      med[mode] = median(e2e);
    }
    double vs_inproc = compute_overhead(med[IsolationMode::realm_csm],
                                        med[IsolationMode::in_process]);
    double vs_shm = compute_overhead(med[IsolationMode::realm_csm],
                                     med[IsolationMode::process_shm]);
    detail("attempt %d medians ms: in-process %.1f, process-shm %.1f, "
           "realm-csm %.1f",
           attempt, med[IsolationMode::in_process] * 1000.0,
           med[IsolationMode::process_shm] * 1000.0,
           med[IsolationMode::realm_csm] * 1000.0);
    detail("attempt %d overhead: vs in-process %.2f%% (limit 5), vs "
           "process-shm %.2f%% (limit 3)",
           attempt, vs_inproc, vs_shm);
    best_vs_inproc = std::min(best_vs_inproc, vs_inproc);
    best_vs_shm = std::min(best_vs_shm, vs_shm);
    ok = vs_inproc < 5.0 && vs_shm < 3.0;
  }
  detail("best overhead: vs in-process %.2f%%, vs process-shm %.2f%%",
         best_vs_inproc, best_vs_shm);
  verdict(2, ok);
  CHECK(ok);
}

TEST_CASE(
    "criterion 3: attestation tokens reject every single-bit tamper and "
    "replay") {
  crypto::SignKeypair platform = crypto::sign_keygen();
  Bytes measurement =
      bytes_of(measure_image(RealmRole::model, to_bytes("model image v1")));
  crypto::KxKeypair session = crypto::kx_keygen();
  Bytes nonce = crypto::random_bytes(kTokenNonceSize);
  Bytes token = token_issue(platform.sk, platform.pk, measurement,
                            session.pk, nonce);
  REQUIRE(token.size() == kTokenSize);
  // Baseline: the untampered token verifies.
  token_verify(token, platform.pk, measurement, nonce);

  double t0 = now_seconds();
  int accepted = 0;
  std::map<Errc, int> tally;
  for (size_t bit = 0; bit < kTokenSize * 8; ++bit) {
    Bytes mutant = token;
    mutant[bit / 8] ^= static_cast<uint8_t>(1u << (bit % 8));
    try {
      token_verify(mutant, platform.pk, measurement, nonce);
      ++accepted;
    } catch (const Error& e) {
      ++tally[e.code()];
    }
  }
  bool ok = accepted == 0;
  for (const auto& [code, count] : tally)
    detail("bit flips rejected as %s: %d", errc_name(code), count);
  detail("%zu mutations, %d accepted", kTokenSize * 8, accepted);

  // A validly signed token for a different measurement must be refused.
  Bytes other =
      bytes_of(measure_image(RealmRole::model, to_bytes("model image v2")));
  Bytes imposter =
      token_issue(platform.sk, platform.pk, other, session.pk, nonce);
  auto code = thrown_code(
      [&] { token_verify(imposter, platform.pk, measurement, nonce); });
  ok = ok && code == Errc::measurement_mismatch;
  detail("foreign measurement rejected as %s",
         code ? errc_name(*code) : "(accepted)");

  // A replayed token cannot answer a fresh challenge.
  Bytes fresh = crypto::random_bytes(kTokenNonceSize);
  code = thrown_code(
      [&] { token_verify(token, platform.pk, measurement, fresh); });
  ok = ok && code == Errc::nonce_mismatch;
  detail("stale challenge rejected as %s",
         code ? errc_name(*code) : "(accepted)");

  detail("sweep took %.2f s", now_seconds() - t0);
  verdict(3, ok);
  CHECK(ok);
}

TEST_CASE(
    "criterion 4: rings deliver ten thousand random frames byte-exact "
    "across processes") {
  constexpr uint64_t kMessages = 10000;
  const std::string name =
      "agentee-accept-fifo-" + std::to_string(::getpid());
  RegionGeometry geometry;
  geometry.channel_count = 2;
  geometry.capacity = 8192;
  geometry.default_directions();
  const uint32_t max_payload = geometry.capacity - kFrameHeaderSize;

  ShmRegion created = ShmRegion::create(name, geometry.bytes_needed());
  format_region(created, geometry);
  ChannelSet side_a(std::move(created), RegionSide::a);

  auto chain = [](const Bytes& h, const Bytes& payload) {
    Bytes buf = h;
    put_be64(buf, payload.size());
    buf.insert(buf.end(), payload.begin(), payload.end());
    return bytes_of(crypto::sha256(buf));
  };

  pid_t pid = fork_child([&]() -> int {
    ChannelSet side_b(ShmRegion::open_existing(name), RegionSide::b);
    RecvEndpoint rx = side_b.take_recv(0);
    SendEndpoint tx = side_b.take_send(1);
    Bytes digest(crypto::kHashSize, 0);
    for (uint64_t i = 0; i < kMessages; ++i) {
      RecvFrame frame = rx.recv(deadline_in(60000));
      if (frame.seq != i) return 66;
      digest = chain(digest, frame.payload);
    }
    tx.send(digest, deadline_in(60000));
    return 0;
  });

  // The length schedule mixes the edge cases in with uniformly random
  // sizes; a max-length frame fills the whole ring, so draining is the
  // only way forward (constant backpressure).
  std::mt19937_64 rng(0x5eed0a9e57ULL);
  std::uniform_int_distribution<size_t> length_dist(1, 3000);
  auto length_of = [&](uint64_t i) -> size_t {
    if (i % 97 == 0) return 0;
    if (i == 1 || i % 131 == 0) return max_payload;
    return length_dist(rng);
  };

  SendEndpoint tx = side_a.take_send(0);
  RecvEndpoint rx = side_a.take_recv(1);
  Bytes digest(crypto::kHashSize, 0);
  uint64_t total_bytes = 0;
  int zero_frames = 0;
  int max_frames = 0;
  double t0 = now_seconds();
  for (uint64_t i = 0; i < kMessages; ++i) {
    size_t len = length_of(i);
    zero_frames += len == 0;
    max_frames += len == max_payload;
    Bytes payload(len);
    for (size_t j = 0; j < len; j += 8) {
      uint64_t v = rng();
      for (size_t k = 0; k < 8 && j + k < len; ++k)
        payload[j + k] = static_cast<uint8_t>(v >> (8 * k));
    }
    tx.send(payload, deadline_in(60000));
    digest = chain(digest, payload);
    total_bytes += len;
  }
  Bytes echoed = rx.recv(deadline_in(60000)).payload;
  double elapsed = now_seconds() - t0;
  int child = wait_exit(pid);
  ShmRegion::unlink(name);

  bool ok = child == 0 && echoed == digest;
  detail("%llu frames (%d zero-length, %d ring-filling max-length), %.1f "
         "MiB in %.2f s",
         static_cast<unsigned long long>(kMessages), zero_frames, max_frames,
         total_bytes / (1024.0 * 1024.0), elapsed);
  detail("consumer digest %s the producer digest",
         echoed == digest ? "matches" : "differs from");
  verdict(4, ok);
  CHECK(child == 0);
  CHECK(echoed == digest);
}

TEST_CASE(
    "criterion 5: sealed channels leak nothing an observer can read; "
    "plain channels do") {
  auto probes = load_probes(fixture_path("probes.txt"));
  REQUIRE(probes.size() == 4);
  PipelineManifest manifest =
      PipelineManifest::load(fixture_path("conf/pipeline_observer.conf"));
  const std::string query =
      "Briefly, what does QUERYPROBE-MARKER-41d2c9e3 unlock?";

  auto run_and_scan = [&](IsolationMode mode) {
    manifest.mode = mode;
    Pipeline pipeline = Pipeline::start(manifest);
    pipeline.query(query);
    ObserverReport report = scan_regions(pipeline.run_id(), probes);
    pipeline.shutdown();
    return report;
  };

  ObserverReport plain = run_and_scan(IsolationMode::process_shm);
  ObserverReport sealed = run_and_scan(IsolationMode::realm_csm);

  bool ok = plain.regions_scanned > 0 && sealed.regions_scanned > 0;
  for (const std::string& probe : probes) {
    size_t plain_hits = plain.counts.at(probe);
    size_t sealed_hits = sealed.counts.at(probe);
    detail("%-28s plain-ring hits %zu, sealed-ring hits %zu", probe.c_str(),
           plain_hits, sealed_hits);
    ok = ok && plain_hits >= 1 && sealed_hits == 0;
  }
  detail("scanned %zu plain regions, %zu sealed regions",
         plain.regions_scanned, sealed.regions_scanned);
  verdict(5, ok);
  CHECK(ok);
}

TEST_CASE(
    "criterion 6: chat transcripts are reproducible and tool calls are "
    "counted exactly") {
  auto queries = load_queries(fixture_path("queries_chatbot.txt"));
  REQUIRE(queries.size() >= 3);
  std::string stamp = std::to_string(::getpid());
  std::string input_path = "/tmp/agentee-accept-chat-in-" + stamp + ".txt";
  testutil::write_file(input_path,
                       queries[0] + "\n" + queries[1] + "\n" + queries[2] +
                           "\n");

  bool ok = true;
  std::string first_transcript;
  for (int run = 0; run < 5; ++run) {
    std::string out_path = "/tmp/agentee-accept-chat-out-" + stamp + "-" +
                           std::to_string(run) + ".txt";
    std::string cmd = std::string("AGENTEE_REALM_BIN='") +
                      AGENTEE_REALM_BIN_FILE + "' '" + AGENTEE_CLI_BIN +
                      "' chat --config '" +
                      fixture_path("conf/pipeline_chatbot.conf") + "' < '" +
                      input_path + "' > '" + out_path + "' 2>/dev/null";
    int rc = std::system(cmd.c_str());
    bool exited_clean = rc != -1 && WIFEXITED(rc) && WEXITSTATUS(rc) == 0;
    std::string transcript =
        exited_clean ? testutil::read_file(out_path) : std::string();
    if (run == 0) first_transcript = transcript;
    bool same = exited_clean && !transcript.empty() &&
                transcript == first_transcript;
    if (!same)
      detail("run %d diverged (exit ok: %s, %zu bytes)", run,
             exited_clean ? "yes" : "no", transcript.size());
    ok = ok && same;
    ::unlink(out_path.c_str());
  }
  detail("5 chat runs, transcript %zu bytes, byte-identical: %s",
         first_transcript.size(), ok ? "yes" : "no");
  ::unlink(input_path.c_str());

  // Tool accounting: each scripted directive must dispatch exactly once.
  auto rows = load_queries(fixture_path("queries_itinerary.txt"));
  PipelineManifest manifest =
      PipelineManifest::load(fixture_path("conf/pipeline_itinerary.conf"));
  manifest.mode = IsolationMode::realm_csm;
  Pipeline pipeline = Pipeline::start(manifest);
  pipeline.query(rows[0]);
  uint64_t after_first = pipeline.tool_calls();
  pipeline.query(rows[1]);
  uint64_t after_second = pipeline.tool_calls();
  pipeline.shutdown();
  detail("tool realm dispatch counter after directives: %llu then %llu",
         static_cast<unsigned long long>(after_first),
         static_cast<unsigned long long>(after_second));
  ok = ok && after_first == 1 && after_second == 2;

  verdict(6, ok);
  CHECK(ok);
}

TEST_CASE(
    "criterion 7: readiness gates on attestation and a dead model cannot "
    "take down the host") {
  // Launch gate: an agent told to expect a different model measurement
  // must never reach readiness.
  PipelineManifest chat_manifest =
      PipelineManifest::load(fixture_path("conf/pipeline_chatbot.conf"));
  chat_manifest.mode = IsolationMode::realm_csm;
  Pipeline::Options options;
  options.agent_expects_model_measurement =
      crypto::random_bytes(crypto::kHashSize);
  auto gate_code =
      thrown_code([&] { Pipeline::start(chat_manifest, options); });
  bool ok = gate_code == Errc::measurement_mismatch;
  detail("launch with mismatched expected measurement: %s",
         gate_code ? errc_name(*gate_code) : "(started)");

  // Mid-run model death: the long timed decode guarantees the kill lands
  // while the agent waits on the model channel.
  PipelineManifest timed_manifest =
      PipelineManifest::load(fixture_path("conf/pipeline_timed.conf"));
  timed_manifest.mode = IsolationMode::realm_csm;
  Pipeline pipeline = Pipeline::start(timed_manifest);
  REQUIRE(pipeline.host() != nullptr);

  std::optional<Errc> query_code;
  std::thread turn([&] {
    try {
      pipeline.query("this decode is about to be interrupted");
    } catch (const Error& e) {
      query_code = e.code();
    }
  });
  std::this_thread::sleep_for(std::chrono::milliseconds(300));
  pipeline.host()->kill_realm(RealmRole::model);
  turn.join();

  bool agent_alive = pipeline.host()->alive(RealmRole::agent);
  bool shutdown_clean = !thrown_code([&] { pipeline.shutdown(); });
  detail("query during model kill raised %s; agent alive: %s; shutdown "
         "clean: %s",
         query_code ? errc_name(*query_code) : "(no error)",
         agent_alive ? "yes" : "no", shutdown_clean ? "yes" : "no");
  ok = ok && query_code == Errc::model_channel_down && agent_alive &&
       shutdown_clean;
  verdict(7, ok);
  CHECK(ok);
}
