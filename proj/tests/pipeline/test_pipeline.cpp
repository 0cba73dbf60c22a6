// Copyright 2026 The agentee Authors
// SPDX-License-Identifier: Apache-2.0
//
// Whole-pipeline integration: the same manifests run under every isolation
// mode and must produce byte-identical replies, enforce the tool policy,
// survive realm failures and refuse to start on attestation mismatches.

#include <string>
#include <vector>

#include "agentee/bench.hpp"
#include "agentee/crypto.hpp"
#include "agentee/errors.hpp"
#include "agentee/inference.hpp"
#include "agentee/observer.hpp"
#include "agentee/pipeline.hpp"
#include "agentee/prompt.hpp"
#include "doctest.h"
#include "test_util.hpp"

using namespace agentee;
using testutil::fixture_path;
using testutil::thrown_code;

namespace {

const IsolationMode kAllModes[] = {IsolationMode::in_process,
                                   IsolationMode::process_shm,
                                   IsolationMode::realm_csm};

PipelineManifest chatbot_manifest() {
  return PipelineManifest::load(fixture_path("conf/pipeline_chatbot.conf"));
}

PipelineManifest itinerary_manifest() {
  return PipelineManifest::load(fixture_path("conf/pipeline_itinerary.conf"));
}

// Recomputes what the deterministic mock backend must answer for a chat
// transcript, independently of any pipeline plumbing.
std::string expected_chat_reply(const std::string& system_text,
                                const std::vector<std::string>& turns,
                                int max_tokens) {
  LabeledPrompt prompt;
  prompt.messages.push_back({MsgRole::system, system_text});
  std::string reply;
  for (const std::string& q : turns) {
    prompt.messages.push_back({MsgRole::user, q});
    reply = mock_generate(encode_prompt(prompt), max_tokens);
    prompt.messages.push_back({MsgRole::assistant, reply});
  }
  return reply;
}

}  // namespace

TEST_CASE("chatbot replies are byte-identical across isolation modes") {
  auto queries = load_queries(fixture_path("queries_chatbot.txt"));
  REQUIRE(queries.size() >= 2);
  std::vector<std::string> turns{queries[0], queries[1]};

  PipelineManifest manifest = chatbot_manifest();
  std::string oracle_turn1 =
      expected_chat_reply(manifest.assets.system_prompt, {turns[0]}, 20);
  std::string oracle_turn2 =
      expected_chat_reply(manifest.assets.system_prompt, turns, 20);

  for (IsolationMode mode : kAllModes) {
    CAPTURE(mode_name(mode));
    manifest.mode = mode;
    Pipeline pipeline = Pipeline::start(manifest);
    CHECK(pipeline.mode() == mode);
    CHECK((pipeline.host() == nullptr) ==
          (mode == IsolationMode::in_process));

    TurnOutcome first = pipeline.query(turns[0]);
    TurnOutcome second = pipeline.query(turns[1]);
    CHECK(first.reply == oracle_turn1);
    CHECK(second.reply == oracle_turn2);
    CHECK(first.reply != second.reply);
    CHECK(first.inference_seconds >= 0.0);
    CHECK(first.e2e_seconds >= first.inference_seconds);
    CHECK(pipeline.tool_calls() == 0);
    pipeline.shutdown();
  }
}

TEST_CASE("itinerary pipelines dispatch tools identically across modes") {
  auto rows = load_queries(fixture_path("queries_itinerary.txt"));
  REQUIRE(rows.size() >= 2);
  PipelineManifest manifest = itinerary_manifest();
  ModelConfig script = ModelConfig::parse(manifest.assets.model_config);
  REQUIRE(script.scripted.size() == 4);  // directive, final, directive, final

  for (IsolationMode mode : kAllModes) {
    CAPTURE(mode_name(mode));
    manifest.mode = mode;
    Pipeline pipeline = Pipeline::start(manifest);

    TurnOutcome first = pipeline.query(rows[0]);
    CHECK(first.reply == script.scripted[1]);
    CHECK(pipeline.tool_calls() == 1);

    TurnOutcome second = pipeline.query(rows[1]);
    CHECK(second.reply == script.scripted[3]);
    CHECK(pipeline.tool_calls() == 2);
    pipeline.shutdown();
  }
}

TEST_CASE("the policy gate refuses undeclared tools in every mode") {
  auto rows = load_queries(fixture_path("queries_itinerary.txt"));
  PipelineManifest manifest = itinerary_manifest();
  manifest.assets.agent_policy = "max_tokens = 20\n";  // no tool grants

  for (IsolationMode mode :
       {IsolationMode::in_process, IsolationMode::realm_csm}) {
    CAPTURE(mode_name(mode));
    manifest.mode = mode;
    Pipeline pipeline = Pipeline::start(manifest);
    CHECK(thrown_code([&] { pipeline.query(rows[0]); }) ==
          Errc::unknown_tool);
    CHECK(pipeline.tool_calls() == 0);
    pipeline.shutdown();
  }
}

TEST_CASE("a killed tool realm downs tool calls but not the agent") {
  auto rows = load_queries(fixture_path("queries_itinerary.txt"));
  PipelineManifest manifest = itinerary_manifest();
  manifest.mode = IsolationMode::realm_csm;
  ModelConfig script = ModelConfig::parse(manifest.assets.model_config);

  Pipeline pipeline = Pipeline::start(manifest);
  REQUIRE(pipeline.host() != nullptr);
  pipeline.host()->kill_realm(RealmRole::tool);
  CHECK_FALSE(pipeline.host()->alive(RealmRole::tool));

  // Turn 1 wants the currency tool; the dispatch must fail cleanly.
  CHECK(thrown_code([&] { pipeline.query(rows[0]); }) ==
        Errc::tool_channel_down);

  // The agent and model survived and keep serving tool-free turns.
  CHECK(pipeline.host()->alive(RealmRole::agent));
  CHECK(pipeline.host()->alive(RealmRole::model));
  TurnOutcome outcome = pipeline.query(rows[1]);
  CHECK(outcome.reply == script.scripted[1]);
  pipeline.shutdown();
}

TEST_CASE("shutdown is idempotent and queries after it are refused") {
  PipelineManifest manifest = chatbot_manifest();
  manifest.mode = IsolationMode::realm_csm;
  Pipeline pipeline = Pipeline::start(manifest);
  std::string run_id = pipeline.run_id();
  CHECK(!pipeline.query("still up?").reply.empty());

  pipeline.shutdown();
  pipeline.shutdown();
  CHECK(thrown_code([&] { pipeline.query("anyone home?"); }) ==
        Errc::pipeline_not_ready);
  // Shutdown removed the run's shared regions.
  CHECK(discover_regions(run_id).empty());
}

TEST_CASE("a missing realm image fails the launch") {
  PipelineManifest manifest = chatbot_manifest();
  manifest.mode = IsolationMode::realm_csm;
  manifest.agent_spec.image_path = "/nonexistent/agent.image";
  CHECK(thrown_code([&] { Pipeline::start(manifest); }) == Errc::io);
}

TEST_CASE("an agent expecting a different model measurement never starts") {
  PipelineManifest manifest = chatbot_manifest();
  manifest.mode = IsolationMode::realm_csm;
  Pipeline::Options options;
  options.agent_expects_model_measurement =
      crypto::random_bytes(crypto::kHashSize);
  CHECK(thrown_code([&] { Pipeline::start(manifest, options); }) ==
        Errc::measurement_mismatch);
}
