// Copyright 2026 The agentee Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <memory>
#include <string>

#include "agentee/agent.hpp"
#include "agentee/realm_host.hpp"

namespace agentee {

// Pipeline manifest file, flat key-value; relative paths resolve against
// the manifest's directory:
//   mode            in-process | process-shm | realm-csm
//   agent_kind      chatbot | itinerary
//   agent_spec / model_spec / tool_spec    realm spec files
//   system_prompt / agent_policy / model_config / tool_credential   assets
//   rates           currency table for the tool realm (not a secret)
//   run_id          optional; random when absent
//   io_timeout_ms   per-operation channel deadline
struct PipelineManifest {
  IsolationMode mode = IsolationMode::realm_csm;
  AgentKind agent_kind = AgentKind::chatbot;
  std::string run_id;
  RealmSpec agent_spec;
  RealmSpec model_spec;
  RealmSpec tool_spec;
  PipelineAssets assets;
  std::string rates_path;
  int64_t io_timeout_ms = 30000;

  static PipelineManifest load(const std::string& path);
};

struct TurnOutcome {
  std::string reply;
  double inference_seconds = 0.0;
  double e2e_seconds = 0.0;
};

// One running agent pipeline under a chosen isolation mode. The in-process
// mode wires the three stages together directly; the others stand up a
// RealmHost with three workers.
class Pipeline {
 public:
  struct Options {
    std::string run_id_override;
    // Fault injection: what the agent should expect the model to measure
    // as. Leaves launch data untouched when empty.
    Bytes agent_expects_model_measurement;
  };

  static Pipeline start(const PipelineManifest& manifest,
                        const Options& options = {});

  Pipeline(Pipeline&&) noexcept;
  Pipeline& operator=(Pipeline&&) noexcept;
  ~Pipeline();

  // Runs one user turn end to end. e2e covers the agent-side turn span;
  // inference sums the backend-reported decode spans.
  TurnOutcome query(const std::string& user_input);

  // Total successful tool dispatches inside the tool stage.
  uint64_t tool_calls();

  void shutdown();

  IsolationMode mode() const { return mode_; }
  const std::string& run_id() const { return run_id_; }
  // Null for in-process pipelines.
  RealmHost* host() { return host_.get(); }

 private:
  struct InProcess;

  Pipeline() = default;

  IsolationMode mode_ = IsolationMode::in_process;
  std::string run_id_;
  int64_t io_timeout_ms_ = 30000;
  std::unique_ptr<InProcess> local_;
  std::unique_ptr<RealmHost> host_;
};

// Fresh 8-char lowercase-hex run id.
std::string fresh_run_id();

}  // namespace agentee
