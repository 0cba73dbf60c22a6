// Copyright 2026 The agentee Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <map>
#include <string>
#include <vector>

#include "agentee/crypto.hpp"
#include "agentee/kvconfig.hpp"
#include "agentee/measurement.hpp"
#include "agentee/region.hpp"
#include "agentee/stream.hpp"

namespace agentee {

// How strongly the three pipeline stages are separated from each other:
//   in-process    direct calls, one address space (baseline)
//   process-shm   separate processes, plain shared-memory rings (control)
//   realm-csm     separate processes, mutual attestation, sealed rings,
//                 owner-provisioned secrets
enum class IsolationMode { in_process, process_shm, realm_csm };

IsolationMode mode_from_name(const std::string& name);  // Errc::config
const char* mode_name(IsolationMode mode);

// One realm of a pipeline, as declared by its spec file:
//   role             agent | model | tool
//   image_path       file whose bytes are measured at launch
//   peer             peer role name, repeatable
//   region_size      bytes per shared region with each peer
//   ready_timeout_ms how long the host waits for READY
struct RealmSpec {
  RealmRole role = RealmRole::agent;
  std::string image_path;
  std::vector<std::string> peers;
  size_t region_size = 1 << 16;
  int64_t ready_timeout_ms = 15000;

  static RealmSpec from_kv(const KvConfig& kv);
  static RealmSpec load(const std::string& path);
  void validate() const;  // throws Errc::validation
};

// Secrets the owner places into the pipeline. Which realm may hold which
// asset is fixed by role.
struct PipelineAssets {
  std::string system_prompt;   // agent
  std::string agent_policy;    // agent
  std::string model_config;    // model
  std::string tool_credential; // tool
};

struct LaunchOverrides {
  // Replaces the model measurement the agent expects; used to exercise the
  // launch-blocks-on-mismatch path.
  Bytes agent_expects_model_measurement;
  std::string agent_kind = "chatbot";
  std::string rates_path;
  int64_t io_timeout_ms = 30000;
};

// Spawns realm worker processes, wires their shared regions and control
// sockets, provisions secrets and supervises them for one run.
//
// Per realm: a control socketpair (worker end on fd 3) carrying
// length-framed messages. A realm announces readiness with the exact
// 5-byte message "READY"; fatal errors arrive as ["ERRR", name, message].
class RealmHost {
 public:
  RealmHost(std::string run_id, IsolationMode mode);
  ~RealmHost();

  RealmHost(const RealmHost&) = delete;
  RealmHost& operator=(const RealmHost&) = delete;

  void add_realm(const RealmSpec& spec);

  // Measures images, creates and formats regions, writes per-realm launch
  // files and spawns the worker binary for every realm.
  // Throws Errc::spawn_failure, Errc::region_allocation_failure,
  // Errc::validation.
  void launch(const LaunchOverrides& overrides = {});

  // realm-csm: attested owner provisioning over each realm's unix socket.
  // process-shm: pushes all assets to the agent over its control stream;
  // the agent forwards peer assets in-band over the plain rings.
  void provision(const PipelineAssets& assets);

  // Waits for READY from every realm. Propagates a realm-reported error
  // under its original code; a silent death raises Errc::realm_crashed, a
  // hang Errc::timeout.
  void await_ready();

  // One request/reply exchange on a realm's control stream. A reply of
  // ["ERRR", name, message] is rethrown under `name`. Throws
  // Errc::dead_realm when the realm was killed or crashed earlier.
  Bytes request(RealmRole role, ByteView body, int64_t timeout_ms);

  // SIGKILLs the realm, reaps it and force-closes every region it shares
  // so blocked peers fail with Errc::peer_closed.
  void kill_realm(RealmRole role);

  bool alive(RealmRole role);

  // Graceful stop: SHUT to every live realm, bounded wait, SIGKILL
  // stragglers, then region unlink and run-dir cleanup. Idempotent.
  void shutdown();

  const std::string& run_id() const { return run_id_; }
  const Bytes& measurement_of(RealmRole role) const;
  const Bytes& platform_verify_pk() const { return platform_.pk; }
  std::string run_dir() const;

 private:
  struct Realm {
    RealmSpec spec;
    Bytes measurement;
    pid_t pid = -1;
    MessageStream control;
    bool ready = false;
    bool dead = false;
    std::vector<std::string> region_names;
    std::string prov_socket;
  };

  Realm& realm_of(RealmRole role);
  void create_regions();
  std::string write_launch_file(const Realm& realm,
                                const LaunchOverrides& overrides);
  void spawn(Realm& realm, const std::string& launch_path);
  void await_ready_one(Realm& realm);
  void reap(Realm& realm, int64_t timeout_ms, bool then_kill);

  std::string run_id_;
  IsolationMode mode_;
  crypto::SignKeypair platform_;
  crypto::SignKeypair owner_;
  std::map<RealmRole, Realm> realms_;
  std::map<std::string, ShmRegion> regions_;
  LaunchOverrides overrides_;
  bool launched_ = false;
  bool shut_down_ = false;
};

// Path of the realm worker binary: $AGENTEE_REALM_BIN if set, otherwise
// "agentee-realm" next to the current executable. Throws
// Errc::spawn_failure when neither resolves to an executable file.
std::string locate_realm_binary();

}  // namespace agentee
