// Copyright 2026 The agentee Authors
// SPDX-License-Identifier: Apache-2.0

#include "agentee/realm_host.hpp"

#include <fcntl.h>
#include <signal.h>
#include <sys/stat.h>
#include <sys/types.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <set>

#include "agentee/csm.hpp"
#include "agentee/errors.hpp"
#include "agentee/provision.hpp"

namespace agentee {

IsolationMode mode_from_name(const std::string& name) {
  if (name == "in-process") return IsolationMode::in_process;
  if (name == "process-shm") return IsolationMode::process_shm;
  if (name == "realm-csm") return IsolationMode::realm_csm;
  raise(Errc::config, "unknown isolation mode: " + name);
}

const char* mode_name(IsolationMode mode) {
  switch (mode) {
    case IsolationMode::in_process:
      return "in-process";
    case IsolationMode::process_shm:
      return "process-shm";
    case IsolationMode::realm_csm:
      return "realm-csm";
  }
  return "unknown";
}

RealmSpec RealmSpec::from_kv(const KvConfig& kv) {
  RealmSpec spec;
  spec.role = role_from_name(kv.get("role"));
  spec.image_path = kv.get("image_path");
  spec.peers = kv.get_all("peer");
  spec.region_size =
      static_cast<size_t>(kv.get_int_or("region_size", 1 << 16));
  spec.ready_timeout_ms = kv.get_int_or("ready_timeout_ms", 15000);
  spec.validate();
  return spec;
}

RealmSpec RealmSpec::load(const std::string& path) {
  return from_kv(KvConfig::load(path));
}

void RealmSpec::validate() const {
  if (image_path.empty())
    raise(Errc::validation, "realm spec needs image_path");
  if (peers.empty())
    raise(Errc::validation, "realm spec needs at least one peer");
  for (const std::string& p : peers) {
    role_from_name(p);
    if (p == role_name(role))
      raise(Errc::validation, "realm cannot peer with itself");
  }
  if (region_size == 0 || region_size % 4096 != 0)
    raise(Errc::validation, "region_size must be a positive multiple of 4096");
  if (region_size < 16384)
    raise(Errc::validation, "region_size must be at least 16384");
  if (ready_timeout_ms <= 0)
    raise(Errc::validation, "ready_timeout_ms must be positive");
}

std::string locate_realm_binary() {
  if (const char* env = getenv("AGENTEE_REALM_BIN")) {
    if (access(env, X_OK) == 0) return env;
    raise(Errc::spawn_failure,
          std::string("AGENTEE_REALM_BIN not executable: ") + env);
  }
  char self[4096];
  ssize_t n = readlink("/proc/self/exe", self, sizeof(self) - 1);
  if (n > 0) {
    self[n] = '\0';
    std::string dir(self);
    size_t slash = dir.rfind('/');
    if (slash != std::string::npos) {
      dir = dir.substr(0, slash);
      for (const char* rel : {"/agentee-realm", "/../tools/agentee-realm"}) {
        std::string candidate = dir + rel;
        if (access(candidate.c_str(), X_OK) == 0) return candidate;
      }
    }
  }
  raise(Errc::spawn_failure, "cannot locate the agentee-realm binary");
}

RealmHost::RealmHost(std::string run_id, IsolationMode mode)
    : run_id_(std::move(run_id)), mode_(mode) {
  crypto::init();
  ignore_sigpipe();
  if (run_id_.empty() ||
      run_id_.find_first_not_of(
          "abcdefghijklmnopqrstuvwxyz0123456789-") != std::string::npos)
    raise(Errc::validation, "run id must be lowercase alphanumeric/dashes");
  if (mode_ == IsolationMode::in_process)
    raise(Errc::config, "in-process pipelines do not spawn realms");
  platform_ = crypto::sign_keygen();
  owner_ = crypto::sign_keygen();
}

RealmHost::~RealmHost() {
  try {
    shutdown();
  } catch (...) {
  }
}

std::string RealmHost::run_dir() const { return "/tmp/agentee-" + run_id_; }

RealmHost::Realm& RealmHost::realm_of(RealmRole role) {
  auto it = realms_.find(role);
  if (it == realms_.end())
    raise(Errc::config, std::string("no such realm: ") + role_name(role));
  return it->second;
}

const Bytes& RealmHost::measurement_of(RealmRole role) const {
  auto it = realms_.find(role);
  if (it == realms_.end())
    raise(Errc::config, std::string("no such realm: ") + role_name(role));
  return it->second.measurement;
}

void RealmHost::add_realm(const RealmSpec& spec) {
  spec.validate();
  if (realms_.count(spec.role) != 0)
    raise(Errc::validation,
          std::string("duplicate realm role: ") + role_name(spec.role));
  Realm realm;
  realm.spec = spec;
  realms_.emplace(spec.role, std::move(realm));
}

void RealmHost::create_regions() {
  // Peer declarations must be mutual.
  std::set<std::pair<RealmRole, RealmRole>> pairs;
  for (const auto& [role, realm] : realms_) {
    for (const std::string& peer_name : realm.spec.peers) {
      RealmRole peer = role_from_name(peer_name);
      auto pit = realms_.find(peer);
      if (pit == realms_.end())
        raise(Errc::validation, std::string(role_name(role)) +
                                    " peers with missing realm " + peer_name);
      const auto& back = pit->second.spec.peers;
      if (std::find(back.begin(), back.end(), role_name(role)) == back.end())
        raise(Errc::validation, peer_name + " does not peer back with " +
                                    role_name(role));
      pairs.insert({std::min(role, peer), std::max(role, peer)});
    }
  }

  for (const auto& [a, b] : pairs) {
    size_t size = std::min(realms_.at(a).spec.region_size,
                           realms_.at(b).spec.region_size);
    std::string name = region_name(run_id_, role_id(a), role_id(b));
    ShmRegion region = ShmRegion::create(name, size);
    RegionGeometry geometry;
    geometry.channel_count = 4;
    size_t per_channel = (size - kHeaderPageSize) / geometry.channel_count;
    size_t cap = per_channel > kRingStateSize ? per_channel - kRingStateSize
                                              : 0;
    cap -= cap % 64;
    geometry.capacity =
        static_cast<uint32_t>(std::min<size_t>(cap, 8192));
    geometry.default_directions();
    format_region(region, geometry);
    realms_.at(a).region_names.push_back(name);
    realms_.at(b).region_names.push_back(name);
    regions_.emplace(name, std::move(region));
  }
}

std::string RealmHost::write_launch_file(const Realm& realm,
                                         const LaunchOverrides& overrides) {
  const RealmSpec& spec = realm.spec;
  KvConfig kv;
  kv.set("role", role_name(spec.role));
  kv.set("run_id", run_id_);
  kv.set("realm_id", std::to_string(role_id(spec.role)));
  kv.set("mode", mode_name(mode_));
  kv.set("ready_timeout_ms", std::to_string(spec.ready_timeout_ms));
  kv.set("io_timeout_ms", std::to_string(overrides.io_timeout_ms));
  kv.set("measurement", to_hex(realm.measurement));
  kv.set("platform_sign_sk", to_hex(platform_.sk));
  kv.set("platform_sign_pk", to_hex(platform_.pk));
  kv.set("platform_verify_pk", to_hex(platform_.pk));
  if (mode_ == IsolationMode::realm_csm) {
    kv.set("owner_verify_pk", to_hex(owner_.pk));
    kv.set("prov_socket", realm.prov_socket);
  }
  if (spec.role == RealmRole::agent)
    kv.set("agent_kind", overrides.agent_kind);
  if (spec.role == RealmRole::tool && !overrides.rates_path.empty())
    kv.set("rates_path", overrides.rates_path);

  for (const std::string& peer_name : spec.peers) {
    RealmRole peer = role_from_name(peer_name);
    const Realm& peer_realm = realms_.at(peer);
    Bytes expected = peer_realm.measurement;
    if (spec.role == RealmRole::agent && peer == RealmRole::model &&
        !overrides.agent_expects_model_measurement.empty())
      expected = overrides.agent_expects_model_measurement;
    kv.set("peer", peer_name);
    kv.set("peer_id", std::to_string(role_id(peer)));
    kv.set("peer_measurement", to_hex(expected));
    kv.set("region",
           region_name(run_id_, role_id(spec.role), role_id(peer)));
    kv.set("region_side",
           role_id(spec.role) < role_id(peer) ? "a" : "b");
  }

  std::string path = run_dir() + "/" + role_name(spec.role) + ".launch";
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) raise(Errc::io, "cannot write launch file: " + path);
  out << kv.serialize();
  out.close();
  return path;
}

void RealmHost::spawn(Realm& realm, const std::string& launch_path) {
  static const std::string binary = locate_realm_binary();
  auto [host_end, child_end] = stream_socketpair();

  pid_t pid = fork();
  if (pid < 0)
    raise(Errc::spawn_failure, std::string("fork: ") + std::strerror(errno));
  if (pid == 0) {
    // Child: control stream on fd 3, everything else of ours closed.
    if (dup2(child_end.get(), 3) < 0) _exit(112);
    for (int fd = 4; fd < 256; ++fd) close(fd);
    execl(binary.c_str(), binary.c_str(), launch_path.c_str(),
          static_cast<char*>(nullptr));
    _exit(113);
  }
  realm.pid = pid;
  realm.control = MessageStream(std::move(host_end));
}

void RealmHost::launch(const LaunchOverrides& overrides) {
  if (launched_) raise(Errc::config, "pipeline already launched");
  if (realms_.empty()) raise(Errc::validation, "no realms declared");
  overrides_ = overrides;

  if (mkdir(run_dir().c_str(), 0700) != 0 && errno != EEXIST)
    raise(Errc::io, "mkdir " + run_dir() + ": " + std::strerror(errno));

  for (auto& [role, realm] : realms_) {
    realm.measurement = Bytes();
    crypto::Hash m = measure_image_file(role, realm.spec.image_path);
    realm.measurement.assign(m.begin(), m.end());
    if (mode_ == IsolationMode::realm_csm)
      realm.prov_socket =
          run_dir() + "/" + role_name(role) + ".prov";
  }

  create_regions();
  for (auto& [role, realm] : realms_) {
    std::string path = write_launch_file(realm, overrides);
    spawn(realm, path);
  }
  launched_ = true;
}

void RealmHost::provision(const PipelineAssets& assets) {
  if (!launched_) raise(Errc::config, "provision before launch");

  if (mode_ == IsolationMode::process_shm) {
    // Baseline without attestation: everything goes through the agent,
    // which forwards peer assets over the plain rings.
    Realm& agent = realm_of(RealmRole::agent);
    Deadline deadline = deadline_in(agent.spec.ready_timeout_ms);
    auto push = [&](AssetKind kind, const std::string& body) {
      agent.control.send_msg(
          encode_fields({to_bytes("ASET"),
                         Bytes{static_cast<uint8_t>(kind)},
                         to_bytes(body)}),
          deadline);
    };
    push(AssetKind::system_prompt, assets.system_prompt);
    push(AssetKind::agent_policy, assets.agent_policy);
    push(AssetKind::model_config, assets.model_config);
    push(AssetKind::tool_credential, assets.tool_credential);
    agent.control.send_msg(encode_fields({to_bytes("AFIN")}), deadline);
    return;
  }

  // realm-csm: the host plays the pipeline owner and provisions each realm
  // over its attested unix socket.
  for (auto& [role, realm] : realms_) {
    OwnerConfig cfg;
    cfg.owner_sign_sk = owner_.sk;
    cfg.owner_sign_pk = owner_.pk;
    cfg.platform_verify_pk = platform_.pk;
    cfg.expected_measurement = realm.measurement;
    cfg.role = role;
    cfg.timeout_ms = realm.spec.ready_timeout_ms;
    Fd conn = unix_connect(realm.prov_socket,
                           deadline_in(realm.spec.ready_timeout_ms));
    MessageStream stream(std::move(conn));
    OwnerSession session = OwnerSession::attach(stream, cfg);
    switch (role) {
      case RealmRole::agent:
        session.send_asset(AssetKind::system_prompt,
                           to_bytes(assets.system_prompt));
        session.send_asset(AssetKind::agent_policy,
                           to_bytes(assets.agent_policy));
        break;
      case RealmRole::model:
        session.send_asset(AssetKind::model_config,
                           to_bytes(assets.model_config));
        break;
      case RealmRole::tool:
        session.send_asset(AssetKind::tool_credential,
                           to_bytes(assets.tool_credential));
        break;
    }
    session.finish();
  }
}

void RealmHost::await_ready_one(Realm& realm) {
  if (realm.ready) return;
  Deadline deadline = deadline_in(realm.spec.ready_timeout_ms);
  for (;;) {
    Bytes msg;
    try {
      msg = realm.control.recv_msg(deadline);
    } catch (const Error& e) {
      if (e.code() == Errc::peer_closed || e.code() == Errc::timeout) {
        int status = 0;
        if (waitpid(realm.pid, &status, WNOHANG) == realm.pid) {
          realm.dead = true;
          raise(Errc::realm_crashed,
                std::string(role_name(realm.spec.role)) +
                    " realm exited before READY");
        }
      }
      throw;
    }
    if (to_string(msg) == "READY") {
      realm.ready = true;
      return;
    }
    std::vector<Bytes> f = decode_fields(msg);
    if (field_tag(f) == "ERRR" && f.size() == 3)
      throw Error(errc_from_name(to_string(f[1])), to_string(f[2]));
    raise(Errc::protocol, "unexpected message before READY");
  }
}

void RealmHost::await_ready() {
  for (auto& [role, realm] : realms_) await_ready_one(realm);
}

Bytes RealmHost::request(RealmRole role, ByteView body, int64_t timeout_ms) {
  Realm& realm = realm_of(role);
  if (realm.dead)
    raise(Errc::dead_realm,
          std::string(role_name(role)) + " realm is gone");
  Deadline deadline = deadline_in(timeout_ms);
  realm.control.send_msg(body, deadline);
  Bytes reply = realm.control.recv_msg(deadline);
  std::vector<Bytes> f = decode_fields(reply);
  if (field_tag(f) == "ERRR" && f.size() == 3)
    throw Error(errc_from_name(to_string(f[1])), to_string(f[2]));
  return reply;
}

bool RealmHost::alive(RealmRole role) {
  Realm& realm = realm_of(role);
  if (realm.dead || realm.pid < 0) return false;
  int status = 0;
  pid_t r = waitpid(realm.pid, &status, WNOHANG);
  if (r == realm.pid) {
    realm.dead = true;
    return false;
  }
  return r == 0;
}

void RealmHost::kill_realm(RealmRole role) {
  Realm& realm = realm_of(role);
  if (realm.pid >= 0 && !realm.dead) {
    ::kill(realm.pid, SIGKILL);
    int status = 0;
    waitpid(realm.pid, &status, 0);
    realm.dead = true;
  }
  for (const std::string& name : realm.region_names) {
    auto it = regions_.find(name);
    if (it != regions_.end()) force_close_region(it->second);
  }
}

void RealmHost::reap(Realm& realm, int64_t timeout_ms, bool then_kill) {
  if (realm.pid < 0 || realm.dead) return;
  Deadline deadline = deadline_in(timeout_ms);
  Backoff backoff;
  for (;;) {
    int status = 0;
    pid_t r = waitpid(realm.pid, &status, WNOHANG);
    if (r == realm.pid) {
      realm.dead = true;
      return;
    }
    if (std::chrono::steady_clock::now() >= deadline) {
      if (then_kill) {
        ::kill(realm.pid, SIGKILL);
        waitpid(realm.pid, &status, 0);
        realm.dead = true;
      }
      return;
    }
    backoff.wait();
  }
}

void RealmHost::shutdown() {
  if (shut_down_) return;
  shut_down_ = true;

  for (auto& [role, realm] : realms_) {
    if (realm.dead || realm.pid < 0 || !realm.control.valid()) continue;
    try {
      realm.control.send_msg(encode_fields({to_bytes("SHUT")}),
                             deadline_in(1000));
    } catch (const Error&) {
    }
  }
  for (auto& [role, realm] : realms_) {
    reap(realm, 3000, true);
    realm.control.close();
  }
  for (auto& [name, region] : regions_) ShmRegion::unlink(name);
  regions_.clear();

  for (auto& [role, realm] : realms_) {
    if (!realm.prov_socket.empty()) unlink(realm.prov_socket.c_str());
    std::string launch =
        run_dir() + "/" + role_name(role) + ".launch";
    unlink(launch.c_str());
  }
  rmdir(run_dir().c_str());
}

}  // namespace agentee
