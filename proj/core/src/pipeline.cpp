// Copyright 2026 The agentee Authors
// SPDX-License-Identifier: Apache-2.0

#include "agentee/pipeline.hpp"

#include <chrono>
#include <fstream>
#include <sstream>

#include "agentee/crypto.hpp"
#include "agentee/errors.hpp"
#include "agentee/tools.hpp"

namespace agentee {

namespace {

std::string dir_of(const std::string& path) {
  size_t slash = path.rfind('/');
  return slash == std::string::npos ? "." : path.substr(0, slash);
}

std::string resolve(const std::string& base_dir, const std::string& path) {
  if (path.empty() || path[0] == '/') return path;
  return base_dir + "/" + path;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) raise(Errc::io, "cannot open: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace

std::string fresh_run_id() {
  crypto::init();
  return to_hex(crypto::random_bytes(4));
}

PipelineManifest PipelineManifest::load(const std::string& path) {
  KvConfig kv = KvConfig::load(path);
  std::string base = dir_of(path);

  PipelineManifest m;
  m.mode = mode_from_name(kv.get_or("mode", "realm-csm"));
  m.agent_kind = agent_kind_from_name(kv.get_or("agent_kind", "chatbot"));
  m.run_id = kv.get_or("run_id", "");
  m.io_timeout_ms = kv.get_int_or("io_timeout_ms", 30000);

  auto load_spec = [&](const std::string& key) {
    KvConfig spec_kv = KvConfig::load(resolve(base, kv.get(key)));
    // Image paths inside a spec resolve against the spec file itself.
    std::string spec_dir = dir_of(resolve(base, kv.get(key)));
    RealmSpec spec = RealmSpec::from_kv(spec_kv);
    spec.image_path = resolve(spec_dir, spec.image_path);
    return spec;
  };
  m.agent_spec = load_spec("agent_spec");
  m.model_spec = load_spec("model_spec");
  m.tool_spec = load_spec("tool_spec");

  m.assets.system_prompt = read_file(resolve(base, kv.get("system_prompt")));
  m.assets.agent_policy = read_file(resolve(base, kv.get("agent_policy")));
  m.assets.model_config = read_file(resolve(base, kv.get("model_config")));
  m.assets.tool_credential =
      read_file(resolve(base, kv.get("tool_credential")));
  if (kv.has("rates")) m.rates_path = resolve(base, kv.get("rates"));
  return m;
}

// Everything a single-address-space pipeline needs, wired directly.
struct Pipeline::InProcess {
  struct DirectModelPort : ModelPort {
    InferenceBackend* backend = nullptr;
    InferOutput infer(ByteView prompt_bytes, int max_tokens) override {
      return backend->generate(prompt_bytes, max_tokens);
    }
  };
  struct DirectToolPort : ToolPort {
    ToolRegistry* registry = nullptr;
    std::string call(const ToolCall& call) override {
      return registry->call(call);
    }
  };

  std::unique_ptr<InferenceBackend> backend;
  ToolRegistry registry;
  DirectModelPort model_port;
  DirectToolPort tool_port;
  std::unique_ptr<AgentCore> agent;
};

Pipeline Pipeline::start(const PipelineManifest& manifest,
                         const Options& options) {
  crypto::init();
  Pipeline p;
  p.mode_ = manifest.mode;
  p.io_timeout_ms_ = manifest.io_timeout_ms;
  p.run_id_ = !options.run_id_override.empty() ? options.run_id_override
              : !manifest.run_id.empty()       ? manifest.run_id
                                               : fresh_run_id();

  if (manifest.mode == IsolationMode::in_process) {
    auto local = std::make_unique<InProcess>();
    local->backend =
        make_backend(ModelConfig::parse(manifest.assets.model_config));
    local->registry.set_credential(manifest.assets.tool_credential);
    if (!manifest.rates_path.empty())
      local->registry.set_rates(load_rates(manifest.rates_path));
    local->model_port.backend = local->backend.get();
    local->tool_port.registry = &local->registry;
    local->agent = std::make_unique<AgentCore>(
        manifest.agent_kind, manifest.assets.system_prompt,
        AgentPolicy::parse(manifest.assets.agent_policy), local->model_port,
        &local->tool_port);
    p.local_ = std::move(local);
    return p;
  }

  auto host = std::make_unique<RealmHost>(p.run_id_, manifest.mode);
  host->add_realm(manifest.agent_spec);
  host->add_realm(manifest.model_spec);
  host->add_realm(manifest.tool_spec);

  LaunchOverrides overrides;
  overrides.agent_kind = agent_kind_name(manifest.agent_kind);
  overrides.rates_path = manifest.rates_path;
  overrides.io_timeout_ms = manifest.io_timeout_ms;
  overrides.agent_expects_model_measurement =
      options.agent_expects_model_measurement;

  try {
    host->launch(overrides);
    host->provision(manifest.assets);
    host->await_ready();
  } catch (const Error&) {
    host->shutdown();
    throw;
  }
  p.host_ = std::move(host);
  return p;
}

Pipeline::Pipeline(Pipeline&&) noexcept = default;
Pipeline& Pipeline::operator=(Pipeline&&) noexcept = default;

Pipeline::~Pipeline() {
  try {
    shutdown();
  } catch (...) {
  }
}

TurnOutcome Pipeline::query(const std::string& user_input) {
  if (local_ != nullptr) {
    auto start = std::chrono::steady_clock::now();
    TurnResult result = local_->agent->run_turn(user_input);
    TurnOutcome out;
    out.reply = result.reply;
    out.inference_seconds = result.inference_seconds;
    out.e2e_seconds = std::chrono::duration<double>(
                          std::chrono::steady_clock::now() - start)
                          .count();
    return out;
  }
  if (host_ == nullptr) raise(Errc::pipeline_not_ready, "pipeline is down");

  // A turn may legitimately take several channel deadlines (two model
  // calls plus a tool call), so the control wait is a multiple.
  int64_t wait_ms = io_timeout_ms_ * 3 + 5000;
  Bytes reply = host_->request(RealmRole::agent,
                               encode_fields({to_bytes("USER"),
                                              to_bytes(user_input)}),
                               wait_ms);
  std::vector<Bytes> f = decode_fields(reply);
  if (f.size() != 4 || field_tag(f) != "RSLT" || f[2].size() != 8 ||
      f[3].size() != 8)
    raise(Errc::protocol, "malformed turn result");
  TurnOutcome out;
  out.reply = to_string(f[1]);
  out.inference_seconds = static_cast<double>(get_be64(f[2].data())) / 1e6;
  out.e2e_seconds = static_cast<double>(get_be64(f[3].data())) / 1e6;
  return out;
}

uint64_t Pipeline::tool_calls() {
  if (local_ != nullptr) return local_->registry.calls_served();
  if (host_ == nullptr) raise(Errc::pipeline_not_ready, "pipeline is down");
  Bytes reply = host_->request(RealmRole::tool,
                               encode_fields({to_bytes("STAT")}), 10000);
  std::vector<Bytes> f = decode_fields(reply);
  if (f.size() != 2 || field_tag(f) != "SCNT" || f[1].size() != 8)
    raise(Errc::protocol, "malformed stat reply");
  return get_be64(f[1].data());
}

void Pipeline::shutdown() {
  if (host_ != nullptr) {
    host_->shutdown();
    host_.reset();
  }
  local_.reset();
}

}  // namespace agentee
