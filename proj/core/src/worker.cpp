// Copyright 2026 The agentee Authors
// SPDX-License-Identifier: Apache-2.0

#include "agentee/worker.hpp"

#include <poll.h>

#include <chrono>
#include <map>
#include <optional>

#include "agentee/agent.hpp"
#include "agentee/crypto.hpp"
#include "agentee/csm.hpp"
#include "agentee/errors.hpp"
#include "agentee/inference.hpp"
#include "agentee/kvconfig.hpp"
#include "agentee/provision.hpp"
#include "agentee/realm_host.hpp"
#include "agentee/session.hpp"
#include "agentee/stream.hpp"
#include "agentee/tools.hpp"

namespace agentee {

namespace {

constexpr int kControlFd = 3;
constexpr int64_t kIdleSliceMs = 50;

struct PeerDecl {
  RealmRole peer = RealmRole::agent;
  Bytes measurement;
  std::string region;
  RegionSide side = RegionSide::a;
};

struct LaunchInfo {
  RealmRole role = RealmRole::agent;
  std::string run_id;
  IsolationMode mode = IsolationMode::realm_csm;
  int64_t ready_timeout_ms = 15000;
  int64_t io_timeout_ms = 30000;
  Bytes measurement;
  Bytes platform_sign_sk;
  Bytes platform_sign_pk;
  Bytes platform_verify_pk;
  Bytes owner_verify_pk;
  std::string prov_socket;
  std::string agent_kind;
  std::string rates_path;
  std::vector<PeerDecl> peers;
};

LaunchInfo parse_launch(const KvConfig& kv) {
  LaunchInfo info;
  info.role = role_from_name(kv.get("role"));
  info.run_id = kv.get("run_id");
  info.mode = mode_from_name(kv.get("mode"));
  info.ready_timeout_ms = kv.get_int_or("ready_timeout_ms", 15000);
  info.io_timeout_ms = kv.get_int_or("io_timeout_ms", 30000);
  info.measurement = from_hex(kv.get("measurement"));
  info.platform_sign_sk = from_hex(kv.get("platform_sign_sk"));
  info.platform_sign_pk = from_hex(kv.get("platform_sign_pk"));
  info.platform_verify_pk = from_hex(kv.get("platform_verify_pk"));
  if (kv.has("owner_verify_pk"))
    info.owner_verify_pk = from_hex(kv.get("owner_verify_pk"));
  info.prov_socket = kv.get_or("prov_socket", "");
  info.agent_kind = kv.get_or("agent_kind", "chatbot");
  info.rates_path = kv.get_or("rates_path", "");

  // Peer blocks: a "peer" key opens a block, following keys fill it.
  PeerDecl current;
  bool open = false;
  for (const auto& [k, v] : kv.entries()) {
    if (k == "peer") {
      if (open) info.peers.push_back(current);
      current = PeerDecl();
      current.peer = role_from_name(v);
      open = true;
    } else if (open && k == "peer_measurement") {
      current.measurement = from_hex(v);
    } else if (open && k == "region") {
      current.region = v;
    } else if (open && k == "region_side") {
      current.side = side_from_name(v);
    }
  }
  if (open) info.peers.push_back(current);
  return info;
}

struct PeerLink {
  PeerDecl decl;
  ChannelSet channels;
  MsgChannel boot;
  SendEndpoint data_tx;
  RecvEndpoint data_rx;
  std::optional<SecureSession> session;
};

PeerLink open_link(const PeerDecl& decl) {
  PeerLink link;
  link.decl = decl;
  link.channels = ChannelSet(ShmRegion::open_existing(decl.region),
                             decl.side);
  bool is_a = decl.side == RegionSide::a;
  link.boot.tx = link.channels.take_send(is_a ? 0 : 1);
  link.boot.rx = link.channels.take_recv(is_a ? 1 : 0);
  link.data_tx = link.channels.take_send(is_a ? 2 : 3);
  link.data_rx = link.channels.take_recv(is_a ? 3 : 2);
  return link;
}

SessionConfig session_config(const LaunchInfo& info, const PeerDecl& decl) {
  SessionConfig cfg;
  cfg.platform_verify_pk = info.platform_verify_pk;
  cfg.platform_sign_sk = info.platform_sign_sk;
  cfg.platform_sign_pk = info.platform_sign_pk;
  cfg.own_measurement = info.measurement;
  cfg.expected_peer_measurement = decl.measurement;
  cfg.timeout_ms = info.ready_timeout_ms;
  return cfg;
}

// Sends a request over the link, sealed when a session is present.
Bytes link_roundtrip(PeerLink& link, ByteView request, Deadline deadline) {
  if (link.session) {
    link.session->seal_send(link.data_tx, request, deadline);
    return link.session->open_recv(link.data_rx, deadline);
  }
  link.data_tx.send(request, deadline);
  return link.data_rx.recv(deadline).payload;
}

class ChannelModelPort : public ModelPort {
 public:
  ChannelModelPort(PeerLink& link, int64_t timeout_ms)
      : link_(link), timeout_ms_(timeout_ms) {}

  InferOutput infer(ByteView prompt_bytes, int max_tokens) override {
    Bytes reply = link_roundtrip(
        link_, encode_infer_request(prompt_bytes, max_tokens),
        deadline_in(timeout_ms_));
    return decode_infer_response(reply);
  }

 private:
  PeerLink& link_;
  int64_t timeout_ms_;
};

class ChannelToolPort : public ToolPort {
 public:
  ChannelToolPort(PeerLink& link, int64_t timeout_ms)
      : link_(link), timeout_ms_(timeout_ms) {}

  std::string call(const ToolCall& call) override {
    Bytes reply = link_roundtrip(link_, encode_tool_request(call),
                                 deadline_in(timeout_ms_));
    return decode_tool_response(reply);
  }

 private:
  PeerLink& link_;
  int64_t timeout_ms_;
};

bool control_readable(const MessageStream& control) {
  struct pollfd pfd {};
  pfd.fd = control.fd();
  pfd.events = POLLIN;
  return poll(&pfd, 1, 0) > 0;
}

void send_error(MessageStream& control, Errc code, const std::string& msg) {
  try {
    control.send_msg(encode_error_reply("ERRR", code, msg),
                     deadline_in(1000));
  } catch (const Error&) {
  }
}

void send_ready(MessageStream& control) {
  control.send_msg(to_bytes("READY"), deadline_in(5000));
}

ProvisionedAssets acquire_assets_csm(const LaunchInfo& info) {
  RealmProvisionConfig cfg;
  cfg.owner_verify_pk = info.owner_verify_pk;
  cfg.platform_sign_sk = info.platform_sign_sk;
  cfg.platform_sign_pk = info.platform_sign_pk;
  cfg.own_measurement = info.measurement;
  cfg.role = info.role;
  cfg.timeout_ms = info.ready_timeout_ms;

  Fd listener = unix_listen(info.prov_socket);
  Fd conn = unix_accept(listener.get(),
                        deadline_in(info.ready_timeout_ms));
  MessageStream stream(std::move(conn));
  return provision_serve(stream, cfg);
}

// process-shm agent: all assets arrive plain on the control stream.
ProvisionedAssets recv_assets_control(MessageStream& control,
                                      int64_t timeout_ms) {
  ProvisionedAssets assets;
  Deadline deadline = deadline_in(timeout_ms);
  for (;;) {
    std::vector<Bytes> f = decode_fields(control.recv_msg(deadline));
    std::string tag = field_tag(f);
    if (tag == "AFIN") return assets;
    if (tag != "ASET" || f.size() != 3 || f[1].size() != 1)
      raise(Errc::protocol, "unexpected message during asset push");
    assets.by_kind[static_cast<AssetKind>(f[1][0])] = f[2];
  }
}

Bytes plain_asset_frame(AssetKind kind, const Bytes& body) {
  return encode_fields(
      {to_bytes("ASET"), Bytes{static_cast<uint8_t>(kind)}, body});
}

Bytes expect_plain_asset(PeerLink& link, AssetKind kind,
                         int64_t timeout_ms) {
  Bytes payload = link.boot.recv(deadline_in(timeout_ms)).payload;
  std::vector<Bytes> f = decode_fields(payload);
  if (f.size() != 3 || field_tag(f) != "ASET" || f[1].size() != 1 ||
      f[1][0] != static_cast<uint8_t>(kind))
    raise(Errc::protocol, "expected in-band asset frame");
  return f[2];
}

int serve_agent(const LaunchInfo& info, MessageStream& control) {
  std::map<RealmRole, PeerLink> links;
  for (const PeerDecl& decl : info.peers)
    links.emplace(decl.peer, open_link(decl));
  if (links.count(RealmRole::model) == 0)
    raise(Errc::config, "agent realm needs a model peer");

  std::string system_prompt;
  std::string policy_text;
  if (info.mode == IsolationMode::realm_csm) {
    ProvisionedAssets assets = acquire_assets_csm(info);
    system_prompt = to_string(assets.get(AssetKind::system_prompt));
    policy_text = to_string(assets.get(AssetKind::agent_policy));
    // The agent drives the handshake on every link.
    for (auto& [peer, link] : links)
      link.session.emplace(
          SecureSession::initiate(link.boot, session_config(info, link.decl)));
  } else {
    ProvisionedAssets assets =
        recv_assets_control(control, info.ready_timeout_ms);
    system_prompt = to_string(assets.get(AssetKind::system_prompt));
    policy_text = to_string(assets.get(AssetKind::agent_policy));
    // Forward peer assets in-band, in the clear: this is the baseline the
    // observer catches red-handed.
    Deadline deadline = deadline_in(info.io_timeout_ms);
    links.at(RealmRole::model)
        .boot.send(plain_asset_frame(AssetKind::model_config,
                                     assets.get(AssetKind::model_config)),
                   deadline);
    if (links.count(RealmRole::tool) != 0)
      links.at(RealmRole::tool)
          .boot.send(plain_asset_frame(AssetKind::tool_credential,
                                       assets.get(AssetKind::tool_credential)),
                     deadline);
  }

  AgentPolicy policy = AgentPolicy::parse(policy_text);
  ChannelModelPort model_port(links.at(RealmRole::model), info.io_timeout_ms);
  std::optional<ChannelToolPort> tool_port;
  if (links.count(RealmRole::tool) != 0)
    tool_port.emplace(links.at(RealmRole::tool), info.io_timeout_ms);

  AgentCore agent(agent_kind_from_name(info.agent_kind), system_prompt,
                  policy, model_port,
                  tool_port ? &*tool_port : nullptr);
  send_ready(control);

  for (;;) {
    Bytes msg;
    try {
      msg = control.recv_msg(deadline_in(3'600'000));
    } catch (const Error& e) {
      if (e.code() == Errc::timeout) continue;
      if (e.code() == Errc::peer_closed) return 0;  // host gone
      throw;
    }
    std::vector<Bytes> f = decode_fields(msg);
    std::string tag = field_tag(f);
    if (tag == "SHUT") break;
    if (tag == "USER" && f.size() == 2) {
      auto start = std::chrono::steady_clock::now();
      try {
        TurnResult result = agent.run_turn(to_string(f[1]));
        double e2e = std::chrono::duration<double>(
                         std::chrono::steady_clock::now() - start)
                         .count();
        Bytes infer_us, e2e_us;
        put_be64(infer_us,
                 static_cast<uint64_t>(result.inference_seconds * 1e6));
        put_be64(e2e_us, static_cast<uint64_t>(e2e * 1e6));
        control.send_msg(
            encode_fields({to_bytes("RSLT"), to_bytes(result.reply),
                           infer_us, e2e_us}),
            deadline_in(5000));
      } catch (const Error& e) {
        send_error(control, e.code(), e.what());
      }
      continue;
    }
    send_error(control, Errc::protocol, "unexpected control message " + tag);
  }

  for (auto& [peer, link] : links) {
    link.data_tx.close();
    link.data_rx.close();
  }
  return 0;
}

// Shared serve loop for model and tool realms: alternate between the
// control stream (SHUT / STAT) and the data ring from the agent.
template <typename Handler>
int serve_requests(const LaunchInfo& info, MessageStream& control,
                   PeerLink& link, Handler&& handle,
                   const ToolRegistry* stats) {
  send_ready(control);
  for (;;) {
    if (control_readable(control)) {
      Bytes msg;
      try {
        msg = control.recv_msg(deadline_in(1000));
      } catch (const Error& e) {
        if (e.code() == Errc::peer_closed) return 0;
        throw;
      }
      std::vector<Bytes> f = decode_fields(msg);
      std::string tag = field_tag(f);
      if (tag == "SHUT") return 0;
      if (tag == "STAT" && stats != nullptr) {
        Bytes count;
        put_be64(count, stats->calls_served());
        control.send_msg(encode_fields({to_bytes("SCNT"), count}),
                         deadline_in(1000));
        continue;
      }
      send_error(control, Errc::protocol, "unexpected control message");
      continue;
    }

    Bytes request;
    try {
      if (link.session) {
        request = link.session->open_recv(link.data_rx,
                                          deadline_in(kIdleSliceMs));
      } else {
        request = link.data_rx.recv(deadline_in(kIdleSliceMs)).payload;
      }
    } catch (const Error& e) {
      if (e.code() == Errc::timeout) continue;
      if (e.code() == Errc::peer_closed) return 0;
      throw;
    }

    Bytes reply = handle(request);
    Deadline deadline = deadline_in(info.io_timeout_ms);
    try {
      if (link.session)
        link.session->seal_send(link.data_tx, reply, deadline);
      else
        link.data_tx.send(reply, deadline);
    } catch (const Error& e) {
      if (e.code() == Errc::peer_closed) return 0;
      throw;
    }
  }
}

int serve_model(const LaunchInfo& info, MessageStream& control) {
  if (info.peers.size() != 1 || info.peers[0].peer != RealmRole::agent)
    raise(Errc::config, "model realm must peer with the agent");
  PeerLink link = open_link(info.peers[0]);

  std::string config_text;
  if (info.mode == IsolationMode::realm_csm) {
    ProvisionedAssets assets = acquire_assets_csm(info);
    config_text = to_string(assets.get(AssetKind::model_config));
    link.session.emplace(
        SecureSession::respond(link.boot, session_config(info, link.decl)));
  } else {
    config_text = to_string(expect_plain_asset(link, AssetKind::model_config,
                                               info.ready_timeout_ms));
  }

  std::unique_ptr<InferenceBackend> backend =
      make_backend(ModelConfig::parse(config_text));

  return serve_requests(
      info, control, link,
      [&](const Bytes& request) -> Bytes {
        try {
          InferRequest req = decode_infer_request(request);
          InferOutput out = backend->generate(req.prompt, req.max_tokens);
          return encode_infer_response(out.output, out.seconds);
        } catch (const Error& e) {
          return encode_error_reply("IERR", e.code(), e.what());
        }
      },
      nullptr);
}

int serve_tool(const LaunchInfo& info, MessageStream& control) {
  if (info.peers.size() != 1 || info.peers[0].peer != RealmRole::agent)
    raise(Errc::config, "tool realm must peer with the agent");
  PeerLink link = open_link(info.peers[0]);

  std::string credential;
  if (info.mode == IsolationMode::realm_csm) {
    ProvisionedAssets assets = acquire_assets_csm(info);
    credential = to_string(assets.get(AssetKind::tool_credential));
    link.session.emplace(
        SecureSession::respond(link.boot, session_config(info, link.decl)));
  } else {
    credential = to_string(expect_plain_asset(
        link, AssetKind::tool_credential, info.ready_timeout_ms));
  }

  ToolRegistry registry;
  registry.set_credential(credential);
  if (!info.rates_path.empty()) registry.set_rates(load_rates(info.rates_path));

  return serve_requests(
      info, control, link,
      [&](const Bytes& request) -> Bytes {
        try {
          ToolCall call = decode_tool_request(request);
          return encode_tool_response(registry.call(call));
        } catch (const Error& e) {
          return encode_error_reply("TERR", e.code(), e.what());
        }
      },
      &registry);
}

}  // namespace

int run_realm(const std::string& launch_path) {
  crypto::init();
  ignore_sigpipe();
  MessageStream control{Fd(kControlFd)};
  LaunchInfo info;
  try {
    info = parse_launch(KvConfig::load(launch_path));
    switch (info.role) {
      case RealmRole::agent:
        return serve_agent(info, control);
      case RealmRole::model:
        return serve_model(info, control);
      case RealmRole::tool:
        return serve_tool(info, control);
    }
    return 1;
  } catch (const Error& e) {
    send_error(control, e.code(), e.what());
    return 1;
  } catch (const std::exception& e) {
    send_error(control, Errc::io, e.what());
    return 1;
  }
}

}  // namespace agentee
