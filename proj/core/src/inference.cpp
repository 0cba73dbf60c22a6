// Copyright 2026 The agentee Authors
// SPDX-License-Identifier: Apache-2.0

#include "agentee/inference.hpp"

#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdlib>
#include <sstream>
#include <thread>

#include "agentee/crypto.hpp"
#include "agentee/errors.hpp"
#include "agentee/prompt.hpp"
#include "agentee/stream.hpp"

namespace agentee {

namespace {

constexpr int kMockTokenCap = 32;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

int count_tokens(const std::string& text) {
  std::istringstream in(text);
  std::string tok;
  int n = 0;
  while (in >> tok) ++n;
  return n;
}

class MockBackend : public InferenceBackend {
 public:
  MockBackend(ModelConfig config, bool timed)
      : config_(std::move(config)), timed_(timed) {}

  InferOutput generate(ByteView prompt_bytes, int max_tokens) override {
    auto start = Clock::now();
    std::string output;
    if (!config_.scripted.empty()) {
      if (next_scripted_ >= config_.scripted.size())
        raise(Errc::backend_failure, "scripted replies exhausted");
      output = config_.scripted[next_scripted_++];
    } else {
      output = mock_generate(prompt_bytes, max_tokens);
    }
    if (timed_) {
      double ms = config_.per_token_delay_ms * count_tokens(output);
      if (ms > 0)
        std::this_thread::sleep_for(
            std::chrono::duration<double, std::milli>(ms));
    }
    return {std::move(output), seconds_since(start)};
  }

  const std::string& model_name() const override {
    return config_.model_name;
  }

 private:
  ModelConfig config_;
  bool timed_;
  size_t next_scripted_ = 0;
};

// External engine, newline-delimited UTF-8 over a unix stream socket.
// Request:   id \t prompt \t max_tokens \n
// Response:  id \t status \t payload \t seconds \n   status = ok | err
// Tabs, newlines and backslashes inside fields are escaped \t \n \\.
std::string escape_field(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '\\':
        out += "\\\\";
        break;
      case '\t':
        out += "\\t";
        break;
      case '\n':
        out += "\\n";
        break;
      default:
        out += c;
    }
  }
  return out;
}

std::string unescape_field(const std::string& s) {
  std::string out;
  out.reserve(s.size());
  for (size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\' || i + 1 == s.size()) {
      out += s[i];
      continue;
    }
    char n = s[++i];
    if (n == 't')
      out += '\t';
    else if (n == 'n')
      out += '\n';
    else
      out += n;
  }
  return out;
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> out;
  size_t start = 0;
  for (;;) {
    size_t tab = line.find('\t', start);
    // A '\t' preceded by a backslash is escaped content, not a separator;
    // escaped fields never contain raw tabs, so any raw tab splits.
    out.push_back(line.substr(
        start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

class ExternalBackend : public InferenceBackend {
 public:
  explicit ExternalBackend(ModelConfig config) : config_(std::move(config)) {
    if (config_.engine_endpoint.empty())
      raise(Errc::config, "external backend needs engine_endpoint");
    try {
      fd_ = unix_connect(config_.engine_endpoint, deadline_in(5000));
    } catch (const Error& e) {
      raise(Errc::engine_unreachable,
            "cannot reach engine at " + config_.engine_endpoint + ": " +
                e.what());
    }
  }

  InferOutput generate(ByteView prompt_bytes, int max_tokens) override {
    auto start = Clock::now();
    LabeledPrompt prompt = decode_prompt(prompt_bytes);
    std::string id = std::to_string(next_id_++);
    std::string req = escape_field(id) + "\t" +
                      escape_field(render_prompt(prompt)) + "\t" +
                      std::to_string(max_tokens) + "\n";
    send_line(req);
    std::string line = recv_line();
    std::vector<std::string> f = split_fields(line);
    if (f.size() != 4)
      raise(Errc::engine_error, "engine reply has wrong field count");
    if (unescape_field(f[0]) != id)
      raise(Errc::engine_error, "engine reply id mismatch");
    if (f[1] == "err")
      raise(Errc::engine_error, unescape_field(f[2]));
    if (f[1] != "ok") raise(Errc::engine_error, "bad engine status: " + f[1]);
    InferOutput out;
    out.output = unescape_field(f[2]);
    char* end = nullptr;
    out.seconds = std::strtod(f[3].c_str(), &end);
    if (end == f[3].c_str()) out.seconds = seconds_since(start);
    return out;
  }

  const std::string& model_name() const override {
    return config_.model_name;
  }

 private:
  void send_line(const std::string& line) {
    size_t sent = 0;
    while (sent < line.size()) {
      ssize_t n = write(fd_.get(), line.data() + sent, line.size() - sent);
      if (n > 0) {
        sent += static_cast<size_t>(n);
        continue;
      }
      if (n < 0 && errno == EINTR) continue;
      raise(Errc::engine_unreachable, "engine connection lost");
    }
  }

  std::string recv_line() {
    std::string line;
    char c;
    for (;;) {
      ssize_t n = read(fd_.get(), &c, 1);
      if (n == 1) {
        if (c == '\n') return line;
        line += c;
        continue;
      }
      if (n == 0) raise(Errc::engine_unreachable, "engine closed connection");
      if (errno == EINTR) continue;
      raise(Errc::engine_unreachable, "engine connection lost");
    }
  }

  ModelConfig config_;
  Fd fd_;
  uint64_t next_id_ = 1;
};

}  // namespace

ModelConfig ModelConfig::parse(const std::string& text) {
  return from_kv(KvConfig::parse(text));
}

ModelConfig ModelConfig::from_kv(const KvConfig& kv) {
  ModelConfig cfg;
  cfg.backend = kv.get_or("backend", "mock");
  cfg.model_name = kv.get_or("model_name", cfg.backend);
  if (kv.has("per_token_delay_ms"))
    cfg.per_token_delay_ms = kv.get_double("per_token_delay_ms");
  cfg.engine_endpoint = kv.get_or("engine_endpoint", "");
  cfg.scripted = kv.get_all("reply");
  if (cfg.per_token_delay_ms < 0)
    raise(Errc::config, "per_token_delay_ms must be >= 0");
  return cfg;
}

std::string mock_generate(ByteView prompt_bytes, int max_tokens) {
  int count = std::min(max_tokens, kMockTokenCap);
  if (count < 1) count = 1;
  std::string out;
  Bytes preimage(prompt_bytes.begin(), prompt_bytes.end());
  size_t base = preimage.size();
  preimage.resize(base + 8);
  for (int i = 0; i < count; ++i) {
    preimage.resize(base);
    put_be64(preimage, static_cast<uint64_t>(i));
    crypto::Hash h = crypto::sha256(preimage);
    std::string hex = to_hex(ByteView(h.data(), 3));
    if (i > 0) out += ' ';
    out += hex;
  }
  return out;
}

std::unique_ptr<InferenceBackend> make_backend(const ModelConfig& config) {
  if (config.backend == "mock")
    return std::make_unique<MockBackend>(config, false);
  if (config.backend == "timed-mock")
    return std::make_unique<MockBackend>(config, true);
  if (config.backend == "external")
    return std::make_unique<ExternalBackend>(config);
  raise(Errc::config, "unknown inference backend: " + config.backend);
}

}  // namespace agentee
