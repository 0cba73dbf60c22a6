// Copyright 2026 The agentee Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <utility>

#include "agentee/bytes.hpp"
#include "agentee/csm.hpp"

namespace agentee {

// Owning file descriptor.
class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  Fd(Fd&& o) noexcept : fd_(o.fd_) { o.fd_ = -1; }
  Fd& operator=(Fd&& o) noexcept;
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  ~Fd();

  int get() const { return fd_; }
  int release();
  bool valid() const { return fd_ >= 0; }
  void reset(int fd = -1);

 private:
  int fd_ = -1;
};

// Process-wide: stop SIGPIPE from killing us on writes to dead peers.
void ignore_sigpipe();

// Length-framed byte messages over a stream fd:
//   length:u32be || body
// Used on host<->realm control sockets and owner<->realm provisioning
// sockets. Blocking with poll()-based deadlines.
class MessageStream {
 public:
  MessageStream() = default;
  explicit MessageStream(Fd fd) : fd_(std::move(fd)) {}

  // Throws Errc::peer_closed on EOF/EPIPE, Errc::timeout on deadline,
  // Errc::protocol on oversized frames, Errc::io otherwise.
  void send_msg(ByteView body, Deadline deadline);
  Bytes recv_msg(Deadline deadline);

  bool valid() const { return fd_.valid(); }
  int fd() const { return fd_.get(); }
  void close();

 private:
  Fd fd_;
};

// Connected stream socketpair; first is kept by the host, second is passed
// to the child realm.
std::pair<Fd, Fd> stream_socketpair();

// Unix stream sockets (provisioning and external inference engines).
Fd unix_listen(const std::string& path);       // bind+listen; Errc::io
Fd unix_accept(int listen_fd, Deadline deadline);
Fd unix_connect(const std::string& path, Deadline deadline);

}  // namespace agentee
