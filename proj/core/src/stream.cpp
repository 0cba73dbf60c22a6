// Copyright 2026 The agentee Authors
// SPDX-License-Identifier: Apache-2.0

#include "agentee/stream.hpp"

#include <poll.h>
#include <sys/socket.h>
#include <sys/un.h>
#include <unistd.h>

#include <cerrno>
#include <csignal>
#include <cstring>
#include <mutex>

#include "agentee/errors.hpp"

namespace agentee {

namespace {

constexpr size_t kMaxStreamMessage = 64 * 1024 * 1024;

int remaining_ms(Deadline deadline) {
  auto now = std::chrono::steady_clock::now();
  if (now >= deadline) return 0;
  auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                deadline - now)
                .count();
  return static_cast<int>(std::min<int64_t>(ms + 1, 60'000));
}

void poll_wait(int fd, short events, Deadline deadline, const char* what) {
  for (;;) {
    int ms = remaining_ms(deadline);
    if (ms == 0) raise(Errc::timeout, std::string(what) + " timed out");
    struct pollfd pfd {};
    pfd.fd = fd;
    pfd.events = events;
    int rc = poll(&pfd, 1, ms);
    if (rc > 0) return;  // readable/writable or error/hup: let read/write see it
    if (rc == 0) continue;
    if (errno == EINTR) continue;
    raise(Errc::io, std::string("poll: ") + std::strerror(errno));
  }
}

void read_exact(int fd, uint8_t* dst, size_t len, Deadline deadline,
                const char* what) {
  size_t got = 0;
  while (got < len) {
    poll_wait(fd, POLLIN, deadline, what);
    ssize_t n = read(fd, dst + got, len - got);
    if (n > 0) {
      got += static_cast<size_t>(n);
      continue;
    }
    if (n == 0) raise(Errc::peer_closed, std::string(what) + ": stream EOF");
    if (errno == EINTR || errno == EAGAIN) continue;
    if (errno == ECONNRESET || errno == EPIPE)
      raise(Errc::peer_closed, std::string(what) + ": connection reset");
    raise(Errc::io, std::string(what) + ": " + std::strerror(errno));
  }
}

void write_all(int fd, const uint8_t* src, size_t len, Deadline deadline,
               const char* what) {
  size_t sent = 0;
  while (sent < len) {
    poll_wait(fd, POLLOUT, deadline, what);
    ssize_t n = write(fd, src + sent, len - sent);
    if (n > 0) {
      sent += static_cast<size_t>(n);
      continue;
    }
    if (n == 0) continue;
    if (errno == EINTR || errno == EAGAIN) continue;
    if (errno == ECONNRESET || errno == EPIPE)
      raise(Errc::peer_closed, std::string(what) + ": peer gone");
    raise(Errc::io, std::string(what) + ": " + std::strerror(errno));
  }
}

}  // namespace

Fd& Fd::operator=(Fd&& o) noexcept {
  if (this != &o) {
    reset(o.fd_);
    o.fd_ = -1;
  }
  return *this;
}

Fd::~Fd() { reset(); }

int Fd::release() {
  int fd = fd_;
  fd_ = -1;
  return fd;
}

void Fd::reset(int fd) {
  if (fd_ >= 0) ::close(fd_);
  fd_ = fd;
}

void ignore_sigpipe() {
  static std::once_flag once;
  std::call_once(once, [] { std::signal(SIGPIPE, SIG_IGN); });
}

void MessageStream::send_msg(ByteView body, Deadline deadline) {
  if (!fd_.valid()) raise(Errc::io, "send on closed stream");
  if (body.size() > kMaxStreamMessage)
    raise(Errc::protocol, "stream message too large");
  Bytes frame;
  frame.reserve(4 + body.size());
  put_be32(frame, static_cast<uint32_t>(body.size()));
  frame.insert(frame.end(), body.begin(), body.end());
  write_all(fd_.get(), frame.data(), frame.size(), deadline, "stream send");
}

Bytes MessageStream::recv_msg(Deadline deadline) {
  if (!fd_.valid()) raise(Errc::io, "recv on closed stream");
  uint8_t lenbuf[4];
  read_exact(fd_.get(), lenbuf, 4, deadline, "stream recv");
  uint32_t len = get_be32(lenbuf);
  if (len > kMaxStreamMessage)
    raise(Errc::protocol, "stream message too large");
  Bytes body(len);
  if (len > 0)
    read_exact(fd_.get(), body.data(), len, deadline, "stream recv");
  return body;
}

void MessageStream::close() { fd_.reset(); }

std::pair<Fd, Fd> stream_socketpair() {
  int fds[2];
  if (socketpair(AF_UNIX, SOCK_STREAM, 0, fds) != 0)
    raise(Errc::io, std::string("socketpair: ") + std::strerror(errno));
  return {Fd(fds[0]), Fd(fds[1])};
}

namespace {

sockaddr_un make_addr(const std::string& path) {
  sockaddr_un addr {};
  addr.sun_family = AF_UNIX;
  if (path.size() >= sizeof(addr.sun_path))
    raise(Errc::config, "unix socket path too long: " + path);
  std::memcpy(addr.sun_path, path.c_str(), path.size() + 1);
  return addr;
}

}  // namespace

Fd unix_listen(const std::string& path) {
  Fd fd(socket(AF_UNIX, SOCK_STREAM, 0));
  if (!fd.valid())
    raise(Errc::io, std::string("socket: ") + std::strerror(errno));
  unlink(path.c_str());
  sockaddr_un addr = make_addr(path);
  if (bind(fd.get(), reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0)
    raise(Errc::io, "bind " + path + ": " + std::strerror(errno));
  if (listen(fd.get(), 8) != 0)
    raise(Errc::io, "listen " + path + ": " + std::strerror(errno));
  return fd;
}

Fd unix_accept(int listen_fd, Deadline deadline) {
  for (;;) {
    poll_wait(listen_fd, POLLIN, deadline, "accept");
    int fd = accept(listen_fd, nullptr, nullptr);
    if (fd >= 0) return Fd(fd);
    if (errno == EINTR || errno == EAGAIN) continue;
    raise(Errc::io, std::string("accept: ") + std::strerror(errno));
  }
}

Fd unix_connect(const std::string& path, Deadline deadline) {
  Backoff backoff;
  for (;;) {
    Fd fd(socket(AF_UNIX, SOCK_STREAM, 0));
    if (!fd.valid())
      raise(Errc::io, std::string("socket: ") + std::strerror(errno));
    sockaddr_un addr = make_addr(path);
    if (connect(fd.get(), reinterpret_cast<sockaddr*>(&addr),
                sizeof(addr)) == 0)
      return fd;
    // The listener may not be up yet; retry until the deadline.
    if (std::chrono::steady_clock::now() >= deadline)
      raise(Errc::timeout, "connect " + path + " timed out");
    backoff.wait();
  }
}

}  // namespace agentee
