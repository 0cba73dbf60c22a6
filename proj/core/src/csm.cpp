// Copyright 2026 The agentee Authors
// SPDX-License-Identifier: Apache-2.0

#include "agentee/csm.hpp"

#include <atomic>
#include <cstring>
#include <thread>

#include "agentee/errors.hpp"

namespace agentee {

namespace {

constexpr size_t kOffHead = 0;
constexpr size_t kOffTail = 8;
constexpr size_t kOffCapacity = 16;
constexpr size_t kOffProducerClosed = 20;
constexpr size_t kOffConsumerClosed = 21;

uint64_t load_counter(const uint8_t* state, size_t off) {
  return std::atomic_ref<const uint64_t>(
             *reinterpret_cast<const uint64_t*>(state + off))
      .load(std::memory_order_acquire);
}

void store_counter(uint8_t* state, size_t off, uint64_t v) {
  std::atomic_ref<uint64_t>(*reinterpret_cast<uint64_t*>(state + off))
      .store(v, std::memory_order_release);
}

uint8_t load_flag(const uint8_t* state, size_t off) {
  return std::atomic_ref<const uint8_t>(*(state + off))
      .load(std::memory_order_acquire);
}

void store_flag(uint8_t* state, size_t off, uint8_t v) {
  std::atomic_ref<uint8_t>(*(state + off)).store(v, std::memory_order_release);
}

void copy_into_ring(uint8_t* data, uint32_t capacity, uint64_t pos,
                    const uint8_t* src, size_t len) {
  size_t at = static_cast<size_t>(pos % capacity);
  size_t first = std::min(len, static_cast<size_t>(capacity) - at);
  std::memcpy(data + at, src, first);
  if (first < len) std::memcpy(data, src + first, len - first);
}

void copy_from_ring(const uint8_t* data, uint32_t capacity, uint64_t pos,
                    uint8_t* dst, size_t len) {
  size_t at = static_cast<size_t>(pos % capacity);
  size_t first = std::min(len, static_cast<size_t>(capacity) - at);
  std::memcpy(dst, data + at, first);
  if (first < len) std::memcpy(dst + first, data, len - first);
}

}  // namespace

Deadline deadline_in(int64_t ms) {
  return std::chrono::steady_clock::now() + std::chrono::milliseconds(ms);
}

void Backoff::wait() {
  std::this_thread::sleep_for(std::chrono::microseconds(next_us_));
  next_us_ = std::min<int64_t>(next_us_ * 2, 1000);
}

RegionSide side_from_name(const std::string& name) {
  if (name == "a") return RegionSide::a;
  if (name == "b") return RegionSide::b;
  raise(Errc::config, "region side must be 'a' or 'b', got: " + name);
}

void RegionGeometry::default_directions() {
  directions.resize(channel_count);
  for (uint16_t i = 0; i < channel_count; ++i)
    directions[i] = static_cast<uint8_t>(i % 2);
}

size_t RegionGeometry::bytes_needed() const {
  return kHeaderPageSize +
         static_cast<size_t>(channel_count) * (kRingStateSize + capacity);
}

void format_region(ShmRegion& region, const RegionGeometry& geometry) {
  if (geometry.channel_count == 0 || geometry.directions.size() !=
                                         geometry.channel_count)
    raise(Errc::config, "bad channel geometry");
  if (geometry.capacity <= kFrameHeaderSize)
    raise(Errc::config, "ring capacity too small");
  if (11 + geometry.directions.size() > kHeaderPageSize)
    raise(Errc::layout_overflow, "direction map exceeds header page");
  if (geometry.bytes_needed() > region.size())
    raise(Errc::layout_overflow,
          "region " + region.name() + " too small: needs " +
              std::to_string(geometry.bytes_needed()) + ", has " +
              std::to_string(region.size()));

  uint8_t* p = region.data();
  std::memcpy(p, "ACSR", 4);
  p[4] = kRegionVersion;
  p[5] = static_cast<uint8_t>(geometry.channel_count >> 8);
  p[6] = static_cast<uint8_t>(geometry.channel_count);
  p[7] = static_cast<uint8_t>(geometry.capacity >> 24);
  p[8] = static_cast<uint8_t>(geometry.capacity >> 16);
  p[9] = static_cast<uint8_t>(geometry.capacity >> 8);
  p[10] = static_cast<uint8_t>(geometry.capacity);
  std::memcpy(p + 11, geometry.directions.data(), geometry.directions.size());

  for (uint16_t ch = 0; ch < geometry.channel_count; ++ch) {
    uint8_t* state = p + kHeaderPageSize +
                     static_cast<size_t>(ch) *
                         (kRingStateSize + geometry.capacity);
    std::memset(state, 0, kRingStateSize);
    std::memcpy(state + kOffCapacity, &geometry.capacity, sizeof(uint32_t));
  }
}

RegionGeometry read_geometry(const ShmRegion& region) {
  if (region.size() < kHeaderPageSize)
    raise(Errc::corrupt_frame, "region smaller than header page");
  const uint8_t* p = region.data();
  if (std::memcmp(p, "ACSR", 4) != 0)
    raise(Errc::corrupt_frame, "bad region magic");
  if (p[4] != kRegionVersion)
    raise(Errc::header_version_mismatch,
          "region layout version " + std::to_string(p[4]) + ", expected " +
              std::to_string(kRegionVersion));
  RegionGeometry g;
  g.channel_count = get_be16(p + 5);
  g.capacity = get_be32(p + 7);
  if (g.channel_count == 0 || g.capacity <= kFrameHeaderSize)
    raise(Errc::corrupt_frame, "bad region geometry");
  g.directions.assign(p + 11, p + 11 + g.channel_count);
  if (g.bytes_needed() > region.size())
    raise(Errc::layout_overflow, "region smaller than advertised layout");
  return g;
}

Bytes encode_frame_header(uint8_t flags, uint16_t channel, uint64_t seq,
                          uint32_t length) {
  Bytes h;
  h.reserve(kFrameHeaderSize);
  h.insert(h.end(), {'A', 'C', 'S', 'M'});
  h.push_back(kRegionVersion);
  h.push_back(flags);
  put_be16(h, channel);
  put_be64(h, seq);
  put_be32(h, length);
  return h;
}

FrameHeader decode_frame_header(const uint8_t* p) {
  if (std::memcmp(p, "ACSM", 4) != 0)
    raise(Errc::corrupt_frame, "bad frame magic");
  if (p[4] != kRegionVersion)
    raise(Errc::corrupt_frame, "bad frame version");
  FrameHeader h;
  h.flags = p[5];
  h.channel = get_be16(p + 6);
  h.seq = get_be64(p + 8);
  h.length = get_be32(p + 16);
  return h;
}

SendEndpoint::SendEndpoint(uint8_t* state, uint8_t* data, uint32_t capacity,
                           uint16_t channel)
    : state_(state), data_(data), capacity_(capacity), channel_(channel) {}

SendEndpoint::SendEndpoint(SendEndpoint&& o) noexcept
    : state_(o.state_),
      data_(o.data_),
      capacity_(o.capacity_),
      channel_(o.channel_),
      next_seq_(o.next_seq_) {
  o.state_ = nullptr;
}

SendEndpoint& SendEndpoint::operator=(SendEndpoint&& o) noexcept {
  if (this != &o) {
    state_ = o.state_;
    data_ = o.data_;
    capacity_ = o.capacity_;
    channel_ = o.channel_;
    next_seq_ = o.next_seq_;
    o.state_ = nullptr;
  }
  return *this;
}

SendEndpoint::~SendEndpoint() = default;

void SendEndpoint::send(ByteView payload, Deadline deadline, uint8_t flags) {
  if (state_ == nullptr) raise(Errc::io, "send on empty endpoint");
  if (payload.size() > max_payload())
    raise(Errc::oversized_message,
          "payload " + std::to_string(payload.size()) + " exceeds " +
              std::to_string(max_payload()));
  uint64_t total = kFrameHeaderSize + payload.size();

  Backoff backoff;
  uint64_t head = load_counter(state_, kOffHead);
  for (;;) {
    if (load_flag(state_, kOffConsumerClosed) != 0 ||
        load_flag(state_, kOffProducerClosed) != 0)
      raise(Errc::peer_closed,
            "channel " + std::to_string(channel_) + " closed");
    uint64_t tail = load_counter(state_, kOffTail);
    if (head - tail + total <= capacity_) break;
    if (std::chrono::steady_clock::now() >= deadline)
      raise(Errc::timeout, "send timed out on channel " +
                               std::to_string(channel_));
    backoff.wait();
  }

  Bytes header = encode_frame_header(flags, channel_, next_seq_,
                                     static_cast<uint32_t>(payload.size()));
  copy_into_ring(data_, capacity_, head, header.data(), header.size());
  if (!payload.empty())
    copy_into_ring(data_, capacity_, head + header.size(), payload.data(),
                   payload.size());
  store_counter(state_, kOffHead, head + total);
  ++next_seq_;
}

void SendEndpoint::close() {
  if (state_ != nullptr) store_flag(state_, kOffProducerClosed, 1);
}

RecvEndpoint::RecvEndpoint(uint8_t* state, uint8_t* data, uint32_t capacity,
                           uint16_t channel)
    : state_(state), data_(data), capacity_(capacity), channel_(channel) {}

RecvEndpoint::RecvEndpoint(RecvEndpoint&& o) noexcept
    : state_(o.state_),
      data_(o.data_),
      capacity_(o.capacity_),
      channel_(o.channel_),
      next_seq_(o.next_seq_) {
  o.state_ = nullptr;
}

RecvEndpoint& RecvEndpoint::operator=(RecvEndpoint&& o) noexcept {
  if (this != &o) {
    state_ = o.state_;
    data_ = o.data_;
    capacity_ = o.capacity_;
    channel_ = o.channel_;
    next_seq_ = o.next_seq_;
    o.state_ = nullptr;
  }
  return *this;
}

RecvEndpoint::~RecvEndpoint() = default;

RecvFrame RecvEndpoint::recv(Deadline deadline) {
  if (state_ == nullptr) raise(Errc::io, "recv on empty endpoint");
  uint64_t tail = load_counter(state_, kOffTail);

  auto wait_for = [&](uint64_t needed) {
    Backoff backoff;
    for (;;) {
      uint64_t head = load_counter(state_, kOffHead);
      if (head - tail >= needed) return;
      if (load_flag(state_, kOffConsumerClosed) != 0)
        raise(Errc::peer_closed,
              "channel " + std::to_string(channel_) + " closed");
      if (load_flag(state_, kOffProducerClosed) != 0) {
        // Drain whatever was fully published before the close.
        head = load_counter(state_, kOffHead);
        if (head - tail >= needed) return;
        raise(Errc::peer_closed,
              "channel " + std::to_string(channel_) + " closed by producer");
      }
      if (std::chrono::steady_clock::now() >= deadline)
        raise(Errc::timeout, "recv timed out on channel " +
                                 std::to_string(channel_));
      backoff.wait();
    }
  };

  wait_for(kFrameHeaderSize);
  Bytes header(kFrameHeaderSize);
  copy_from_ring(data_, capacity_, tail, header.data(), header.size());
  FrameHeader h = decode_frame_header(header.data());
  if (h.channel != channel_)
    raise(Errc::corrupt_frame, "frame addressed to channel " +
                                   std::to_string(h.channel) + " on " +
                                   std::to_string(channel_));
  if (h.seq != next_seq_)
    raise(Errc::corrupt_frame, "sequence gap: got " + std::to_string(h.seq) +
                                   ", expected " + std::to_string(next_seq_));
  if (h.length > capacity_ - kFrameHeaderSize)
    raise(Errc::corrupt_frame, "frame length exceeds ring capacity");

  uint64_t total = kFrameHeaderSize + h.length;
  wait_for(total);

  RecvFrame out;
  out.flags = h.flags;
  out.seq = h.seq;
  out.header = std::move(header);
  out.payload.resize(h.length);
  if (h.length > 0)
    copy_from_ring(data_, capacity_, tail + kFrameHeaderSize,
                   out.payload.data(), h.length);
  store_counter(state_, kOffTail, tail + total);
  ++next_seq_;
  return out;
}

void RecvEndpoint::close() {
  if (state_ != nullptr) store_flag(state_, kOffConsumerClosed, 1);
}

ChannelSet::ChannelSet(ShmRegion region, RegionSide side)
    : region_(std::move(region)), side_(side) {
  geometry_ = read_geometry(region_);
  send_taken_.assign(geometry_.channel_count, false);
  recv_taken_.assign(geometry_.channel_count, false);
}

uint8_t* ChannelSet::state_ptr(uint16_t channel) {
  return region_.data() + kHeaderPageSize +
         static_cast<size_t>(channel) * (kRingStateSize + geometry_.capacity);
}

uint8_t* ChannelSet::data_ptr(uint16_t channel) {
  return state_ptr(channel) + kRingStateSize;
}

SendEndpoint ChannelSet::take_send(uint16_t channel) {
  if (channel >= geometry_.channel_count)
    raise(Errc::config, "no such channel: " + std::to_string(channel));
  uint8_t dir = geometry_.directions[channel];
  bool a_sends = dir == 0;
  if ((side_ == RegionSide::a) != a_sends)
    raise(Errc::config, "direction map forbids sending on channel " +
                            std::to_string(channel));
  if (send_taken_[channel])
    raise(Errc::config, "send endpoint already taken for channel " +
                            std::to_string(channel));
  send_taken_[channel] = true;
  return SendEndpoint(state_ptr(channel), data_ptr(channel),
                      geometry_.capacity, channel);
}

RecvEndpoint ChannelSet::take_recv(uint16_t channel) {
  if (channel >= geometry_.channel_count)
    raise(Errc::config, "no such channel: " + std::to_string(channel));
  uint8_t dir = geometry_.directions[channel];
  bool a_recvs = dir == 1;
  if ((side_ == RegionSide::a) != a_recvs)
    raise(Errc::config, "direction map forbids receiving on channel " +
                            std::to_string(channel));
  if (recv_taken_[channel])
    raise(Errc::config, "recv endpoint already taken for channel " +
                            std::to_string(channel));
  recv_taken_[channel] = true;
  return RecvEndpoint(state_ptr(channel), data_ptr(channel),
                      geometry_.capacity, channel);
}

void force_close_region(ShmRegion& region) {
  RegionGeometry g = read_geometry(region);
  for (uint16_t ch = 0; ch < g.channel_count; ++ch) {
    uint8_t* state = region.data() + kHeaderPageSize +
                     static_cast<size_t>(ch) * (kRingStateSize + g.capacity);
    store_flag(state, kOffProducerClosed, 2);
    store_flag(state, kOffConsumerClosed, 2);
  }
}

}  // namespace agentee
