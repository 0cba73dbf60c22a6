// Copyright 2026 The agentee Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <vector>

#include "agentee/bytes.hpp"
#include "agentee/region.hpp"

namespace agentee {

// Confidential shared-memory channel layout.
//
// Region:
//   header page (4096 bytes)
//     0   magic   "ACSR"
//     4   version 0x01
//     5   channel count   u16 be
//     7   ring capacity   u32 be   (same for every channel)
//     11  direction map   u8 per channel: 0 = A->B, 1 = B->A
//   then per channel, in index order:
//     ring state (64 bytes)
//       0   head            u64 native, producer-owned, release-stored
//       8   tail            u64 native, consumer-owned, release-stored
//       16  capacity        u32 native
//       20  producer closed u8
//       21  consumer closed u8
//       22..63 reserved
//     ring data (capacity bytes)
//
// head and tail count bytes monotonically; 0 <= head - tail <= capacity
// always holds. Frame bytes wrap around the ring byte-wise.
//
// Frame (written contiguously in ring byte order):
//   0   magic   "ACSM"
//   4   version 0x01
//   5   flags   u8 (bit 0: payload is sealed)
//   6   channel u16 be
//   8   seq     u64 be   (0,1,2,... per channel, no gaps)
//   16  length  u32 be   (payload bytes)
//   20  payload
//
// The 20-byte header doubles as AEAD associated data for sealed payloads.

inline constexpr size_t kHeaderPageSize = 4096;
inline constexpr size_t kRingStateSize = 64;
inline constexpr size_t kFrameHeaderSize = 20;
inline constexpr uint8_t kRegionVersion = 0x01;
inline constexpr uint8_t kFlagSealed = 0x01;

using Deadline = std::chrono::steady_clock::time_point;

// Deadline `ms` milliseconds from now.
Deadline deadline_in(int64_t ms);

// Exponential-backoff sleeper for polling loops: 1us doubling to a 1ms cap.
class Backoff {
 public:
  void wait();
  void reset() { next_us_ = 1; }

 private:
  int64_t next_us_ = 1;
};

enum class RegionSide : uint8_t { a = 0, b = 1 };

RegionSide side_from_name(const std::string& name);  // "a" | "b"

struct RegionGeometry {
  uint16_t channel_count = 4;
  uint32_t capacity = 8192;
  // directions[i]: 0 = A->B, 1 = B->A. Defaults to even A->B, odd B->A.
  std::vector<uint8_t> directions;

  void default_directions();
  size_t bytes_needed() const;
};

// Writes the header page and ring states into a zeroed region.
// Throws Errc::layout_overflow when the region is too small.
void format_region(ShmRegion& region, const RegionGeometry& geometry);

// Parses and validates the header page.
// Throws Errc::header_version_mismatch / Errc::corrupt_frame.
RegionGeometry read_geometry(const ShmRegion& region);

Bytes encode_frame_header(uint8_t flags, uint16_t channel, uint64_t seq,
                          uint32_t length);

struct FrameHeader {
  uint8_t flags = 0;
  uint16_t channel = 0;
  uint64_t seq = 0;
  uint32_t length = 0;
};

// Throws Errc::corrupt_frame on bad magic/version.
FrameHeader decode_frame_header(const uint8_t* p);

struct RecvFrame {
  Bytes payload;
  uint8_t flags = 0;
  uint64_t seq = 0;
  Bytes header;  // exact 20 header bytes, for AEAD associated data
};

// Producer half of one SPSC ring. Take from ChannelSet once; movable.
class SendEndpoint {
 public:
  SendEndpoint() = default;
  SendEndpoint(uint8_t* state, uint8_t* data, uint32_t capacity,
               uint16_t channel);
  SendEndpoint(SendEndpoint&&) noexcept;
  SendEndpoint& operator=(SendEndpoint&&) noexcept;
  SendEndpoint(const SendEndpoint&) = delete;
  SendEndpoint& operator=(const SendEndpoint&) = delete;
  ~SendEndpoint();

  // Blocks (backoff polling) until the frame fits or the deadline passes.
  // Throws Errc::oversized_message, Errc::peer_closed, Errc::timeout.
  void send(ByteView payload, Deadline deadline, uint8_t flags = 0);

  // Sequence number the next send will use.
  uint64_t next_seq() const { return next_seq_; }
  uint16_t channel() const { return channel_; }
  uint32_t max_payload() const { return capacity_ - kFrameHeaderSize; }
  bool valid() const { return state_ != nullptr; }

  // Marks the producer side closed; the peer's blocked recv unblocks with
  // Errc::peer_closed once drained.
  void close();

 private:
  uint8_t* state_ = nullptr;
  uint8_t* data_ = nullptr;
  uint32_t capacity_ = 0;
  uint16_t channel_ = 0;
  uint64_t next_seq_ = 0;
};

// Consumer half of one SPSC ring.
class RecvEndpoint {
 public:
  RecvEndpoint() = default;
  RecvEndpoint(uint8_t* state, uint8_t* data, uint32_t capacity,
               uint16_t channel);
  RecvEndpoint(RecvEndpoint&&) noexcept;
  RecvEndpoint& operator=(RecvEndpoint&&) noexcept;
  RecvEndpoint(const RecvEndpoint&) = delete;
  RecvEndpoint& operator=(const RecvEndpoint&) = delete;
  ~RecvEndpoint();

  // Blocks until one whole frame arrives. Validates magic, version and the
  // gapless per-channel sequence. Throws Errc::corrupt_frame,
  // Errc::peer_closed, Errc::timeout.
  RecvFrame recv(Deadline deadline);

  uint64_t next_seq() const { return next_seq_; }
  uint16_t channel() const { return channel_; }
  bool valid() const { return state_ != nullptr; }

  void close();

 private:
  uint8_t* state_ = nullptr;
  uint8_t* data_ = nullptr;
  uint32_t capacity_ = 0;
  uint16_t channel_ = 0;
  uint64_t next_seq_ = 0;
};

// One side's view over all channels of a mapped region. Endpoints may be
// taken exactly once; direction is enforced against the header map.
class ChannelSet {
 public:
  ChannelSet() = default;
  ChannelSet(ShmRegion region, RegionSide side);

  uint16_t channel_count() const { return geometry_.channel_count; }
  uint32_t capacity() const { return geometry_.capacity; }
  RegionSide side() const { return side_; }
  ShmRegion& region() { return region_; }

  // Throws Errc::config when the direction map forbids this side sending /
  // receiving on the channel, or when the endpoint was already taken.
  SendEndpoint take_send(uint16_t channel);
  RecvEndpoint take_recv(uint16_t channel);

 private:
  uint8_t* state_ptr(uint16_t channel);
  uint8_t* data_ptr(uint16_t channel);

  ShmRegion region_;
  RegionSide side_ = RegionSide::a;
  RegionGeometry geometry_;
  std::vector<bool> send_taken_;
  std::vector<bool> recv_taken_;
};

// Sets both closed flags on every channel so any blocked peer unblocks
// with Errc::peer_closed. Host-side, used when a realm dies.
void force_close_region(ShmRegion& region);

}  // namespace agentee
