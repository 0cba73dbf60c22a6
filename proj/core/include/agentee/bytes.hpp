// Copyright 2026 The agentee Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace agentee {

using Bytes = std::vector<uint8_t>;
using ByteView = std::span<const uint8_t>;

Bytes to_bytes(std::string_view s);
std::string to_string(ByteView b);

// Big-endian integer packing.
void put_be16(Bytes& out, uint16_t v);
void put_be32(Bytes& out, uint32_t v);
void put_be64(Bytes& out, uint64_t v);
uint16_t get_be16(const uint8_t* p);
uint32_t get_be32(const uint8_t* p);
uint64_t get_be64(const uint8_t* p);

std::string to_hex(ByteView b);
Bytes from_hex(std::string_view hex);  // throws Errc::config on bad input

// Field-list message body codec:
//   count:u8 || field... where field = len:u32be || bytes
// Used for every structured message crossing a channel or stream.
Bytes encode_fields(const std::vector<Bytes>& fields);
std::vector<Bytes> decode_fields(ByteView body);  // throws Errc::corrupt_frame

// Convenience: first field as string tag ("HS1", "ASET", ...).
std::string field_tag(const std::vector<Bytes>& fields);

}  // namespace agentee
