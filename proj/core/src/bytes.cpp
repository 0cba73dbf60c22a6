// Copyright 2026 The agentee Authors
// SPDX-License-Identifier: Apache-2.0

#include "agentee/bytes.hpp"

#include <limits>

#include "agentee/errors.hpp"

namespace agentee {

Bytes to_bytes(std::string_view s) {
  return Bytes(s.begin(), s.end());
}

std::string to_string(ByteView b) {
  return std::string(b.begin(), b.end());
}

void put_be16(Bytes& out, uint16_t v) {
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v));
}

void put_be32(Bytes& out, uint32_t v) {
  out.push_back(static_cast<uint8_t>(v >> 24));
  out.push_back(static_cast<uint8_t>(v >> 16));
  out.push_back(static_cast<uint8_t>(v >> 8));
  out.push_back(static_cast<uint8_t>(v));
}

void put_be64(Bytes& out, uint64_t v) {
  put_be32(out, static_cast<uint32_t>(v >> 32));
  put_be32(out, static_cast<uint32_t>(v));
}

uint16_t get_be16(const uint8_t* p) {
  return static_cast<uint16_t>((uint32_t{p[0]} << 8) | uint32_t{p[1]});
}

uint32_t get_be32(const uint8_t* p) {
  return (uint32_t{p[0]} << 24) | (uint32_t{p[1]} << 16) |
         (uint32_t{p[2]} << 8) | uint32_t{p[3]};
}

uint64_t get_be64(const uint8_t* p) {
  return (uint64_t{get_be32(p)} << 32) | uint64_t{get_be32(p + 4)};
}

std::string to_hex(ByteView b) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(b.size() * 2);
  for (uint8_t v : b) {
    out.push_back(digits[v >> 4]);
    out.push_back(digits[v & 0xf]);
  }
  return out;
}

namespace {

int hex_nibble(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

}  // namespace

Bytes from_hex(std::string_view hex) {
  if (hex.size() % 2 != 0) raise(Errc::config, "odd hex length");
  Bytes out;
  out.reserve(hex.size() / 2);
  for (size_t i = 0; i < hex.size(); i += 2) {
    int hi = hex_nibble(hex[i]);
    int lo = hex_nibble(hex[i + 1]);
    if (hi < 0 || lo < 0) raise(Errc::config, "bad hex digit");
    out.push_back(static_cast<uint8_t>((hi << 4) | lo));
  }
  return out;
}

Bytes encode_fields(const std::vector<Bytes>& fields) {
  if (fields.size() > 255) raise(Errc::oversized_message, "too many fields");
  Bytes out;
  size_t total = 1;
  for (const Bytes& f : fields) total += 4 + f.size();
  out.reserve(total);
  out.push_back(static_cast<uint8_t>(fields.size()));
  for (const Bytes& f : fields) {
    if (f.size() > std::numeric_limits<uint32_t>::max())
      raise(Errc::oversized_message, "field too large");
    put_be32(out, static_cast<uint32_t>(f.size()));
    out.insert(out.end(), f.begin(), f.end());
  }
  return out;
}

std::vector<Bytes> decode_fields(ByteView body) {
  if (body.empty()) raise(Errc::corrupt_frame, "empty field list");
  size_t count = body[0];
  std::vector<Bytes> fields;
  fields.reserve(count);
  size_t off = 1;
  for (size_t i = 0; i < count; ++i) {
    if (off + 4 > body.size())
      raise(Errc::corrupt_frame, "truncated field length");
    uint32_t len = get_be32(body.data() + off);
    off += 4;
    if (off + len > body.size()) raise(Errc::corrupt_frame, "truncated field");
    fields.emplace_back(body.begin() + off, body.begin() + off + len);
    off += len;
  }
  if (off != body.size()) raise(Errc::corrupt_frame, "trailing bytes");
  return fields;
}

std::string field_tag(const std::vector<Bytes>& fields) {
  if (fields.empty()) raise(Errc::corrupt_frame, "no tag field");
  return to_string(fields[0]);
}

}  // namespace agentee
