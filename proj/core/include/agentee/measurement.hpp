// Copyright 2026 The agentee Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <string>

#include "agentee/bytes.hpp"
#include "agentee/crypto.hpp"

namespace agentee {

// The three realm roles of a pipeline, in fixed id order.
enum class RealmRole : uint8_t { agent = 1, model = 2, tool = 3 };

const char* role_name(RealmRole role);
RealmRole role_from_name(const std::string& name);  // throws Errc::config
uint32_t role_id(RealmRole role);

// Launch-time measurement of a realm image: a digest over the role tag and
// the image bytes, so the same payload measured under a different role
// yields a different value.
//   preimage = role:u8 || payload_len:u64be || payload
crypto::Hash measure_image(RealmRole role, ByteView payload);

// Measures the file contents at image_path. Throws Errc::io.
crypto::Hash measure_image_file(RealmRole role, const std::string& image_path);

}  // namespace agentee
