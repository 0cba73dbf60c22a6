// Copyright 2026 The agentee Authors
// SPDX-License-Identifier: Apache-2.0

#include "agentee/measurement.hpp"

#include <fstream>
#include <sstream>

#include "agentee/errors.hpp"

namespace agentee {

const char* role_name(RealmRole role) {
  switch (role) {
    case RealmRole::agent:
      return "agent";
    case RealmRole::model:
      return "model";
    case RealmRole::tool:
      return "tool";
  }
  return "unknown";
}

RealmRole role_from_name(const std::string& name) {
  if (name == "agent") return RealmRole::agent;
  if (name == "model") return RealmRole::model;
  if (name == "tool") return RealmRole::tool;
  raise(Errc::config, "unknown realm role: " + name);
}

uint32_t role_id(RealmRole role) { return static_cast<uint32_t>(role); }

crypto::Hash measure_image(RealmRole role, ByteView payload) {
  Bytes preimage;
  preimage.reserve(9 + payload.size());
  preimage.push_back(static_cast<uint8_t>(role));
  put_be64(preimage, payload.size());
  preimage.insert(preimage.end(), payload.begin(), payload.end());
  return crypto::sha256(preimage);
}

crypto::Hash measure_image_file(RealmRole role, const std::string& image_path) {
  std::ifstream in(image_path, std::ios::binary);
  if (!in) raise(Errc::io, "cannot open realm image: " + image_path);
  std::ostringstream buf;
  buf << in.rdbuf();
  std::string data = buf.str();
  return measure_image(role, ByteView(
      reinterpret_cast<const uint8_t*>(data.data()), data.size()));
}

}  // namespace agentee
